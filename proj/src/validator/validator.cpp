#include "prox/validator/validator.hpp"

#include <algorithm>
#include <tuple>

#include "json.hpp"

#include "prox/encoder/encoder.hpp"
#include "prox/error.hpp"

namespace prox::validator {

using model::DataKind;
using model::DataNode;
using model::DataState;
using model::NodeRef;

std::string_view toString(Code code) {
    switch (code) {
    case Code::InputUnconnected: return "E_INPUT_UNCONNECTED";
    case Code::InputAttrUnconnected: return "E_INPUT_ATTR_UNCONNECTED";
    case Code::OutputUnconnected: return "E_OUTPUT_UNCONNECTED";
    case Code::OutputAttrUnconnected: return "E_OUTPUT_ATTR_UNCONNECTED";
    case Code::OpDisconnected: return "E_OP_DISCONNECTED";
    case Code::OpEmptyExpr: return "E_OP_EMPTY_EXPR";
    case Code::SelfLoop: return "E_SELF_LOOP";
    case Code::TypeMismatch: return "E_TYPE_MISMATCH";
    case Code::ForeignTableInUpdate: return "E_FOREIGN_TABLE_IN_UPDATE";
    case Code::ReadonlyWrite: return "E_READONLY_WRITE";
    case Code::BlockArity: return "E_BLOCK_ARITY";
    }
    return "E_UNKNOWN";
}

namespace {

bool hasOutgoing(const model::Task& task, const NodeRef& ref) {
    return std::any_of(task.dataflow.begin(), task.dataflow.end(), [&](const auto& e) { return e.src == ref; });
}

bool hasIncoming(const model::Task& task, const NodeRef& ref) {
    return std::any_of(task.dataflow.begin(), task.dataflow.end(), [&](const auto& e) { return e.dst == ref; });
}

bool blank(const std::string& text) {
    return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
}

class Checker {
public:
    explicit Checker(const model::ProcessModel& model) : model_(model) {}

    std::vector<Diagnostic> run() {
        checkBlock(model_.root, "root");
        for (const auto* task : model::tasks(model_)) {
            checkTask(*task);
        }
        std::sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
            return std::tie(a.taskId, a.subject, a.code) < std::tie(b.taskId, b.subject, b.code);
        });
        return std::move(out_);
    }

private:
    const model::ProcessModel& model_;
    std::vector<Diagnostic> out_;

    void emit(Code code, const std::string& task, const std::string& subject, std::string message) {
        out_.push_back(Diagnostic{code, task, subject, std::move(message)});
    }

    void checkBlock(const model::Block& block, const std::string& path) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, model::Sequence>) {
                    if (n.children.empty()) {
                        emit(Code::BlockArity, "", path, "sequence has no children");
                    }
                } else if constexpr (!std::is_same_v<T, model::Task>) {
                    if (n.branches.size() != 2) {
                        emit(Code::BlockArity, "", path,
                             "block has " + std::to_string(n.branches.size()) + " branches; expected 2");
                    }
                }
            },
            block.node);
        const auto& children = block.children();
        for (std::size_t i = 0; i < children.size(); ++i) {
            checkBlock(children[i], path + "." + std::to_string(i));
        }
    }

    void checkTask(const model::Task& task) {
        const std::string& id = task.id;
        for (const auto& in : task.inputs) {
            if (in.attributes.empty()) {
                if (!hasOutgoing(task, NodeRef{NodeRef::Kind::Node, in.name, {}})) {
                    emit(Code::InputUnconnected, id, in.name, "input '" + in.name + "' has no outgoing dataflow");
                }
            }
            for (const auto& a : in.attributes) {
                NodeRef ref{NodeRef::Kind::Attribute, in.name, a.name};
                if (!hasOutgoing(task, ref)) {
                    emit(Code::InputAttrUnconnected, id, ref.str(),
                         "input attribute '" + ref.str() + "' has no outgoing dataflow");
                }
            }
        }
        for (const auto& o : task.outputs) {
            if (o.state == DataState::Deleted) {
                continue;
            }
            if (o.attributes.empty()) {
                if (!hasIncoming(task, NodeRef{NodeRef::Kind::Node, o.name, {}})) {
                    emit(Code::OutputUnconnected, id, o.name, "output '" + o.name + "' has no incoming dataflow");
                }
            }
            for (const auto& a : o.attributes) {
                NodeRef ref{NodeRef::Kind::Attribute, o.name, a.name};
                if (!hasIncoming(task, ref)) {
                    emit(Code::OutputAttrUnconnected, id, ref.str(),
                         "output attribute '" + ref.str() + "' has no incoming dataflow");
                }
            }
        }
        for (const auto& op : task.operations) {
            NodeRef ref{NodeRef::Kind::Operation, op.id, {}};
            bool in = hasIncoming(task, ref);
            bool out = hasOutgoing(task, ref);
            if (!in || !out) {
                std::string missing = !in && !out ? "incoming and outgoing" : !in ? "incoming" : "outgoing";
                emit(Code::OpDisconnected, id, ref.str(), "operation '" + op.id + "' has no " + missing + " dataflow");
            }
            if (blank(op.expression)) {
                emit(Code::OpEmptyExpr, id, ref.str(), "operation '" + op.id + "' has an empty expression");
            }
        }
        for (const auto& e : task.dataflow) {
            if (e.src.isOperation() || e.dst.isOperation()) {
                continue;
            }
            if (e.src == e.dst) {
                emit(Code::SelfLoop, id, e.src.str(), "dataflow edge from '" + e.src.str() + "' to itself");
                continue;
            }
            auto st = model::typeOfRef(task, e.src);
            auto dt = model::typeOfRef(task, e.dst);
            if (st && dt && !(*st == *dt)) {
                emit(Code::TypeMismatch, id, e.src.str(),
                     "dataflow '" + e.src.str() + "' -> '" + e.dst.str() + "' connects " + st->name() + " to " +
                         dt->name());
            }
        }
        for (const auto* list : {&task.inputs, &task.outputs}) {
            for (const auto& node : *list) {
                checkReadOnly(task, node);
            }
        }
        checkUpdates(task);
    }

    void checkReadOnly(const model::Task& task, const DataNode& node) {
        bool writes = node.state == DataState::Create || node.state == DataState::Update ||
                      node.state == DataState::Deleted;
        if (!writes || node.kind != DataKind::DataStore) {
            return;
        }
        const auto* table = model_.findTable(node.objectType.table());
        if (node.readOnly) {
            emit(Code::ReadonlyWrite, task.id, node.name,
                 "read-only data store '" + node.name + "' has write state " + std::string(toString(node.state)));
        } else if (table != nullptr && table->readOnly) {
            emit(Code::ReadonlyWrite, task.id, node.name,
                 "'" + node.name + "' writes (" + std::string(toString(node.state)) + ") to read-only table '" +
                     table->name + "'");
        }
    }

    void checkUpdates(const model::Task& task) {
        for (const auto& node : task.outputs) {
            if (node.kind != DataKind::DataStore || node.state != DataState::Update) {
                continue;
            }
            for (const auto& e : task.dataflow) {
                if (!e.src.isOperation() || e.dst.isOperation() || e.dst.name != node.name) {
                    continue;
                }
                const auto* op = task.findOperation(e.src.name);
                if (op == nullptr || !encoder::isGherkin(op->expression)) {
                    continue;
                }
                lang::ConditionalUpdate update;
                lang::EffectContext permissive;
                permissive.updatableTables.emplace();
                try {
                    update = encoder::gherkinToUpdate(op->expression, node.objectType.table(), permissive);
                } catch (const Error&) {
                    // Malformed scenarios are reported by the encoder.
                    continue;
                }
                try {
                    lang::checkSingleTable(update, encoder::effectContext(model_, task));
                } catch (const StaticViolation& v) {
                    emit(Code::ForeignTableInUpdate, task.id, e.src.str(), v.what());
                }
            }
        }
    }
};

}  // namespace

std::vector<Diagnostic> validate(const model::ProcessModel& model) { return Checker(model).run(); }

bool isValid(const model::ProcessModel& model) { return validate(model).empty(); }

std::string formatText(const std::vector<Diagnostic>& diagnostics) {
    std::string out;
    for (const auto& d : diagnostics) {
        out += std::string(toString(d.code)) + " task=" + (d.taskId.empty() ? "-" : d.taskId) + " at=" + d.subject +
               ": " + d.message + "\n";
    }
    return out;
}

std::string formatStructured(const std::vector<Diagnostic>& diagnostics) {
    nlohmann::json doc;
    doc["valid"] = diagnostics.empty();
    doc["diagnostics"] = nlohmann::json::array();
    for (const auto& d : diagnostics) {
        doc["diagnostics"].push_back({{"code", toString(d.code)},
                                      {"task", d.taskId},
                                      {"at", d.subject},
                                      {"message", d.message}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace prox::validator
