#include "prox/encoder/encoder.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <set>

#include "prox/error.hpp"
#include "prox/lang/printer.hpp"
#include "prox/validator/validator.hpp"

namespace prox::encoder {

using model::DataKind;
using model::DataNode;
using model::DataState;
using model::NodeRef;

namespace {

bool isReadStore(const DataNode& node) { return node.kind == DataKind::DataStore && node.state == DataState::Read; }

class TaskEncoder {
public:
    TaskEncoder(const model::ProcessModel& model, const model::Task& task)
        : model_(model), task_(task), variables_(model::processVariables(model)) {}

    LeafEncoding encode() {
        LeafEncoding leaf;
        leaf.taskId = task_.id;
        leaf.precondition = precondition();
        leaf.userInputs = userInputs();
        assignments(leaf.effect);
        inserts(leaf.effect);
        updates(leaf.effect);
        deletes(leaf.effect);
        lang::checkEffect(leaf.effect, effectContext(model_, task_));
        return leaf;
    }

private:
    const model::ProcessModel& model_;
    const model::Task& task_;
    std::map<std::string, PrimitiveType> variables_;

    [[noreturn]] void fail(const std::string& message) const {
        throw EncodingError("task '" + task_.id + "': " + message);
    }

    std::vector<const DataNode*> readStores() const {
        std::vector<const DataNode*> out;
        std::set<std::string> tables;
        for (const auto* list : {&task_.inputs, &task_.outputs}) {
            for (const auto& node : *list) {
                if (!isReadStore(node)) {
                    continue;
                }
                if (!tables.insert(node.objectType.table()).second) {
                    fail("table '" + node.objectType.table() + "' is read by more than one node");
                }
                out.push_back(&node);
            }
        }
        return out;
    }

    std::vector<const model::DataflowEdge*> incoming(const NodeRef& dst) const {
        std::vector<const model::DataflowEdge*> out;
        for (const auto& e : task_.dataflow) {
            if (e.dst == dst) {
                out.push_back(&e);
            }
        }
        return out;
    }

    static NodeRef nodeRef(const DataNode& node) { return NodeRef{NodeRef::Kind::Node, node.name, {}}; }
    static NodeRef attrRef(const DataNode& node, const std::string& attr) {
        return NodeRef{NodeRef::Kind::Attribute, node.name, attr};
    }

    /// The term a dataflow source stands for inside this task's encoding.
    lang::Term sourceTerm(const NodeRef& ref) const {
        if (ref.isOperation()) {
            const auto* op = task_.findOperation(ref.name);
            if (isGherkin(op->expression)) {
                fail("scenario operation '" + op->id + "' can only feed an update-state data store");
            }
            lang::Term parsed;
            try {
                parsed = lang::parseTerm(op->expression);
            } catch (const ParseError& e) {
                fail("operation '" + op->id + "': " + e.what());
            }
            return rename(parsed, *op);
        }
        const DataNode& node = *task_.findNode(ref.name);
        if (node.kind == DataKind::DataStore) {
            if (!isReadStore(node)) {
                fail("'" + ref.str() + "' is not readable: only read-state data stores are sources");
            }
            if (ref.kind != NodeRef::Kind::Attribute) {
                fail("data store '" + node.name + "' can only be read attribute by attribute");
            }
            return lang::attribute(node.objectType.table(), ref.attribute);
        }
        if (ref.kind == NodeRef::Kind::Attribute) {
            return lang::attribute(node.name, ref.attribute);
        }
        if (!node.attributes.empty()) {
            fail("'" + node.name + "' has attributes; connect them individually");
        }
        return lang::variable(node.name);
    }

    /// Rewrites names in an operation expression: task node names become
    /// their source terms, read tables and process variables stay.
    lang::Term rename(const lang::Term& term, const model::OperationNode& op) const {
        return std::visit(
            [&](const auto& n) -> lang::Term {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, lang::Constant>) {
                    return lang::Term{n};
                } else if constexpr (std::is_same_v<T, lang::Variable>) {
                    if (const DataNode* node = task_.findNode(n.name); node != nullptr) {
                        return sourceTerm(nodeRef(*node));
                    }
                    if (variables_.contains(n.name)) {
                        return lang::Term{n};
                    }
                    fail("operation '" + op.id + "' refers to unknown name '" + n.name + "'");
                } else if constexpr (std::is_same_v<T, lang::AttributeRef>) {
                    if (const DataNode* node = task_.findNode(n.relation); node != nullptr) {
                        if (node->findAttribute(n.attribute) == nullptr) {
                            fail("operation '" + op.id + "' refers to unknown attribute '" + n.key() + "'");
                        }
                        return sourceTerm(attrRef(*node, n.attribute));
                    }
                    for (const auto* store : readStores()) {
                        if (store->objectType.table() == n.relation) {
                            return lang::Term{n};
                        }
                    }
                    if (variables_.contains(n.key())) {
                        return lang::Term{n};
                    }
                    fail("operation '" + op.id + "' refers to unknown name '" + n.key() + "'");
                } else {
                    return lang::arith(n.op, rename(*n.lhs, op), rename(*n.rhs, op));
                }
            },
            term.node);
    }

    std::optional<lang::QueryExpr> precondition() const {
        auto stores = readStores();
        if (stores.empty()) {
            return std::nullopt;
        }
        lang::QueryExpr query;
        for (const auto* store : stores) {
            const auto* schema = model_.findTable(store->objectType.table());
            query.from.push_back(schema->name);
            for (const auto& a : schema->attributes) {
                query.select.push_back(lang::AttributeRef{schema->name, a.name});
            }
        }
        std::vector<lang::ConditionExpr> equalities;
        for (const auto& e : task_.dataflow) {
            if (e.dst.kind != NodeRef::Kind::Attribute) {
                continue;
            }
            const DataNode& target = *task_.findNode(e.dst.name);
            if (!isReadStore(target)) {
                continue;
            }
            equalities.push_back(lang::atom(lang::attribute(target.objectType.table(), e.dst.attribute),
                                            lang::CompareOp::Eq, sourceTerm(e.src)));
        }
        if (!equalities.empty()) {
            // One conjunction item, which is also what the parser builds from
            // "a AND b".
            query.where.conjuncts = {lang::conjunction(std::move(equalities))};
        }
        return query;
    }

    std::vector<std::pair<std::string, PrimitiveType>> userInputs() const {
        std::vector<std::pair<std::string, PrimitiveType>> out;
        for (const auto& node : task_.inputs) {
            if (node.kind != DataKind::UserData && node.kind != DataKind::SystemData) {
                continue;
            }
            if (node.attributes.empty()) {
                if (!node.objectType.isPrimitive()) {
                    fail("input '" + node.name + "' has a table type but no attributes");
                }
                out.emplace_back(node.name, node.objectType.primitiveType());
            }
            for (const auto& a : node.attributes) {
                out.emplace_back(model::valueName(node, &a), a.type.primitiveType());
            }
        }
        return out;
    }

    std::optional<lang::Term> singleSource(const NodeRef& dst) const {
        auto edges = incoming(dst);
        if (edges.empty()) {
            return std::nullopt;
        }
        if (edges.size() > 1) {
            fail("'" + dst.str() + "' has " + std::to_string(edges.size()) + " incoming edges; expected one");
        }
        return sourceTerm(edges.front()->src);
    }

    void assignments(std::vector<lang::EffectStmt>& effect) const {
        for (const auto& node : task_.outputs) {
            if (node.kind != DataKind::DataObject && node.kind != DataKind::SystemData) {
                continue;
            }
            if (node.attributes.empty()) {
                if (auto src = singleSource(nodeRef(node))) {
                    effect.emplace_back(lang::Assign{node.name, std::move(*src)});
                }
                continue;
            }
            for (const auto& a : node.attributes) {
                if (auto src = singleSource(attrRef(node, a.name))) {
                    effect.emplace_back(lang::Assign{model::valueName(node, &a), std::move(*src)});
                }
            }
        }
    }

    void inserts(std::vector<lang::EffectStmt>& effect) const {
        for (const auto& node : task_.outputs) {
            if (node.kind != DataKind::DataStore || node.state != DataState::Create) {
                continue;
            }
            const auto* schema = model_.findTable(node.objectType.table());
            lang::Insert insert;
            insert.table = schema->name;
            for (const auto& a : schema->attributes) {
                std::optional<lang::Term> src;
                if (node.findAttribute(a.name) != nullptr) {
                    src = singleSource(attrRef(node, a.name));
                }
                if (!src) {
                    fail("create output '" + node.name + "' has no source for " + schema->name + "." + a.name);
                }
                insert.values.push_back(std::move(*src));
            }
            effect.emplace_back(std::move(insert));
        }
    }

    void updates(std::vector<lang::EffectStmt>& effect) const {
        for (const auto& node : task_.outputs) {
            if (node.kind != DataKind::DataStore || node.state != DataState::Update) {
                continue;
            }
            std::set<std::string> ops;
            for (const auto& e : task_.dataflow) {
                if (e.dst.name != node.name || e.dst.isOperation()) {
                    continue;
                }
                if (!e.src.isOperation()) {
                    fail("update output '" + node.name + "' must be fed by one scenario operation, not by '" +
                         e.src.str() + "'");
                }
                ops.insert(e.src.name);
            }
            if (ops.size() != 1) {
                fail("update output '" + node.name + "' must be fed by exactly one scenario operation");
            }
            const auto* op = task_.findOperation(*ops.begin());
            if (!isGherkin(op->expression)) {
                fail("operation '" + op->id + "' feeds an update but is not a When/Then/Otherwise scenario");
            }
            const auto* schema = model_.findTable(node.objectType.table());
            auto update = gherkinToUpdate(op->expression, schema->name, effectContext(model_, task_));
            for (const auto& item : update.set) {
                if (schema->findAttribute(item.attribute) == nullptr) {
                    fail("operation '" + op->id + "' sets unknown attribute " + schema->name + "." + item.attribute);
                }
            }
            effect.emplace_back(std::move(update));
        }
    }

    void deletes(std::vector<lang::EffectStmt>& effect) const {
        for (const auto& node : task_.outputs) {
            if (node.kind != DataKind::DataStore || node.state != DataState::Deleted) {
                continue;
            }
            std::vector<lang::ConditionExpr> keys;
            for (const auto& a : node.attributes) {
                if (auto src = singleSource(attrRef(node, a.name))) {
                    keys.push_back(lang::atom(lang::variable(a.name), lang::CompareOp::Eq, std::move(*src)));
                }
            }
            if (keys.empty()) {
                fail("deleted output '" + node.name + "' has no key: connect at least one attribute");
            }
            effect.emplace_back(lang::Delete{lang::conjunction(std::move(keys)), node.objectType.table()});
        }
    }
};

}  // namespace

lang::EffectContext effectContext(const model::ProcessModel& model, const model::Task& task) {
    lang::EffectContext ctx;
    ctx.updatableTables.emplace();
    for (const auto& t : model.tables) {
        if (!t.readOnly) {
            ctx.updatableTables->insert(t.name);
        }
    }
    for (const auto* list : {&task.inputs, &task.outputs}) {
        for (const auto& node : *list) {
            if (isReadStore(node)) {
                ctx.readRelations.insert(node.objectType.table());
            }
        }
    }
    return ctx;
}

LeafEncoding encodeTask(const model::ProcessModel& model, std::string_view taskId) {
    const auto* task = model::findTask(model, taskId);
    if (task == nullptr) {
        throw ResolutionError("unknown task '" + std::string(taskId) + "'");
    }
    return TaskEncoder(model, *task).encode();
}

ProcessEncoding encodeProcess(const model::ProcessModel& model) {
    auto diagnostics = validator::validate(model);
    if (!diagnostics.empty()) {
        throw PreconditionNotMet("model '" + model.name + "' has " + std::to_string(diagnostics.size()) +
                                 " validation diagnostic(s); fix them before encoding:\n" +
                                 validator::formatText(diagnostics));
    }
    ProcessEncoding out;
    for (const auto* task : model::tasks(model)) {
        out.emplace(task->id, TaskEncoder(model, *task).encode());
    }
    return out;
}

std::string preconditionText(const LeafEncoding& leaf) {
    return leaf.precondition ? lang::toString(*leaf.precondition) : "TRUE";
}

std::string saveEncoding(const std::string& processName, const ProcessEncoding& encoding) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "process" << YAML::Value << processName;
    out << YAML::Key << "tasks" << YAML::Value << YAML::BeginSeq;
    for (const auto& [id, leaf] : encoding) {
        out << YAML::BeginMap;
        out << YAML::Key << "task" << YAML::Value << id;
        out << YAML::Key << "precondition" << YAML::Value << YAML::DoubleQuoted << preconditionText(leaf);
        out << YAML::Key << "userInputs" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const auto& [name, type] : leaf.userInputs) {
            out << name + ":" + std::string(toString(type));
        }
        out << YAML::EndSeq;
        out << YAML::Key << "effect" << YAML::Value << YAML::BeginSeq;
        for (const auto& stmt : leaf.effect) {
            out << YAML::DoubleQuoted << lang::toString(stmt);
        }
        out << YAML::EndSeq;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

ProcessEncoding loadEncoding(std::string_view document) {
    YAML::Node doc;
    try {
        doc = YAML::Load(std::string(document));
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.mark.line + 1, e.mark.column + 1, e.msg);
    }
    auto fail = [](const YAML::Node& n, const std::string& message) {
        throw ParseError(n.Mark().line + 1, n.Mark().column + 1, message);
    };
    if (!doc.IsMap() || !doc["tasks"] || !doc["tasks"].IsSequence()) {
        fail(doc, "encoded document needs a 'tasks' list");
    }
    ProcessEncoding out;
    for (const auto& entry : doc["tasks"]) {
        if (!entry.IsMap() || !entry["task"] || !entry["precondition"]) {
            fail(entry, "each encoded task needs 'task' and 'precondition'");
        }
        LeafEncoding leaf;
        leaf.taskId = entry["task"].Scalar();
        std::string pre = entry["precondition"].Scalar();
        if (pre != "TRUE") {
            leaf.precondition = lang::parseQuery(pre);
        }
        if (const auto inputs = entry["userInputs"]) {
            for (const auto& input : inputs) {
                const std::string& text = input.Scalar();
                auto colon = text.rfind(':');
                auto type = colon == std::string::npos ? std::nullopt : primitiveFromString(text.substr(colon + 1));
                if (!type) {
                    fail(input, "user input '" + text + "' must be written name:type");
                }
                leaf.userInputs.emplace_back(text.substr(0, colon), *type);
            }
        }
        if (const auto effect = entry["effect"]) {
            // The document carries no schema, so the single-table rule cannot
            // be re-checked here; it was enforced when the encoding was made.
            lang::EffectContext context;
            context.updatableTables.emplace();
            for (const auto& stmt : effect) {
                auto parsed = lang::parseEffect(stmt.Scalar(), context);
                leaf.effect.insert(leaf.effect.end(), parsed.begin(), parsed.end());
            }
        }
        out.emplace(leaf.taskId, std::move(leaf));
    }
    return out;
}

}  // namespace prox::encoder
