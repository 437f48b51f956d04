#include "prox/model/io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "prox/error.hpp"
#include "prox/lang/eval.hpp"
#include "prox/lang/parser.hpp"
#include "prox/lang/printer.hpp"
#include "prox/lang/types.hpp"

namespace prox::model {

namespace {

[[noreturn]] void fail(const YAML::Node& at, const std::string& message) {
    auto mark = at.Mark();
    throw ParseError(mark.line >= 0 ? mark.line + 1 : 1, mark.column >= 0 ? mark.column + 1 : 1, message);
}

bool isIdentifier(std::string_view s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front()))) {
        return false;
    }
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

void checkKeys(const YAML::Node& map, std::initializer_list<std::string_view> allowed, const std::string& what) {
    if (!map.IsMap()) {
        fail(map, what + " must be a mapping");
    }
    for (const auto& entry : map) {
        const std::string& key = entry.first.Scalar();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail(entry.first, "unknown key '" + key + "' in " + what);
        }
    }
}

YAML::Node required(const YAML::Node& map, const char* key, const std::string& what) {
    YAML::Node n = map[key];
    if (!n) {
        fail(map, "missing '" + std::string(key) + "' in " + what);
    }
    return n;
}

std::string scalar(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) {
        fail(n, what + " must be a scalar");
    }
    return n.Scalar();
}

std::string identifier(const YAML::Node& n, const std::string& what) {
    std::string s = scalar(n, what);
    if (!isIdentifier(s)) {
        fail(n, what + " '" + s + "' is not an identifier");
    }
    return s;
}

bool flag(const YAML::Node& map, const char* key) {
    YAML::Node n = map[key];
    if (!n) {
        return false;
    }
    bool value = false;
    if (!n.IsScalar() || !YAML::convert<bool>::decode(n, value)) {
        fail(n, "'" + std::string(key) + "' must be true or false");
    }
    return value;
}

const YAML::Node& sequence(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence()) {
        fail(n, what + " must be a list");
    }
    return n;
}

class Loader {
public:
    ProcessModel load(const YAML::Node& doc) {
        if (!doc.IsMap()) {
            fail(doc, "model document must be a mapping with 'process' and 'root'");
        }
        checkKeys(doc, {"process", "tables", "variables", "root"}, "model");
        ProcessModel model;
        model.name = identifier(required(doc, "process", "model"), "process name");
        if (YAML::Node tables = doc["tables"]) {
            for (const auto& t : sequence(tables, "tables")) {
                model.tables.push_back(loadTable(t));
            }
        }
        tables_ = &model.tables;
        if (YAML::Node vars = doc["variables"]) {
            for (const auto& v : sequence(vars, "variables")) {
                loadVariable(v, model);
            }
        }
        model.root = loadBlock(required(doc, "root", "model"));
        checkVariables(model);
        checkGuards(model, model.root);
        return model;
    }

private:
    const std::vector<TableSchema>* tables_ = nullptr;
    std::set<std::string> taskIds_;

    const TableSchema* findTable(std::string_view name) const {
        for (const auto& t : *tables_) {
            if (t.name == name) {
                return &t;
            }
        }
        return nullptr;
    }

    static std::pair<std::string, std::string> splitTyped(const YAML::Node& n, const std::string& what) {
        std::string s = scalar(n, what);
        auto colon = s.find(':');
        if (colon == std::string::npos) {
            fail(n, what + " '" + s + "' must be written name:type");
        }
        std::string name = s.substr(0, colon);
        std::string type = s.substr(colon + 1);
        if (!isIdentifier(name) || !isIdentifier(type)) {
            fail(n, what + " '" + s + "' must be written name:type");
        }
        return {name, type};
    }

    static std::vector<Attribute> loadAttributes(const YAML::Node& list, const std::string& owner) {
        std::vector<Attribute> attrs;
        for (const auto& a : sequence(list, "attrs of " + owner)) {
            auto [name, type] = splitTyped(a, "attribute");
            auto primitive = primitiveFromString(type);
            if (!primitive) {
                fail(a, "attribute '" + name + "' of " + owner + " must have a primitive type, got '" + type + "'");
            }
            bool duplicate = std::any_of(attrs.begin(), attrs.end(), [&](const Attribute& x) { return x.name == name; });
            if (duplicate) {
                fail(a, "duplicate attribute '" + name + "' in " + owner);
            }
            attrs.push_back(Attribute{name, SemanticType::primitive(*primitive)});
        }
        return attrs;
    }

    TableSchema loadTable(const YAML::Node& n) const {
        checkKeys(n, {"name", "attrs", "readOnly"}, "table");
        TableSchema table;
        YAML::Node nameNode = required(n, "name", "table");
        table.name = identifier(nameNode, "table name");
        if (tables_ != nullptr && findTable(table.name) != nullptr) {
            fail(nameNode, "duplicate table '" + table.name + "'");
        }
        table.attributes = loadAttributes(required(n, "attrs", "table " + table.name), "table " + table.name);
        table.readOnly = flag(n, "readOnly");
        return table;
    }

    void loadVariable(const YAML::Node& n, ProcessModel& model) const {
        auto [name, type] = splitTyped(n, "variable");
        auto primitive = primitiveFromString(type);
        if (!primitive) {
            fail(n, "variable '" + name + "' must have a primitive type, got '" + type + "'");
        }
        for (const auto& v : model.variables) {
            if (v.name == name) {
                fail(n, "duplicate variable '" + name + "'");
            }
        }
        if (model.findTable(name) != nullptr) {
            fail(n, "variable '" + name + "' clashes with a table of the same name");
        }
        model.variables.push_back(VariableDecl{name, *primitive});
    }

    Block loadBlock(const YAML::Node& n) {
        if (!n.IsMap() || n.size() != 1) {
            fail(n, "block must be a mapping with exactly one of task, sequence, exclusive, deferred, parallel");
        }
        auto entry = *n.begin();
        const std::string& kind = entry.first.Scalar();
        const YAML::Node& body = entry.second;
        if (kind == "task") {
            return Block{loadTask(body)};
        }
        if (kind == "sequence") {
            Sequence seq;
            for (const auto& child : sequence(body, "sequence")) {
                seq.children.push_back(loadBlock(child));
            }
            if (seq.children.empty()) {
                fail(body, "sequence must have at least one child");
            }
            return Block{std::move(seq)};
        }
        if (kind == "exclusive") {
            checkKeys(body, {"guard", "then", "else"}, "exclusive");
            YAML::Node guardNode = required(body, "guard", "exclusive");
            ExclusiveChoice choice;
            try {
                choice.guard = lang::parseCondition(scalar(guardNode, "guard"));
            } catch (const ParseError& e) {
                fail(guardNode, "guard: " + std::string(e.what()));
            }
            choice.branches.push_back(loadBlock(required(body, "then", "exclusive")));
            choice.branches.push_back(loadBlock(required(body, "else", "exclusive")));
            return Block{std::move(choice)};
        }
        if (kind == "deferred" || kind == "parallel") {
            std::vector<Block> branches;
            for (const auto& child : sequence(body, kind)) {
                branches.push_back(loadBlock(child));
            }
            if (branches.size() != 2) {
                fail(body, kind + " must have exactly two branches, got " + std::to_string(branches.size()));
            }
            if (kind == "deferred") {
                return Block{DeferredChoice{std::move(branches)}};
            }
            return Block{Parallel{std::move(branches)}};
        }
        fail(entry.first, "unknown block kind '" + kind + "'");
    }

    DataNode loadNode(const YAML::Node& n, Direction direction, const std::string& taskId) const {
        checkKeys(n, {"name", "type", "kind", "attrs", "multi", "readOnly", "state"}, "data node");
        DataNode node;
        node.direction = direction;
        node.name = identifier(required(n, "name", "data node"), "data node name");
        std::string where = "node '" + node.name + "' of task '" + taskId + "'";

        YAML::Node kindNode = required(n, "kind", where);
        auto kind = dataKindFromString(scalar(kindNode, "kind"));
        if (!kind) {
            fail(kindNode, "unknown data kind '" + kindNode.Scalar() + "'");
        }
        node.kind = *kind;

        YAML::Node typeNode = required(n, "type", where);
        std::string type = identifier(typeNode, "type");
        if (auto primitive = primitiveFromString(type)) {
            node.objectType = SemanticType::primitive(*primitive);
        } else {
            node.objectType = SemanticType::domain(type);
        }

        if (YAML::Node attrs = n["attrs"]) {
            node.attributes = loadAttributes(attrs, where);
        }
        node.multi = flag(n, "multi");
        node.readOnly = flag(n, "readOnly");
        if (YAML::Node stateNode = n["state"]) {
            auto state = dataStateFromString(scalar(stateNode, "state"));
            if (!state) {
                fail(stateNode, "unknown state '" + stateNode.Scalar() + "'");
            }
            node.state = *state;
            if (direction == Direction::Input && node.state != DataState::Read && node.state != DataState::None) {
                fail(stateNode, "input " + where + " must have state read or none");
            }
        }

        if (node.readOnly && node.kind != DataKind::DataStore) {
            fail(n["readOnly"], "readOnly is only allowed on data_store nodes (" + where + ")");
        }
        if (node.kind == DataKind::DataStore && node.objectType.isPrimitive()) {
            fail(typeNode, "data_store " + where + " must have a table as its type");
        }
        if (!node.objectType.isPrimitive()) {
            const TableSchema* table = findTable(node.objectType.table());
            if (table == nullptr) {
                throw ResolutionError(where + " refers to undeclared table '" + node.objectType.table() + "'");
            }
            for (const auto& a : node.attributes) {
                const Attribute* column = table->findAttribute(a.name);
                if (column == nullptr) {
                    throw ResolutionError(where + ": table '" + table->name + "' has no attribute '" + a.name + "'");
                }
                if (!(column->type == a.type)) {
                    throw ResolutionError(where + ": attribute '" + a.name + "' is " + a.type.name() + " but " +
                                          table->name + "." + a.name + " is " + column->type.name());
                }
            }
        }
        return node;
    }

    Task loadTask(const YAML::Node& n) {
        checkKeys(n, {"id", "inputs", "outputs", "operations", "dataflow"}, "task");
        Task task;
        YAML::Node idNode = required(n, "id", "task");
        task.id = identifier(idNode, "task id");
        if (!taskIds_.insert(task.id).second) {
            fail(idNode, "duplicate task id '" + task.id + "'");
        }
        std::set<std::string> names;
        auto claim = [&](const YAML::Node& at, const std::string& name) {
            if (!names.insert(name).second) {
                fail(at, "duplicate name '" + name + "' in task '" + task.id + "'");
            }
        };
        if (YAML::Node inputs = n["inputs"]) {
            for (const auto& d : sequence(inputs, "inputs")) {
                task.inputs.push_back(loadNode(d, Direction::Input, task.id));
                claim(d, task.inputs.back().name);
            }
        }
        if (YAML::Node outputs = n["outputs"]) {
            for (const auto& d : sequence(outputs, "outputs")) {
                task.outputs.push_back(loadNode(d, Direction::Output, task.id));
                claim(d, task.outputs.back().name);
            }
        }
        if (YAML::Node ops = n["operations"]) {
            for (const auto& o : sequence(ops, "operations")) {
                checkKeys(o, {"id", "expression"}, "operation");
                OperationNode op;
                op.id = identifier(required(o, "id", "operation"), "operation id");
                YAML::Node expr = o["expression"];
                if (expr && !expr.IsNull()) {
                    op.expression = scalar(expr, "expression");
                }
                claim(o, op.id);
                task.operations.push_back(std::move(op));
            }
        }
        if (YAML::Node flow = n["dataflow"]) {
            for (const auto& e : sequence(flow, "dataflow")) {
                if (!e.IsSequence() || e.size() != 2) {
                    fail(e, "dataflow edge must be a pair [src, dst]");
                }
                DataflowEdge edge{resolveRef(task, e[0]), resolveRef(task, e[1])};
                task.dataflow.push_back(std::move(edge));
            }
        }
        return task;
    }

    static NodeRef resolveRef(const Task& task, const YAML::Node& n) {
        std::string text = scalar(n, "dataflow endpoint");
        auto ref = NodeRef::parse(text);
        if (!ref) {
            fail(n, "malformed dataflow endpoint '" + text + "'");
        }
        std::string where = " in task '" + task.id + "'";
        if (ref->isOperation()) {
            if (task.findOperation(ref->name) == nullptr) {
                throw ResolutionError("dangling reference '" + text + "'" + where);
            }
            return *ref;
        }
        const DataNode* node = task.findNode(ref->name);
        if (node == nullptr) {
            throw ResolutionError("dangling reference '" + text + "'" + where);
        }
        if (ref->kind == NodeRef::Kind::Attribute && node->findAttribute(ref->attribute) == nullptr) {
            throw ResolutionError("dangling reference '" + text + "'" + where + ": node '" + node->name +
                                  "' has no attribute '" + ref->attribute + "'");
        }
        return *ref;
    }

    static void checkVariables(const ProcessModel& model) {
        std::map<std::string, PrimitiveType> seen;
        for (const auto& v : model.variables) {
            seen.emplace(v.name, v.type);
        }
        for (const auto* task : tasks(model)) {
            for (const auto* list : {&task->inputs, &task->outputs}) {
                for (const auto& node : *list) {
                    bool variable = node.kind == DataKind::DataObject ||
                                    (node.kind == DataKind::SystemData && node.direction == Direction::Output);
                    if (!variable) {
                        continue;
                    }
                    auto record = [&](const std::string& name, const SemanticType& type) {
                        if (!type.isPrimitive()) {
                            return;
                        }
                        if (model.findTable(name) != nullptr) {
                            throw ResolutionError("variable '" + name + "' clashes with a table of the same name");
                        }
                        auto [it, fresh] = seen.emplace(name, type.primitiveType());
                        if (!fresh && it->second != type.primitiveType()) {
                            throw ResolutionError("variable '" + name + "' is used as " +
                                                  std::string(toString(it->second)) + " and as " + type.name() +
                                                  " (task '" + task->id + "')");
                        }
                    };
                    if (node.attributes.empty()) {
                        record(node.name, node.objectType);
                    }
                    for (const auto& a : node.attributes) {
                        record(valueName(node, &a), a.type);
                    }
                }
            }
        }
    }

    static void checkGuards(const ProcessModel& model, const Block& block) {
        if (const auto* choice = std::get_if<ExclusiveChoice>(&block.node)) {
            auto vars = processVariables(model);
            for (const auto& name : lang::freeNames(choice->guard)) {
                if (!vars.contains(name)) {
                    throw ResolutionError("guard '" + lang::toString(choice->guard) + "' refers to unknown variable '" +
                                          name + "'");
                }
            }
            lang::typecheck(choice->guard, [&](std::string_view key) -> std::optional<PrimitiveType> {
                auto it = vars.find(std::string(key));
                return it == vars.end() ? std::nullopt : std::optional<PrimitiveType>(it->second);
            });
        }
        for (const auto& child : block.children()) {
            checkGuards(model, child);
        }
    }
};

// ---- saving ---------------------------------------------------------------

void emitAttributes(YAML::Emitter& out, const std::vector<Attribute>& attrs) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const auto& a : attrs) {
        out << a.name + ":" + a.type.name();
    }
    out << YAML::EndSeq;
}

void emitNode(YAML::Emitter& out, const DataNode& node) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << node.name;
    out << YAML::Key << "type" << YAML::Value << node.objectType.name();
    out << YAML::Key << "kind" << YAML::Value << std::string(toString(node.kind));
    if (!node.attributes.empty()) {
        out << YAML::Key << "attrs" << YAML::Value;
        emitAttributes(out, node.attributes);
    }
    if (node.multi) {
        out << YAML::Key << "multi" << YAML::Value << true;
    }
    if (node.readOnly) {
        out << YAML::Key << "readOnly" << YAML::Value << true;
    }
    if (node.state != DataState::None) {
        out << YAML::Key << "state" << YAML::Value << std::string(toString(node.state));
    }
    out << YAML::EndMap;
}

void emitBlock(YAML::Emitter& out, const Block& block) {
    out << YAML::BeginMap;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Task>) {
                out << YAML::Key << "task" << YAML::Value << YAML::BeginMap;
                out << YAML::Key << "id" << YAML::Value << n.id;
                for (auto [key, list] : {std::pair{"inputs", &n.inputs}, std::pair{"outputs", &n.outputs}}) {
                    if (list->empty()) {
                        continue;
                    }
                    out << YAML::Key << key << YAML::Value << YAML::BeginSeq;
                    for (const auto& node : *list) {
                        emitNode(out, node);
                    }
                    out << YAML::EndSeq;
                }
                if (!n.operations.empty()) {
                    out << YAML::Key << "operations" << YAML::Value << YAML::BeginSeq;
                    for (const auto& op : n.operations) {
                        out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << op.id;
                        out << YAML::Key << "expression" << YAML::Value << YAML::DoubleQuoted << op.expression;
                        out << YAML::EndMap;
                    }
                    out << YAML::EndSeq;
                }
                if (!n.dataflow.empty()) {
                    out << YAML::Key << "dataflow" << YAML::Value << YAML::BeginSeq;
                    for (const auto& e : n.dataflow) {
                        out << YAML::Flow << YAML::BeginSeq << e.src.str() << e.dst.str() << YAML::EndSeq;
                    }
                    out << YAML::EndSeq;
                }
                out << YAML::EndMap;
            } else if constexpr (std::is_same_v<T, Sequence>) {
                out << YAML::Key << "sequence" << YAML::Value << YAML::BeginSeq;
                for (const auto& child : n.children) {
                    emitBlock(out, child);
                }
                out << YAML::EndSeq;
            } else if constexpr (std::is_same_v<T, ExclusiveChoice>) {
                out << YAML::Key << "exclusive" << YAML::Value << YAML::BeginMap;
                out << YAML::Key << "guard" << YAML::Value << YAML::DoubleQuoted << lang::toString(n.guard);
                out << YAML::Key << "then" << YAML::Value;
                emitBlock(out, n.branches[0]);
                out << YAML::Key << "else" << YAML::Value;
                emitBlock(out, n.branches[1]);
                out << YAML::EndMap;
            } else {
                out << YAML::Key << (std::is_same_v<T, DeferredChoice> ? "deferred" : "parallel") << YAML::Value
                    << YAML::BeginSeq;
                for (const auto& child : n.branches) {
                    emitBlock(out, child);
                }
                out << YAML::EndSeq;
            }
        },
        block.node);
    out << YAML::EndMap;
}

}  // namespace

ProcessModel loadModel(std::string_view text) {
    YAML::Node doc;
    try {
        doc = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.mark.line + 1, e.mark.column + 1, e.msg);
    }
    if (!doc || doc.IsNull()) {
        throw ParseError(1, 1, "empty model document: 'process' and 'root' are required");
    }
    return Loader{}.load(doc);
}

ProcessModel loadModelFile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open model file '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return loadModel(buffer.str());
}

std::string saveModel(const ProcessModel& model) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "process" << YAML::Value << model.name;
    if (!model.tables.empty()) {
        out << YAML::Key << "tables" << YAML::Value << YAML::BeginSeq;
        for (const auto& t : model.tables) {
            out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << t.name;
            out << YAML::Key << "attrs" << YAML::Value;
            emitAttributes(out, t.attributes);
            if (t.readOnly) {
                out << YAML::Key << "readOnly" << YAML::Value << true;
            }
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    if (!model.variables.empty()) {
        out << YAML::Key << "variables" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const auto& v : model.variables) {
            out << v.name + ":" + std::string(toString(v.type));
        }
        out << YAML::EndSeq;
    }
    out << YAML::Key << "root" << YAML::Value;
    emitBlock(out, model.root);
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace prox::model
