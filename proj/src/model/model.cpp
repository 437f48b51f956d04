#include "prox/model/model.hpp"

#include <algorithm>
#include <cctype>

namespace prox::model {

std::string SemanticType::name() const {
    return isPrimitive() ? std::string(toString(primitiveType())) : table();
}

std::string_view toString(DataKind kind) {
    switch (kind) {
    case DataKind::DataObject: return "data_object";
    case DataKind::DataStore: return "data_store";
    case DataKind::UserData: return "user_data";
    case DataKind::SystemData: return "system_data";
    }
    return "?";
}

std::string_view toString(DataState state) {
    switch (state) {
    case DataState::Read: return "read";
    case DataState::Create: return "create";
    case DataState::Update: return "update";
    case DataState::Deleted: return "deleted";
    case DataState::None: return "none";
    }
    return "?";
}

std::optional<DataKind> dataKindFromString(std::string_view text) {
    for (auto kind : {DataKind::DataObject, DataKind::DataStore, DataKind::UserData, DataKind::SystemData}) {
        if (toString(kind) == text) {
            return kind;
        }
    }
    return std::nullopt;
}

std::optional<DataState> dataStateFromString(std::string_view text) {
    if (text == "init") {
        return DataState::Create;
    }
    for (auto state : {DataState::Read, DataState::Create, DataState::Update, DataState::Deleted, DataState::None}) {
        if (toString(state) == text) {
            return state;
        }
    }
    return std::nullopt;
}

const Attribute* DataNode::findAttribute(std::string_view attr) const {
    auto it = std::find_if(attributes.begin(), attributes.end(), [&](const Attribute& a) { return a.name == attr; });
    return it == attributes.end() ? nullptr : &*it;
}

std::optional<NodeRef> NodeRef::parse(std::string_view text) {
    auto ident = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
        }) && !std::isdigit(static_cast<unsigned char>(s.front()));
    };
    if (text.starts_with("op:")) {
        std::string_view id = text.substr(3);
        if (!ident(id)) {
            return std::nullopt;
        }
        return NodeRef{Kind::Operation, std::string(id), {}};
    }
    auto dot = text.find('.');
    if (dot == std::string_view::npos) {
        if (!ident(text)) {
            return std::nullopt;
        }
        return NodeRef{Kind::Node, std::string(text), {}};
    }
    std::string_view node = text.substr(0, dot);
    std::string_view attr = text.substr(dot + 1);
    if (!ident(node) || !ident(attr)) {
        return std::nullopt;
    }
    return NodeRef{Kind::Attribute, std::string(node), std::string(attr)};
}

std::string NodeRef::str() const {
    switch (kind) {
    case Kind::Operation: return "op:" + name;
    case Kind::Attribute: return name + "." + attribute;
    case Kind::Node: break;
    }
    return name;
}

const DataNode* Task::findNode(std::string_view name) const {
    for (const auto* list : {&inputs, &outputs}) {
        for (const auto& node : *list) {
            if (node.name == name) {
                return &node;
            }
        }
    }
    return nullptr;
}

const OperationNode* Task::findOperation(std::string_view opId) const {
    auto it = std::find_if(operations.begin(), operations.end(), [&](const OperationNode& op) { return op.id == opId; });
    return it == operations.end() ? nullptr : &*it;
}

const std::vector<Block>& Block::children() const {
    static const std::vector<Block> none;
    return std::visit(
        [](const auto& n) -> const std::vector<Block>& {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Task>) {
                return none;
            } else if constexpr (std::is_same_v<T, Sequence>) {
                return n.children;
            } else {
                return n.branches;
            }
        },
        node);
}

std::vector<std::string> TableSchema::attributeNames() const {
    std::vector<std::string> names;
    names.reserve(attributes.size());
    for (const auto& a : attributes) {
        names.push_back(a.name);
    }
    return names;
}

const Attribute* TableSchema::findAttribute(std::string_view attr) const {
    auto it = std::find_if(attributes.begin(), attributes.end(), [&](const Attribute& a) { return a.name == attr; });
    return it == attributes.end() ? nullptr : &*it;
}

const TableSchema* ProcessModel::findTable(std::string_view table) const {
    auto it = std::find_if(tables.begin(), tables.end(), [&](const TableSchema& t) { return t.name == table; });
    return it == tables.end() ? nullptr : &*it;
}

namespace {

void collectTasks(const Block& block, std::vector<const Task*>& out) {
    if (const auto* task = std::get_if<Task>(&block.node)) {
        out.push_back(task);
        return;
    }
    for (const auto& child : block.children()) {
        collectTasks(child, out);
    }
}

std::vector<NodeOccurrence> nodesOfKind(const ProcessModel& model, DataKind kind) {
    std::vector<NodeOccurrence> out;
    for (const auto* task : tasks(model)) {
        for (const auto* list : {&task->inputs, &task->outputs}) {
            for (const auto& node : *list) {
                if (node.kind == kind) {
                    out.push_back(NodeOccurrence{task->id, node});
                }
            }
        }
    }
    return out;
}

}  // namespace

std::vector<const Task*> tasks(const ProcessModel& model) {
    std::vector<const Task*> out;
    collectTasks(model.root, out);
    return out;
}

const Task* findTask(const ProcessModel& model, std::string_view id) {
    for (const auto* task : tasks(model)) {
        if (task->id == id) {
            return task;
        }
    }
    return nullptr;
}

std::vector<NodeOccurrence> derivePersistentSet(const ProcessModel& model) {
    return nodesOfKind(model, DataKind::DataStore);
}

std::vector<NodeOccurrence> deriveVolatileSet(const ProcessModel& model) {
    return nodesOfKind(model, DataKind::DataObject);
}

std::string valueName(const DataNode& node, const Attribute* attr) {
    return attr == nullptr ? node.name : node.name + "." + attr->name;
}

std::map<std::string, PrimitiveType> processVariables(const ProcessModel& model) {
    std::map<std::string, PrimitiveType> vars;
    for (const auto& v : model.variables) {
        vars.emplace(v.name, v.type);
    }
    for (const auto* task : tasks(model)) {
        for (const auto* list : {&task->inputs, &task->outputs}) {
            for (const auto& node : *list) {
                bool variable = node.kind == DataKind::DataObject ||
                                (node.kind == DataKind::SystemData && node.direction == Direction::Output);
                if (!variable) {
                    continue;
                }
                if (node.attributes.empty()) {
                    if (node.objectType.isPrimitive()) {
                        vars.emplace(node.name, node.objectType.primitiveType());
                    }
                    continue;
                }
                for (const auto& a : node.attributes) {
                    if (a.type.isPrimitive()) {
                        vars.emplace(valueName(node, &a), a.type.primitiveType());
                    }
                }
            }
        }
    }
    return vars;
}

std::optional<SemanticType> typeOfRef(const Task& task, const NodeRef& ref) {
    if (ref.isOperation()) {
        return std::nullopt;
    }
    const DataNode* node = task.findNode(ref.name);
    if (node == nullptr) {
        return std::nullopt;
    }
    if (ref.kind == NodeRef::Kind::Node) {
        return node->objectType;
    }
    const Attribute* attr = node->findAttribute(ref.attribute);
    if (attr == nullptr) {
        return std::nullopt;
    }
    return attr->type;
}

}  // namespace prox::model
