#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "prox/lang/ast.hpp"
#include "prox/value.hpp"

namespace prox::model {

/// Object type of a data node or attribute: a primitive, or a semantic
/// domain naming a declared table.
struct SemanticType {
    struct Domain {
        std::string table;
        bool operator==(const Domain&) const = default;
    };

    std::variant<PrimitiveType, Domain> kind = PrimitiveType::String;

    static SemanticType primitive(PrimitiveType type) { return SemanticType{type}; }
    static SemanticType domain(std::string table) { return SemanticType{Domain{std::move(table)}}; }

    bool isPrimitive() const { return std::holds_alternative<PrimitiveType>(kind); }
    PrimitiveType primitiveType() const { return std::get<PrimitiveType>(kind); }
    const std::string& table() const { return std::get<Domain>(kind).table; }
    std::string name() const;

    bool operator==(const SemanticType&) const = default;
};

enum class DataKind { DataObject, DataStore, UserData, SystemData };

enum class DataState { Read, Create, Update, Deleted, None };

enum class Direction { Input, Output };

std::string_view toString(DataKind kind);
std::string_view toString(DataState state);
std::optional<DataKind> dataKindFromString(std::string_view text);
/// Accepts "init" as an alias of create.
std::optional<DataState> dataStateFromString(std::string_view text);

struct Attribute {
    std::string name;
    SemanticType type;
    bool operator==(const Attribute&) const = default;
};

struct DataNode {
    std::string name;
    SemanticType objectType;
    DataKind kind = DataKind::DataObject;
    std::vector<Attribute> attributes;
    bool multi = false;
    bool readOnly = false;
    DataState state = DataState::None;
    Direction direction = Direction::Input;

    const Attribute* findAttribute(std::string_view attr) const;
    bool operator==(const DataNode&) const = default;
};

struct OperationNode {
    std::string id;
    std::string expression;
    bool operator==(const OperationNode&) const = default;
};

/// Dataflow endpoint: `node`, `node.attr` or `op:id`.
struct NodeRef {
    enum class Kind { Node, Attribute, Operation };

    Kind kind = Kind::Node;
    std::string name;       // node name or operation id
    std::string attribute;  // only for Kind::Attribute

    static std::optional<NodeRef> parse(std::string_view text);
    std::string str() const;
    bool isOperation() const { return kind == Kind::Operation; }

    bool operator==(const NodeRef&) const = default;
    auto operator<=>(const NodeRef&) const = default;
};

struct DataflowEdge {
    NodeRef src;
    NodeRef dst;
    bool operator==(const DataflowEdge&) const = default;
};

struct Task {
    std::string id;
    std::vector<DataNode> inputs;
    std::vector<DataNode> outputs;
    std::vector<OperationNode> operations;
    std::vector<DataflowEdge> dataflow;

    const DataNode* findNode(std::string_view name) const;
    const OperationNode* findOperation(std::string_view id) const;
    bool operator==(const Task&) const = default;
};

struct Block;

struct Sequence {
    std::vector<Block> children;
    bool operator==(const Sequence&) const;
};

/// branches[0] runs when the guard holds, branches[1] when its complement
/// holds.
struct ExclusiveChoice {
    lang::ConditionExpr guard;
    std::vector<Block> branches;
    bool operator==(const ExclusiveChoice&) const;
};

struct DeferredChoice {
    std::vector<Block> branches;
    bool operator==(const DeferredChoice&) const;
};

struct Parallel {
    std::vector<Block> branches;
    bool operator==(const Parallel&) const;
};

struct Block {
    std::variant<Task, Sequence, ExclusiveChoice, DeferredChoice, Parallel> node;

    bool isTask() const { return std::holds_alternative<Task>(node); }
    /// Children in order (empty for tasks).
    const std::vector<Block>& children() const;
    bool operator==(const Block&) const = default;
};

inline bool Sequence::operator==(const Sequence& o) const { return children == o.children; }
inline bool ExclusiveChoice::operator==(const ExclusiveChoice& o) const {
    return guard == o.guard && branches == o.branches;
}
inline bool DeferredChoice::operator==(const DeferredChoice& o) const { return branches == o.branches; }
inline bool Parallel::operator==(const Parallel& o) const { return branches == o.branches; }

struct TableSchema {
    std::string name;
    std::vector<Attribute> attributes;
    bool readOnly = false;

    std::vector<std::string> attributeNames() const;
    const Attribute* findAttribute(std::string_view attr) const;
    bool operator==(const TableSchema&) const = default;
};

struct VariableDecl {
    std::string name;
    PrimitiveType type = PrimitiveType::String;
    bool operator==(const VariableDecl&) const = default;
};

struct ProcessModel {
    std::string name;
    std::vector<TableSchema> tables;
    std::vector<VariableDecl> variables;
    Block root;

    const TableSchema* findTable(std::string_view table) const;
    bool operator==(const ProcessModel&) const = default;
};

// ---- queries over a model -------------------------------------------------

/// Tasks in pre-order.
std::vector<const Task*> tasks(const ProcessModel& model);
const Task* findTask(const ProcessModel& model, std::string_view id);

/// A data node together with the task that owns it.
struct NodeOccurrence {
    std::string taskId;
    DataNode node;
    bool operator==(const NodeOccurrence&) const = default;
};

/// Every input/output occurrence with kind data_store.
std::vector<NodeOccurrence> derivePersistentSet(const ProcessModel& model);
/// Every input/output occurrence with kind data_object.
std::vector<NodeOccurrence> deriveVolatileSet(const ProcessModel& model);

/// Runtime name of a node value: `node` for attribute-less nodes, otherwise
/// `node.attr` for each attribute.
std::string valueName(const DataNode& node, const Attribute* attr = nullptr);

/// Process variables: the declared ones plus those implied by data_object
/// nodes and system_data outputs (see valueName). Sorted by name.
std::map<std::string, PrimitiveType> processVariables(const ProcessModel& model);

/// Type of a dataflow endpoint within `task`; nullopt for operation nodes
/// and unresolved references.
std::optional<SemanticType> typeOfRef(const Task& task, const NodeRef& ref);

}  // namespace prox::model
