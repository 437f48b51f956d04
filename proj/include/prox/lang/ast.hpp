#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "prox/value.hpp"

namespace prox::lang {

/// Owning, deep-copying pointer for recursive value types.
template <class T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
    Box(const Box& other) : ptr_(std::make_unique<T>(*other)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other) {
            ptr_ = std::make_unique<T>(*other);
        }
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;

    const T& operator*() const { return *ptr_; }
    const T* operator->() const { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a == *b; }

private:
    std::unique_ptr<T> ptr_;
};

// ---- terms ---------------------------------------------------------------

enum class ArithOp { Add, Sub, Mul, Div };

struct Term;

struct Constant {
    Value value;
    bool operator==(const Constant&) const = default;
};

/// Unqualified name: a process variable, user input, or (inside queries and
/// updates) an attribute of the relation in scope.
struct Variable {
    std::string name;
    bool operator==(const Variable&) const = default;
};

/// `relation.attribute`; also used for attributes of record-valued nodes.
struct AttributeRef {
    std::string relation;
    std::string attribute;
    bool operator==(const AttributeRef&) const = default;
    std::string key() const { return relation.empty() ? attribute : relation + "." + attribute; }
};

struct Arith {
    ArithOp op;
    Box<Term> lhs;
    Box<Term> rhs;
    bool operator==(const Arith&) const = default;
};

struct Term {
    std::variant<Constant, Variable, AttributeRef, Arith> node;
    bool operator==(const Term&) const = default;
};

Term constant(Value value);
Term variable(std::string name);
Term attribute(std::string relation, std::string attr);
Term arith(ArithOp op, Term lhs, Term rhs);

// ---- conditions ----------------------------------------------------------

enum class CompareOp { Eq, Neq, Gt, Lt, Le, Ge };

struct Atom {
    Term lhs;
    CompareOp op;
    Term rhs;
    bool operator==(const Atom&) const = default;
};

struct ConditionExpr;

/// Holds at least two operands when produced by the parser or by the
/// helpers below.
struct Conjunction {
    std::vector<ConditionExpr> operands;
    bool operator==(const Conjunction&) const;
};

/// Only ever produced by complement() or the full (non-surface) syntax.
struct Disjunction {
    std::vector<ConditionExpr> operands;
    bool operator==(const Disjunction&) const;
};

struct TrueConst {
    bool operator==(const TrueConst&) const = default;
};
struct FalseConst {
    bool operator==(const FalseConst&) const = default;
};

struct ConditionExpr {
    std::variant<Atom, Conjunction, Disjunction, TrueConst, FalseConst> node;
    bool operator==(const ConditionExpr&) const = default;
};

inline bool Conjunction::operator==(const Conjunction& other) const { return operands == other.operands; }
inline bool Disjunction::operator==(const Disjunction& other) const { return operands == other.operands; }

ConditionExpr atom(Term lhs, CompareOp op, Term rhs);
ConditionExpr trueConst();
ConditionExpr falseConst();
/// Conjunction of the operands; a single operand is returned unwrapped and
/// an empty list yields TRUE.
ConditionExpr conjunction(std::vector<ConditionExpr> operands);
ConditionExpr disjunction(std::vector<ConditionExpr> operands);

// ---- filters and queries --------------------------------------------------

/// TUPLE(t1, ..., tk) IN relation.(a1, ..., ak)
struct TupleIn {
    std::vector<Term> terms;
    std::string relation;
    std::vector<std::string> attributes;
    bool operator==(const TupleIn&) const = default;
};

using FilterItem = std::variant<ConditionExpr, TupleIn>;

/// Conjunction of filter items. The parser never emits two adjacent
/// condition items (they merge into one condition).
struct FilterExpr {
    std::vector<FilterItem> conjuncts;
    bool operator==(const FilterExpr&) const = default;
};

FilterExpr trueFilter();
bool isTrivial(const FilterExpr& filter);

struct QueryExpr {
    std::vector<AttributeRef> select;
    std::vector<std::string> from;
    FilterExpr where = trueFilter();
    bool operator==(const QueryExpr&) const = default;
};

// ---- effects --------------------------------------------------------------

struct Assign {
    std::string variable;
    Term value;
    bool operator==(const Assign&) const = default;
};

struct Insert {
    std::vector<Term> values;
    std::string table;
    bool operator==(const Insert&) const = default;
};

struct Delete {
    ConditionExpr keyFilter;
    std::string table;
    bool operator==(const Delete&) const = default;
};

struct SetItem {
    std::string attribute;
    std::string placeholder;  // without the leading '@'
    bool operator==(const SetItem&) const = default;
};

struct PlaceholderAssignment {
    std::string placeholder;
    Term value;
    bool operator==(const PlaceholderAssignment&) const = default;
};

struct UpdateBranch {
    FilterExpr when;
    std::vector<PlaceholderAssignment> then;
    bool operator==(const UpdateBranch&) const = default;
};

struct ConditionalUpdate {
    std::string table;
    std::vector<SetItem> set;
    std::vector<UpdateBranch> branches;
    std::vector<PlaceholderAssignment> otherwise;
    bool operator==(const ConditionalUpdate&) const = default;
};

using EffectStmt = std::variant<Assign, Insert, Delete, ConditionalUpdate>;

}  // namespace prox::lang
