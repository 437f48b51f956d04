#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prox/lang/ast.hpp"

namespace prox::lang {

/// Names to values. Unqualified names are stored as-is, attribute
/// references as "relation.attribute".
using Binding = std::map<std::string, Value, std::less<>>;

using Row = std::vector<Value>;

/// Read access to relations for queries and TUPLE ... IN filters.
class RelationSource {
public:
    virtual ~RelationSource() = default;
    /// Attribute names of `relation`, or nullptr when it is unknown.
    virtual const std::vector<std::string>* attributes(std::string_view relation) const = 0;
    virtual std::span<const Row> rows(std::string_view relation) const = 0;
};

Value evalTerm(const Term& term, const Binding& binding);

/// Comparison with numeric promotion; ordering on booleans and any mix of
/// string/number/date raises TypeError.
bool compare(const Value& lhs, CompareOp op, const Value& rhs);

bool evalCondition(const ConditionExpr& expr, const Binding& binding);

/// `source` may be null when the filter has no TUPLE ... IN items.
bool evalFilter(const FilterExpr& filter, const Binding& binding, const RelationSource* source);

/// Evaluates a precondition query. Each answer binds the selected
/// attributes under "Relation.attribute". Answers form a set: duplicates are
/// dropped, first-seen order is kept.
std::vector<Binding> evalQuery(const QueryExpr& query, const RelationSource& source, const Binding& outer);

/// Names a term/condition reads, as Binding keys, in first-occurrence order.
std::vector<std::string> freeNames(const Term& term);
std::vector<std::string> freeNames(const ConditionExpr& expr);

}  // namespace prox::lang
