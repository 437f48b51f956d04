#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "prox/lang/ast.hpp"

namespace prox::lang {

// Every printer emits text the parser maps back to a structurally equal AST.

std::string_view toString(CompareOp op);
std::string_view toString(ArithOp op);

std::string toString(const Term& term);
std::string toString(const ConditionExpr& expr);
std::string toString(const TupleIn& item);
std::string toString(const FilterExpr& filter);
std::string toString(const QueryExpr& query);
std::string toString(const EffectStmt& stmt);

/// Statements joined by `separator` (default "; ").
std::string toString(const std::vector<EffectStmt>& effect, std::string_view separator = "; ");

}  // namespace prox::lang
