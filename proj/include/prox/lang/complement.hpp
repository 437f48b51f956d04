#pragma once

#include "prox/lang/ast.hpp"

namespace prox::lang {

CompareOp negate(CompareOp op);

/// Negation pushed to the atoms: AND and OR swap (De Morgan), each atom's
/// operator is replaced by its complementary one, TRUE and FALSE swap. The
/// result contains no negation.
ConditionExpr complement(const ConditionExpr& expr);

}  // namespace prox::lang
