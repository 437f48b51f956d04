#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "prox/lang/ast.hpp"

namespace prox::lang {

/// Static type of a Binding key, or nullopt when unknown.
using TypeEnv = std::function<std::optional<PrimitiveType>(std::string_view key)>;

/// Empty environment: only literals have known types.
TypeEnv literalsOnly();

/// Infers the type of `term`, throwing TypeError on arithmetic over
/// non-numeric operands. nullopt when some operand type is unknown.
std::optional<PrimitiveType> inferType(const Term& term, const TypeEnv& env);

bool compatible(PrimitiveType a, PrimitiveType b);

/// Throws TypeError for atoms whose operand types are known and
/// incompatible.
void typecheck(const ConditionExpr& expr, const TypeEnv& env);
void typecheck(const FilterExpr& filter, const TypeEnv& env);

}  // namespace prox::lang
