#include "prox/lang/types.hpp"

#include "prox/error.hpp"
#include "prox/lang/printer.hpp"

namespace prox::lang {

TypeEnv literalsOnly() {
    return [](std::string_view) -> std::optional<PrimitiveType> { return std::nullopt; };
}

bool compatible(PrimitiveType a, PrimitiveType b) { return a == b || (isNumeric(a) && isNumeric(b)); }

std::optional<PrimitiveType> inferType(const Term& term, const TypeEnv& env) {
    return std::visit(
        [&](const auto& node) -> std::optional<PrimitiveType> {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return typeOf(node.value);
            } else if constexpr (std::is_same_v<T, Variable>) {
                return env(node.name);
            } else if constexpr (std::is_same_v<T, AttributeRef>) {
                return env(node.key());
            } else {
                auto lhs = inferType(*node.lhs, env);
                auto rhs = inferType(*node.rhs, env);
                for (const auto& side : {lhs, rhs}) {
                    if (side && !isNumeric(*side)) {
                        throw TypeError("arithmetic over " + std::string(toString(*side)) + " in '" +
                                        toString(Term{node}) + "'");
                    }
                }
                if (!lhs || !rhs) {
                    return std::nullopt;
                }
                if (node.op == ArithOp::Div || *lhs == PrimitiveType::Double || *rhs == PrimitiveType::Double) {
                    return PrimitiveType::Double;
                }
                return PrimitiveType::Integer;
            }
        },
        term.node);
}

void typecheck(const ConditionExpr& expr, const TypeEnv& env) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                auto lhs = inferType(node.lhs, env);
                auto rhs = inferType(node.rhs, env);
                if (lhs && rhs && !compatible(*lhs, *rhs)) {
                    throw TypeError("incompatible operands in '" + toString(ConditionExpr{node}) + "': " +
                                    std::string(toString(*lhs)) + " vs " + std::string(toString(*rhs)));
                }
                if (lhs && rhs && *lhs == PrimitiveType::Boolean && node.op != CompareOp::Eq &&
                    node.op != CompareOp::Neq) {
                    throw TypeError("booleans only support = and != in '" + toString(ConditionExpr{node}) + "'");
                }
            } else if constexpr (std::is_same_v<T, Conjunction> || std::is_same_v<T, Disjunction>) {
                for (const auto& operand : node.operands) {
                    typecheck(operand, env);
                }
            }
        },
        expr.node);
}

void typecheck(const FilterExpr& filter, const TypeEnv& env) {
    for (const auto& item : filter.conjuncts) {
        if (const auto* cond = std::get_if<ConditionExpr>(&item)) {
            typecheck(*cond, env);
        } else {
            for (const auto& t : std::get<TupleIn>(item).terms) {
                inferType(t, env);
            }
        }
    }
}

}  // namespace prox::lang
