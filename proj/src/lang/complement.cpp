#include "prox/lang/complement.hpp"

namespace prox::lang {

CompareOp negate(CompareOp op) {
    switch (op) {
    case CompareOp::Eq: return CompareOp::Neq;
    case CompareOp::Neq: return CompareOp::Eq;
    case CompareOp::Gt: return CompareOp::Le;
    case CompareOp::Le: return CompareOp::Gt;
    case CompareOp::Lt: return CompareOp::Ge;
    case CompareOp::Ge: return CompareOp::Lt;
    }
    return op;
}

ConditionExpr complement(const ConditionExpr& expr) {
    return std::visit(
        [](const auto& node) -> ConditionExpr {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                return atom(node.lhs, negate(node.op), node.rhs);
            } else if constexpr (std::is_same_v<T, Conjunction> || std::is_same_v<T, Disjunction>) {
                std::vector<ConditionExpr> operands;
                operands.reserve(node.operands.size());
                for (const auto& operand : node.operands) {
                    operands.push_back(complement(operand));
                }
                if constexpr (std::is_same_v<T, Conjunction>) {
                    return ConditionExpr{Disjunction{std::move(operands)}};
                } else {
                    return ConditionExpr{Conjunction{std::move(operands)}};
                }
            } else if constexpr (std::is_same_v<T, TrueConst>) {
                return falseConst();
            } else {
                return trueConst();
            }
        },
        expr.node);
}

}  // namespace prox::lang
