#include "prox/lang/ast.hpp"

namespace prox::lang {

Term constant(Value value) { return Term{Constant{std::move(value)}}; }
Term variable(std::string name) { return Term{Variable{std::move(name)}}; }
Term attribute(std::string relation, std::string attr) {
    return Term{AttributeRef{std::move(relation), std::move(attr)}};
}
Term arith(ArithOp op, Term lhs, Term rhs) { return Term{Arith{op, std::move(lhs), std::move(rhs)}}; }

ConditionExpr atom(Term lhs, CompareOp op, Term rhs) {
    return ConditionExpr{Atom{std::move(lhs), op, std::move(rhs)}};
}
ConditionExpr trueConst() { return ConditionExpr{TrueConst{}}; }
ConditionExpr falseConst() { return ConditionExpr{FalseConst{}}; }

ConditionExpr conjunction(std::vector<ConditionExpr> operands) {
    if (operands.empty()) {
        return trueConst();
    }
    if (operands.size() == 1) {
        return std::move(operands.front());
    }
    return ConditionExpr{Conjunction{std::move(operands)}};
}

ConditionExpr disjunction(std::vector<ConditionExpr> operands) {
    if (operands.empty()) {
        return falseConst();
    }
    if (operands.size() == 1) {
        return std::move(operands.front());
    }
    return ConditionExpr{Disjunction{std::move(operands)}};
}

FilterExpr trueFilter() { return FilterExpr{{FilterItem{trueConst()}}}; }

bool isTrivial(const FilterExpr& filter) {
    if (filter.conjuncts.empty()) {
        return true;
    }
    if (filter.conjuncts.size() != 1) {
        return false;
    }
    const auto* cond = std::get_if<ConditionExpr>(&filter.conjuncts.front());
    return cond != nullptr && std::holds_alternative<TrueConst>(cond->node);
}

}  // namespace prox::lang
