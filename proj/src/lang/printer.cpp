#include "prox/lang/printer.hpp"

#include <sstream>

namespace prox::lang {

std::string_view toString(CompareOp op) {
    switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Neq: return "!=";
    case CompareOp::Gt: return ">";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Ge: return ">=";
    }
    return "?";
}

std::string_view toString(ArithOp op) {
    switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
    }
    return "?";
}

namespace {

int precedence(ArithOp op) { return op == ArithOp::Add || op == ArithOp::Sub ? 1 : 2; }

const Arith* asArith(const Term& term) { return std::get_if<Arith>(&term.node); }

std::string printTerm(const Term& term) {
    return std::visit(
        [](const auto& node) -> std::string {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return toLiteral(node.value);
            } else if constexpr (std::is_same_v<T, Variable>) {
                return node.name;
            } else if constexpr (std::is_same_v<T, AttributeRef>) {
                return node.key();
            } else {
                int p = precedence(node.op);
                std::string lhs = printTerm(*node.lhs);
                std::string rhs = printTerm(*node.rhs);
                if (const auto* l = asArith(*node.lhs); l && precedence(l->op) < p) {
                    lhs = "(" + lhs + ")";
                }
                // Operators are left-associative, so an equal-precedence right
                // operand needs parentheses.
                if (const auto* r = asArith(*node.rhs); r && precedence(r->op) <= p) {
                    rhs = "(" + rhs + ")";
                }
                return lhs + " " + std::string(toString(node.op)) + " " + rhs;
            }
        },
        term.node);
}

bool isCompound(const ConditionExpr& expr) {
    return std::holds_alternative<Conjunction>(expr.node) || std::holds_alternative<Disjunction>(expr.node);
}

std::string printCondition(const ConditionExpr& expr) {
    return std::visit(
        [](const auto& node) -> std::string {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                return printTerm(node.lhs) + " " + std::string(toString(node.op)) + " " + printTerm(node.rhs);
            } else if constexpr (std::is_same_v<T, TrueConst>) {
                return "TRUE";
            } else if constexpr (std::is_same_v<T, FalseConst>) {
                return "FALSE";
            } else {
                const char* glue = std::is_same_v<T, Conjunction> ? " AND " : " OR ";
                std::string out;
                for (std::size_t i = 0; i < node.operands.size(); ++i) {
                    if (i > 0) {
                        out += glue;
                    }
                    const auto& operand = node.operands[i];
                    out += isCompound(operand) ? "(" + printCondition(operand) + ")" : printCondition(operand);
                }
                return out;
            }
        },
        expr.node);
}

std::string printAssignments(const std::vector<PlaceholderAssignment>& arm) {
    std::string out;
    for (std::size_t i = 0; i < arm.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += "@" + arm[i].placeholder + " = " + printTerm(arm[i].value);
    }
    return out;
}

}  // namespace

std::string toString(const Term& term) { return printTerm(term); }

std::string toString(const ConditionExpr& expr) { return printCondition(expr); }

std::string toString(const TupleIn& item) {
    std::string out = "TUPLE(";
    for (std::size_t i = 0; i < item.terms.size(); ++i) {
        out += (i > 0 ? ", " : "") + printTerm(item.terms[i]);
    }
    out += ") IN " + item.relation + ".";
    if (item.attributes.size() == 1) {
        return out + item.attributes.front();
    }
    out += "(";
    for (std::size_t i = 0; i < item.attributes.size(); ++i) {
        out += (i > 0 ? ", " : "") + item.attributes[i];
    }
    return out + ")";
}

std::string toString(const FilterExpr& filter) {
    if (filter.conjuncts.empty()) {
        return "TRUE";
    }
    std::string out;
    bool several = filter.conjuncts.size() > 1;
    for (std::size_t i = 0; i < filter.conjuncts.size(); ++i) {
        if (i > 0) {
            out += " AND ";
        }
        const auto& item = filter.conjuncts[i];
        if (const auto* tuple = std::get_if<TupleIn>(&item)) {
            out += toString(*tuple);
        } else {
            const auto& cond = std::get<ConditionExpr>(item);
            bool wrap = several && std::holds_alternative<Disjunction>(cond.node);
            out += wrap ? "(" + printCondition(cond) + ")" : printCondition(cond);
        }
    }
    return out;
}

std::string toString(const QueryExpr& query) {
    std::string out = "SELECT ";
    bool single = query.from.size() == 1;
    for (std::size_t i = 0; i < query.select.size(); ++i) {
        const auto& item = query.select[i];
        out += i > 0 ? ", " : "";
        out += single && item.relation == query.from.front() ? item.attribute : item.key();
    }
    out += " FROM ";
    for (std::size_t i = 0; i < query.from.size(); ++i) {
        out += (i > 0 ? ", " : "") + query.from[i];
    }
    if (!isTrivial(query.where)) {
        out += " WHERE " + toString(query.where);
    }
    return out;
}

std::string toString(const EffectStmt& stmt) {
    return std::visit(
        [](const auto& node) -> std::string {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Assign>) {
                return node.variable + " = " + printTerm(node.value);
            } else if constexpr (std::is_same_v<T, Insert>) {
                std::string out = "INSERT ";
                for (std::size_t i = 0; i < node.values.size(); ++i) {
                    out += (i > 0 ? ", " : "") + printTerm(node.values[i]);
                }
                return out + " INTO " + node.table;
            } else if constexpr (std::is_same_v<T, Delete>) {
                return "DELETE FROM " + node.table + " WHERE " + printCondition(node.keyFilter);
            } else {
                std::string out = "UPDATE " + node.table + " SET ";
                for (std::size_t i = 0; i < node.set.size(); ++i) {
                    out += (i > 0 ? ", " : "") + node.set[i].attribute + " = @" + node.set[i].placeholder;
                }
                out += " WHERE CASE";
                for (const auto& branch : node.branches) {
                    out += " WHEN " + toString(branch.when) + " THEN " + printAssignments(branch.then);
                }
                return out + " ELSE " + printAssignments(node.otherwise);
            }
        },
        stmt);
}

std::string toString(const std::vector<EffectStmt>& effect, std::string_view separator) {
    std::string out;
    for (std::size_t i = 0; i < effect.size(); ++i) {
        if (i > 0) {
            out += separator;
        }
        out += toString(effect[i]);
    }
    return out;
}

}  // namespace prox::lang
