#include "prox/lang/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "prox/error.hpp"
#include "prox/lang/printer.hpp"

namespace prox::lang {

namespace {

double asDouble(const Value& v) {
    return typeOf(v) == PrimitiveType::Integer ? static_cast<double>(std::get<std::int64_t>(v)) : std::get<double>(v);
}

Value lookup(const Binding& binding, const std::string& key) {
    auto it = binding.find(key);
    if (it == binding.end()) {
        throw UnboundName(key);
    }
    return it->second;
}

Value applyArith(ArithOp op, const Value& lhs, const Value& rhs) {
    PrimitiveType lt = typeOf(lhs);
    PrimitiveType rt = typeOf(rhs);
    if (!isNumeric(lt) || !isNumeric(rt)) {
        throw TypeError("arithmetic '" + std::string(toString(op)) + "' on " + std::string(toString(lt)) + " and " +
                        std::string(toString(rt)));
    }
    if (op == ArithOp::Div) {
        double divisor = asDouble(rhs);
        if (divisor == 0.0) {
            throw EvaluationError("division by zero");
        }
        double q = asDouble(lhs) / divisor;
        if (!std::isfinite(q)) {
            throw EvaluationError("arithmetic overflow");
        }
        return q;
    }
    if (lt == PrimitiveType::Integer && rt == PrimitiveType::Integer) {
        std::int64_t a = std::get<std::int64_t>(lhs);
        std::int64_t b = std::get<std::int64_t>(rhs);
        std::int64_t r = 0;
        bool overflow = false;
        switch (op) {
        case ArithOp::Add: overflow = __builtin_add_overflow(a, b, &r); break;
        case ArithOp::Sub: overflow = __builtin_sub_overflow(a, b, &r); break;
        case ArithOp::Mul: overflow = __builtin_mul_overflow(a, b, &r); break;
        case ArithOp::Div: break;
        }
        if (overflow) {
            throw EvaluationError("integer overflow");
        }
        return r;
    }
    double a = asDouble(lhs);
    double b = asDouble(rhs);
    double r = op == ArithOp::Add ? a + b : op == ArithOp::Sub ? a - b : a * b;
    if (!std::isfinite(r)) {
        throw EvaluationError("arithmetic overflow");
    }
    return r;
}

template <class T>
bool ordered(const T& a, CompareOp op, const T& b) {
    switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Neq: return a != b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Ge: return a >= b;
    }
    return false;
}

void addFreeNames(const Term& term, std::vector<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Variable>) {
                if (std::find(out.begin(), out.end(), node.name) == out.end()) {
                    out.push_back(node.name);
                }
            } else if constexpr (std::is_same_v<T, AttributeRef>) {
                std::string key = node.key();
                if (std::find(out.begin(), out.end(), key) == out.end()) {
                    out.push_back(std::move(key));
                }
            } else if constexpr (std::is_same_v<T, Arith>) {
                addFreeNames(*node.lhs, out);
                addFreeNames(*node.rhs, out);
            }
        },
        term.node);
}

void addFreeNames(const ConditionExpr& expr, std::vector<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                addFreeNames(node.lhs, out);
                addFreeNames(node.rhs, out);
            } else if constexpr (std::is_same_v<T, Conjunction> || std::is_same_v<T, Disjunction>) {
                for (const auto& operand : node.operands) {
                    addFreeNames(operand, out);
                }
            }
        },
        expr.node);
}

bool tupleMember(const TupleIn& item, const Binding& binding, const RelationSource* source) {
    if (source == nullptr) {
        throw EvaluationError("TUPLE ... IN " + item.relation + " evaluated without a database");
    }
    const auto* attrs = source->attributes(item.relation);
    if (attrs == nullptr) {
        throw UnknownTable(item.relation);
    }
    std::vector<std::size_t> columns;
    for (const auto& name : item.attributes) {
        auto it = std::find(attrs->begin(), attrs->end(), name);
        if (it == attrs->end()) {
            throw EvaluationError("relation '" + item.relation + "' has no attribute '" + name + "'");
        }
        columns.push_back(static_cast<std::size_t>(it - attrs->begin()));
    }
    std::vector<Value> probe;
    probe.reserve(item.terms.size());
    for (const auto& t : item.terms) {
        probe.push_back(evalTerm(t, binding));
    }
    for (const auto& row : source->rows(item.relation)) {
        bool all = true;
        for (std::size_t i = 0; i < columns.size() && all; ++i) {
            all = compare(probe[i], CompareOp::Eq, row[columns[i]]);
        }
        if (all) {
            return true;
        }
    }
    return false;
}

}  // namespace

Value evalTerm(const Term& term, const Binding& binding) {
    return std::visit(
        [&](const auto& node) -> Value {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return node.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                return lookup(binding, node.name);
            } else if constexpr (std::is_same_v<T, AttributeRef>) {
                return lookup(binding, node.key());
            } else {
                return applyArith(node.op, evalTerm(*node.lhs, binding), evalTerm(*node.rhs, binding));
            }
        },
        term.node);
}

bool compare(const Value& lhs, CompareOp op, const Value& rhs) {
    PrimitiveType lt = typeOf(lhs);
    PrimitiveType rt = typeOf(rhs);
    if (isNumeric(lt) && isNumeric(rt)) {
        if (lt == PrimitiveType::Integer && rt == PrimitiveType::Integer) {
            return ordered(std::get<std::int64_t>(lhs), op, std::get<std::int64_t>(rhs));
        }
        return ordered(asDouble(lhs), op, asDouble(rhs));
    }
    if (lt != rt) {
        throw TypeError("cannot compare " + std::string(toString(lt)) + " with " + std::string(toString(rt)));
    }
    switch (lt) {
    case PrimitiveType::String:
        return ordered(std::get<std::string>(lhs), op, std::get<std::string>(rhs));
    case PrimitiveType::Date:
        return ordered(std::get<Date>(lhs), op, std::get<Date>(rhs));
    case PrimitiveType::Boolean:
        if (op != CompareOp::Eq && op != CompareOp::Neq) {
            throw TypeError("booleans only support = and !=");
        }
        return ordered(std::get<bool>(lhs), op, std::get<bool>(rhs));
    default:
        return false;
    }
}

bool evalCondition(const ConditionExpr& expr, const Binding& binding) {
    return std::visit(
        [&](const auto& node) -> bool {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                return compare(evalTerm(node.lhs, binding), node.op, evalTerm(node.rhs, binding));
            } else if constexpr (std::is_same_v<T, Conjunction>) {
                for (const auto& operand : node.operands) {
                    if (!evalCondition(operand, binding)) {
                        return false;
                    }
                }
                return true;
            } else if constexpr (std::is_same_v<T, Disjunction>) {
                for (const auto& operand : node.operands) {
                    if (evalCondition(operand, binding)) {
                        return true;
                    }
                }
                return false;
            } else {
                return std::is_same_v<T, TrueConst>;
            }
        },
        expr.node);
}

bool evalFilter(const FilterExpr& filter, const Binding& binding, const RelationSource* source) {
    for (const auto& item : filter.conjuncts) {
        bool holds = std::holds_alternative<TupleIn>(item) ? tupleMember(std::get<TupleIn>(item), binding, source)
                                                           : evalCondition(std::get<ConditionExpr>(item), binding);
        if (!holds) {
            return false;
        }
    }
    return true;
}

std::vector<Binding> evalQuery(const QueryExpr& query, const RelationSource& source, const Binding& outer) {
    struct Scope {
        std::string relation;
        const std::vector<std::string>* attributes;
        std::span<const Row> rows;
    };
    std::vector<Scope> scopes;
    for (const auto& relation : query.from) {
        const auto* attrs = source.attributes(relation);
        if (attrs == nullptr) {
            throw UnknownTable(relation);
        }
        scopes.push_back(Scope{relation, attrs, source.rows(relation)});
    }

    // Unqualified attribute names resolve to a FROM relation when exactly one
    // relation carries them.
    std::map<std::string, int> owners;
    for (const auto& scope : scopes) {
        for (const auto& a : *scope.attributes) {
            ++owners[a];
        }
    }

    std::vector<AttributeRef> select = query.select;
    for (auto& item : select) {
        if (!item.relation.empty()) {
            continue;
        }
        for (const auto& scope : scopes) {
            if (std::find(scope.attributes->begin(), scope.attributes->end(), item.attribute) !=
                scope.attributes->end()) {
                if (owners[item.attribute] > 1) {
                    throw EvaluationError("ambiguous attribute '" + item.attribute + "'");
                }
                item.relation = scope.relation;
            }
        }
        if (item.relation.empty()) {
            throw UnboundName(item.attribute);
        }
    }

    std::vector<Binding> answers;
    std::set<Binding> seen;
    std::vector<std::size_t> cursor(scopes.size(), 0);
    for (const auto& scope : scopes) {
        if (scope.rows.empty()) {
            return answers;
        }
    }
    while (true) {
        Binding env = outer;
        for (std::size_t s = 0; s < scopes.size(); ++s) {
            const Row& row = scopes[s].rows[cursor[s]];
            for (std::size_t a = 0; a < scopes[s].attributes->size(); ++a) {
                const std::string& name = (*scopes[s].attributes)[a];
                env.insert_or_assign(scopes[s].relation + "." + name, row[a]);
                if (owners[name] == 1) {
                    env.insert_or_assign(name, row[a]);
                }
            }
        }
        if (evalFilter(query.where, env, &source)) {
            Binding answer;
            for (const auto& item : select) {
                answer.insert_or_assign(item.key(), lookup(env, item.key()));
            }
            if (seen.insert(answer).second) {
                answers.push_back(std::move(answer));
            }
        }
        std::size_t s = scopes.size();
        while (s > 0) {
            --s;
            if (++cursor[s] < scopes[s].rows.size()) {
                break;
            }
            cursor[s] = 0;
            if (s == 0) {
                return answers;
            }
        }
        if (scopes.empty()) {
            return answers;
        }
    }
}

std::vector<std::string> freeNames(const Term& term) {
    std::vector<std::string> out;
    addFreeNames(term, out);
    return out;
}

std::vector<std::string> freeNames(const ConditionExpr& expr) {
    std::vector<std::string> out;
    addFreeNames(expr, out);
    return out;
}

}  // namespace prox::lang
