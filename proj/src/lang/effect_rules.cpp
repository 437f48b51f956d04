#include <set>

#include "prox/error.hpp"
#include "prox/lang/parser.hpp"
#include "prox/lang/printer.hpp"

namespace prox::lang {

namespace {

void collectRelations(const Term& term, std::set<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, AttributeRef>) {
                if (!node.relation.empty()) {
                    out.insert(node.relation);
                }
            } else if constexpr (std::is_same_v<T, Arith>) {
                collectRelations(*node.lhs, out);
                collectRelations(*node.rhs, out);
            }
        },
        term.node);
}

void collectRelations(const ConditionExpr& expr, std::set<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                collectRelations(node.lhs, out);
                collectRelations(node.rhs, out);
            } else if constexpr (std::is_same_v<T, Conjunction> || std::is_same_v<T, Disjunction>) {
                for (const auto& operand : node.operands) {
                    collectRelations(operand, out);
                }
            }
        },
        expr.node);
}

void checkPlaceholders(const ConditionalUpdate& update) {
    std::set<std::string> placeholders;
    std::set<std::string> attributes;
    for (const auto& item : update.set) {
        if (!attributes.insert(item.attribute).second) {
            throw StaticViolation("UPDATE " + update.table + ": attribute '" + item.attribute + "' set twice");
        }
        if (!placeholders.insert(item.placeholder).second) {
            throw StaticViolation("UPDATE " + update.table + ": placeholder '@" + item.placeholder +
                                  "' used for two attributes");
        }
    }
    auto checkArm = [&](const std::vector<PlaceholderAssignment>& arm, const std::string& where) {
        std::set<std::string> bound;
        for (const auto& a : arm) {
            if (!placeholders.contains(a.placeholder)) {
                throw StaticViolation("UPDATE " + update.table + ": " + where + " assigns '@" + a.placeholder +
                                      "' which is not in SET");
            }
            if (!bound.insert(a.placeholder).second) {
                throw StaticViolation("UPDATE " + update.table + ": " + where + " assigns '@" + a.placeholder +
                                      "' twice");
            }
        }
        if (bound.size() != placeholders.size()) {
            for (const auto& p : placeholders) {
                if (!bound.contains(p)) {
                    throw StaticViolation("UPDATE " + update.table + ": " + where + " leaves '@" + p + "' unbound");
                }
            }
        }
    };
    for (std::size_t i = 0; i < update.branches.size(); ++i) {
        checkArm(update.branches[i].then, "WHEN branch " + std::to_string(i + 1));
    }
    checkArm(update.otherwise, "ELSE branch");
}

}  // namespace

void checkSingleTable(const ConditionalUpdate& update, const EffectContext& context) {
    auto foreign = [&](const std::string& relation, bool directAccess) {
        if (relation == update.table) {
            return false;
        }
        if (!context.updatableTables) {
            return true;
        }
        if (!context.updatableTables->contains(relation)) {
            return false;
        }
        return directAccess || !context.readRelations.contains(relation);
    };
    for (const auto& branch : update.branches) {
        for (const auto& item : branch.when.conjuncts) {
            std::set<std::string> referenced;
            if (const auto* tuple = std::get_if<TupleIn>(&item)) {
                if (foreign(tuple->relation, true)) {
                    throw StaticViolation("UPDATE " + update.table + ": WHEN filter reads table '" +
                                          tuple->relation + "'; only the updated table may be accessed");
                }
                for (const auto& t : tuple->terms) {
                    collectRelations(t, referenced);
                }
            } else {
                collectRelations(std::get<ConditionExpr>(item), referenced);
            }
            for (const auto& relation : referenced) {
                if (foreign(relation, false)) {
                    throw StaticViolation("UPDATE " + update.table + ": WHEN filter references '" + relation +
                                          "'; only the updated table may be accessed");
                }
            }
        }
    }
}

void checkEffect(const std::vector<EffectStmt>& effect, const EffectContext& context) {
    std::set<std::string> assigned;
    for (const auto& stmt : effect) {
        if (const auto* assign = std::get_if<Assign>(&stmt)) {
            if (!assigned.insert(assign->variable).second) {
                throw StaticViolation("variable '" + assign->variable + "' is assigned more than once");
            }
        } else if (const auto* update = std::get_if<ConditionalUpdate>(&stmt)) {
            if (update->set.empty()) {
                throw StaticViolation("UPDATE " + update->table + ": SET list is empty");
            }
            checkPlaceholders(*update);
            checkSingleTable(*update, context);
        }
    }
}

}  // namespace prox::lang
