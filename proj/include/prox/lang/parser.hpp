#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "prox/lang/ast.hpp"

namespace prox::lang {

/// Surface syntax is the conjunctive grammar modelers write (atoms joined by
/// AND). Full syntax also admits OR, which is how complements and property
/// documents are written.
enum class Syntax { Surface, Full };

/// Throws ParseError, or TypeError when an atom compares operands whose
/// types are already known to be incompatible (e.g. a string literal with a
/// number).
ConditionExpr parseCondition(std::string_view text, Syntax syntax = Syntax::Surface);

Term parseTerm(std::string_view text);

FilterExpr parseFilter(std::string_view text, Syntax syntax = Syntax::Surface);

/// SELECT a, R.b FROM R, S [WHERE filter]. Unqualified select items are
/// qualified with the sole FROM relation when there is exactly one.
QueryExpr parseQuery(std::string_view text);

/// What the single-table rule may assume about the surrounding model.
/// Without `updatableTables`, every relation other than the updated one is
/// treated as a foreign updatable relation.
struct EffectContext {
    std::optional<std::set<std::string>> updatableTables;
    /// Relations bound by the precondition; their attributes may be reused
    /// inside WHEN filters.
    std::set<std::string> readRelations;
};

/// Statements separated by ';'. Throws ParseError or StaticViolation.
std::vector<EffectStmt> parseEffect(std::string_view text, const EffectContext& context = {});

/// Static rules of the effect language, applied by parseEffect and exposed
/// for effects assembled programmatically.
void checkEffect(const std::vector<EffectStmt>& effect, const EffectContext& context = {});

/// The single-table rule alone: WHEN filters of `update` may not read an
/// updatable relation other than the updated one. Throws StaticViolation.
void checkSingleTable(const ConditionalUpdate& update, const EffectContext& context);

/// Parses a single literal (as printed by toLiteral).
Value parseLiteral(std::string_view text);

}  // namespace prox::lang
