#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prox/lang/ast.hpp"
#include "prox/lang/parser.hpp"
#include "prox/model/model.hpp"

namespace prox::encoder {

/// Data-aware reading of one task: which bindings it may fire with and what
/// firing does.
struct LeafEncoding {
    std::string taskId;
    /// nullopt when the task reads no data store (printed as TRUE).
    std::optional<lang::QueryExpr> precondition;
    /// Values supplied at firing time, keyed by runtime name.
    std::vector<std::pair<std::string, PrimitiveType>> userInputs;
    std::vector<lang::EffectStmt> effect;

    bool operator==(const LeafEncoding&) const = default;
};

using ProcessEncoding = std::map<std::string, LeafEncoding>;

/// True when an operation expression is written in the When/Then/Otherwise
/// scenario form rather than as a term.
bool isGherkin(std::string_view expression);

/// Translates a scenario into a conditional update of `table`:
///
///   When <filter> Then set <attr> to <term> [and set <attr> to <term>]*
///   ...
///   Otherwise set <attr> to <term> [and set <attr> to <term>]*
///
/// SET lists every attribute mentioned anywhere, with a placeholder of the
/// same name; an arm that does not mention an attribute keeps its current
/// value. Throws GherkinError (1-based clause index) and StaticViolation
/// when the result breaks the single-table rule under `context`.
lang::ConditionalUpdate gherkinToUpdate(std::string_view expression, const std::string& table,
                                        const lang::EffectContext& context = {});

/// Context for the single-table rule inside `task`: every non-read-only
/// table is updatable; relations read by the task's precondition may be
/// referenced.
lang::EffectContext effectContext(const model::ProcessModel& model, const model::Task& task);

/// Throws EncodingError, GherkinError, StaticViolation.
LeafEncoding encodeTask(const model::ProcessModel& model, std::string_view taskId);

/// Refuses invalid models with PreconditionNotMet.
ProcessEncoding encodeProcess(const model::ProcessModel& model);

/// Encoded document: process name and, per task, the precondition query
/// text, the user inputs as name:type and the effect statements.
std::string saveEncoding(const std::string& processName, const ProcessEncoding& encoding);
ProcessEncoding loadEncoding(std::string_view document);

std::string preconditionText(const LeafEncoding& leaf);

}  // namespace prox::encoder
