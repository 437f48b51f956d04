#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prox/lang/ast.hpp"
#include "prox/lang/eval.hpp"

namespace prox::testgen {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Range&) const = default;
};

/// Closed numeric range per predicate variable (Binding key).
using Ranges = std::map<std::string, Range, std::less<>>;

/// `name: [lo, hi]` per variable. Throws ParseError.
Ranges loadRanges(std::string_view document);
Ranges loadRangesFile(const std::string& path);

struct TestVector {
    lang::Binding inputs;
    bool expected = false;
    std::string rationale;
    bool operator==(const TestVector&) const = default;
};

/// Hand-written vector, optionally with the outcome its author claims.
struct Case {
    lang::Binding inputs;
    std::optional<bool> claimed;
    std::string label;
};

/// List of `{values: {name: number}, claimed: bool, label: text}`.
std::vector<Case> loadCases(std::string_view document);
std::vector<Case> loadCasesFile(const std::string& path);

struct Generation {
    /// Predicate variables in first-occurrence order (the table columns).
    std::vector<std::string> variables;
    std::vector<TestVector> vectors;
    /// No satisfying assignment was found over the ranges.
    bool noWitness = false;
    /// Skipped thresholds and claimed outcomes that disagree with the
    /// predicate.
    std::vector<std::string> notes;
};

/// Boundary vectors for `predicate`: the first satisfying and the first
/// violating grid witness, then for every atom and every variable it
/// depends on affinely, the threshold t and t -/+ epsilon with the other
/// variables held at each witness. Cases are appended after the generated
/// vectors. Expected outcomes always come from evaluating the predicate.
/// Throws Error when a variable has no range or epsilon is not positive.
Generation generateVectors(const lang::ConditionExpr& predicate, const Ranges& ranges, double epsilon,
                           const std::vector<Case>& cases = {});

enum class Format { Table, Script };

std::string renderVectors(const Generation& generation, Format format);

}  // namespace prox::testgen
