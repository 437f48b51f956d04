#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "prox/engine/engine.hpp"
#include "prox/lang/ast.hpp"
#include "prox/lang/eval.hpp"
#include "prox/model/model.hpp"
#include "prox/store/database.hpp"
#include "prox/validator/validator.hpp"

namespace prox::testing {

std::string corpusPath(const std::string& name);
std::string readText(const std::string& path);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(gen_); }
    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[static_cast<std::size_t>(uniform(0, static_cast<int>(items.size()) - 1))];
    }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

// ---- language generators ----------------------------------------------------

/// Conjunction of 1..maxAtoms atoms over `vars` and small integer constants,
/// as a modeler would write it.
lang::ConditionExpr surfaceCondition(Rng& rng, const std::vector<std::string>& vars, int maxAtoms);

/// Arbitrary literal of any primitive type.
Value randomValue(Rng& rng);
lang::Term randomTerm(Rng& rng, int depth);
/// Full syntax: nested AND/OR, constants.
lang::ConditionExpr randomCondition(Rng& rng, int depth);
lang::QueryExpr randomQuery(Rng& rng);
/// One statement that satisfies the static effect rules on its own.
lang::EffectStmt randomEffect(Rng& rng);
/// Well-typed conditional update of R(a: integer, b: string) reading the
/// variables x and y (integers) and membership in R.a.
lang::ConditionalUpdate randomUpdate(Rng& rng);

// ---- model generators ---------------------------------------------------------

/// Valid model with a sequence of 1..4 tasks over 1..3 tables. Every
/// data_object name is unique across the model.
std::string validModelYaml(Rng& rng, int index);

/// A model produced by validModelYaml with exactly one structural defect of
/// the given rule (1..6) injected into one of its tasks.
struct Mutation {
    model::ProcessModel model;
    validator::Code expected;
    std::string taskId;
};

Mutation mutate(const model::ProcessModel& base, int rule, Rng& rng);

/// Small executable model plus everything needed to run it.
struct SmallCase {
    std::string modelYaml;
    std::string fixtureYaml;
    engine::DomainSpec domains;
    std::optional<lang::FilterExpr> property;
};

SmallCase smallCase(Rng& rng, int index);

// ---- oracles ---------------------------------------------------------------------

/// Per-tuple reference semantics of a conditional update: for each row, the
/// first WHEN that holds (filters see the original rows) binds the
/// placeholders, else the ELSE arm; SET attributes take the placeholder
/// values. Returns the updated rows in input order.
std::vector<lang::Row> referenceUpdate(const store::Table& table, const lang::ConditionalUpdate& update,
                                       const lang::Binding& outer, const lang::RelationSource& source);

/// Whole reachable graph by depth-first search, without bounds.
struct Enumeration {
    std::size_t states = 0;
    bool deadlock = false;
    bool violation = false;
};

Enumeration enumerate(const engine::Engine& engine, const store::Database& fixture,
                      const std::optional<lang::FilterExpr>& property, std::size_t limit);

/// Every assignment of `domain` values to `vars`.
std::vector<lang::Binding> assignments(const std::vector<std::string>& vars, const std::vector<Value>& domain);

}  // namespace prox::testing
