#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prox/encoder/encoder.hpp"
#include "prox/lang/ast.hpp"
#include "prox/lang/eval.hpp"
#include "prox/model/model.hpp"
#include "prox/store/database.hpp"

namespace prox::engine {

enum class Lifecycle { Idle, Enabled, Active, Compl };

std::string_view toString(Lifecycle state);

/// Finite value lists for user/system inputs, keyed by runtime name, as
/// written in the domain document (parsed against the input's type later).
using DomainSpec = std::map<std::string, std::vector<std::string>>;

DomainSpec loadDomainSpec(std::string_view document);
DomainSpec loadDomainSpecFile(const std::string& path);

struct GlobalState {
    /// Indexed like Engine::blocks().
    std::vector<Lifecycle> lifecycle;
    /// Sequence: index of the running child. Choices: branch taken, or -1.
    std::vector<int> cursor;
    /// Every process variable; nullopt while unset.
    std::map<std::string, std::optional<Value>> variables;
    store::Database db;

    /// Set variables only.
    lang::Binding binding() const;
    /// Canonical rendering; equal keys mean equal states (row order ignored).
    std::string key() const;
    bool operator==(const GlobalState& other) const { return key() == other.key(); }
};

struct Transition {
    enum class Kind { EnableBlock, FireTask, ResolveChoice, CompleteBlock };

    Kind kind = Kind::EnableBlock;
    /// Block path ("root", "root.1.0") or, for FireTask, the task id.
    std::string target;
    int branch = -1;  // ResolveChoice only
    /// FireTask only: the precondition answer and the user-input values.
    lang::Binding answer;
    lang::Binding inputs;

    std::string str() const;
    bool operator==(const Transition&) const = default;
};

struct Successor {
    Transition transition;
    GlobalState state;
};

struct BlockInfo {
    std::string path;
    const model::Block* block = nullptr;
    int parent = -1;
    std::vector<int> children;
};

/// Raised when a lifecycle change outside the permitted set is attempted;
/// signals an engine defect, never a modeling error.
class LifecycleViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class Engine {
public:
    /// Encodes the model (which must be valid). With `defaultMissingInputs`,
    /// inputs absent from `domains` take a single typed default value;
    /// otherwise they are an error.
    Engine(model::ProcessModel model, DomainSpec domains = {}, bool defaultMissingInputs = false);
    Engine(model::ProcessModel model, encoder::ProcessEncoding encoding, DomainSpec domains,
           bool defaultMissingInputs);

    // Blocks point into the owned model.
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    const model::ProcessModel& model() const { return model_; }
    const std::vector<BlockInfo>& blocks() const { return blocks_; }
    const encoder::ProcessEncoding& encoding() const { return encoding_; }

    GlobalState initial(store::Database fixture) const;
    bool completed(const GlobalState& state) const;

    /// Every step available in `state`, in a fixed order: blocks in
    /// pre-order; for a task, inputs combinations then precondition answers.
    /// Bindings whose effect fails are not offered.
    std::vector<Successor> successors(const GlobalState& state) const;
    std::vector<Transition> enabledTransitions(const GlobalState& state) const;

    /// Applies one transition, checking that it is enabled. Throws
    /// InvalidTrace(0, ...) when it is not and EffectError when the effect
    /// fails (the input state is never modified).
    GlobalState fire(const GlobalState& state, const Transition& transition) const;

    /// Runs `effect` against `state` under `binding`. On failure restores
    /// variables and database and throws EffectError.
    void applyEffect(const std::vector<lang::EffectStmt>& effect, const lang::Binding& binding,
                     GlobalState& state) const;

    /// Input combinations offered when firing `taskId`.
    std::vector<lang::Binding> inputCombinations(std::string_view taskId) const;

private:
    model::ProcessModel model_;
    encoder::ProcessEncoding encoding_;
    std::vector<BlockInfo> blocks_;
    std::map<std::string, int, std::less<>> taskBlock_;
    std::map<std::string, int, std::less<>> pathBlock_;
    std::map<std::string, PrimitiveType> variableTypes_;
    std::map<std::string, std::vector<lang::Binding>, std::less<>> inputs_;

    void index(const model::Block& block, const std::string& path, int parent);
    void prepareInputs(const DomainSpec& domains, bool defaultMissingInputs);
    bool blockedByDeferred(const GlobalState& state, int block) const;
    int exclusiveBranch(const GlobalState& state, int block) const;
    std::optional<GlobalState> enable(const GlobalState& state, int block) const;
    std::optional<GlobalState> complete(const GlobalState& state, int block) const;
    GlobalState resolve(const GlobalState& state, int block, int branch) const;
    std::vector<lang::Binding> answers(const GlobalState& state, const encoder::LeafEncoding& leaf,
                                       const lang::Binding& inputs) const;
    GlobalState fireTask(const GlobalState& state, int block, const lang::Binding& answer,
                         const lang::Binding& inputs) const;
    void checkLegal(const GlobalState& before, const GlobalState& after) const;
};

// ---- simulation -----------------------------------------------------------

struct RunResult {
    enum class Status { Completed, Stuck, StepLimit };

    Status status = Status::Completed;
    std::vector<Transition> trace;
    GlobalState final;
};

std::string_view toString(RunResult::Status status);

/// Random policy: uniform choice among successors driven by `seed`.
RunResult runRandom(const Engine& engine, const store::Database& fixture, std::uint64_t seed, std::size_t maxSteps);
/// Scripted policy: the i-th entry picks the successor index at step i.
/// When the script runs out the run stops (reported as StepLimit unless
/// completed or stuck). Throws Error on an out-of-range choice.
RunResult runScript(const Engine& engine, const store::Database& fixture, const std::vector<std::size_t>& script,
                    std::size_t maxSteps);

// ---- verification ---------------------------------------------------------

struct VerifyOptions {
    /// Safety property; atoms over unset variables hold. nullopt checks
    /// deadlock freedom only.
    std::optional<lang::FilterExpr> property;
    std::size_t maxDepth = 32;
    unsigned workers = 1;
};

struct VerificationResult {
    enum class Status { Safe, Violated, Deadlock, BoundExceeded };

    Status status = Status::Safe;
    std::vector<Transition> trace;
    std::size_t statesExplored = 0;
    /// State reached by the trace; set for violations and deadlocks.
    std::optional<GlobalState> finalState;
};

std::string_view toString(VerificationResult::Status status);

/// Evaluates a property in `state`; atoms mentioning unset variables hold.
bool holds(const lang::FilterExpr& property, const GlobalState& state);

/// Level-synchronous breadth-first search. Expansion of a level is spread
/// over `workers` threads; merging is sequential in frontier order, so the
/// result does not depend on the worker count. Throws Error for maxDepth 0.
VerificationResult verify(const Engine& engine, const store::Database& fixture, const VerifyOptions& options);

/// Re-executes `trace` from the initial state. Throws InvalidTrace with the
/// 1-based index of the first step that is not enabled.
GlobalState replay(const Engine& engine, const store::Database& fixture, const std::vector<Transition>& trace);

// ---- documents -------------------------------------------------------------

std::string saveTrace(const std::vector<Transition>& trace);
/// Accepts the list saveTrace writes, or a mapping whose `trace` key holds
/// it (the verify report).
std::vector<Transition> loadTrace(std::string_view document);

/// Human-readable dump of variables and tables.
std::string describeState(const Engine& engine, const GlobalState& state);

}  // namespace prox::engine
