#include <atomic>
#include <exception>
#include <random>
#include <thread>
#include <unordered_set>

#include "prox/engine/engine.hpp"
#include "prox/error.hpp"

namespace prox::engine {

std::string_view toString(RunResult::Status status) {
    switch (status) {
    case RunResult::Status::Completed: return "completed";
    case RunResult::Status::Stuck: return "stuck";
    case RunResult::Status::StepLimit: return "step-limit";
    }
    return "?";
}

std::string_view toString(VerificationResult::Status status) {
    switch (status) {
    case VerificationResult::Status::Safe: return "safe";
    case VerificationResult::Status::Violated: return "violated";
    case VerificationResult::Status::Deadlock: return "deadlock";
    case VerificationResult::Status::BoundExceeded: return "bound-exceeded";
    }
    return "?";
}

namespace {

template <typename Pick>
RunResult run(const Engine& engine, const store::Database& fixture, std::size_t maxSteps, Pick pick) {
    RunResult result;
    result.final = engine.initial(fixture);
    for (std::size_t step = 0;; ++step) {
        if (engine.completed(result.final)) {
            result.status = RunResult::Status::Completed;
            return result;
        }
        auto next = engine.successors(result.final);
        if (next.empty()) {
            result.status = RunResult::Status::Stuck;
            return result;
        }
        std::optional<std::size_t> choice;
        if (step < maxSteps) {
            choice = pick(step, next.size());
        }
        if (!choice) {
            result.status = RunResult::Status::StepLimit;
            return result;
        }
        result.trace.push_back(std::move(next[*choice].transition));
        result.final = std::move(next[*choice].state);
    }
}

bool unbound(const std::vector<std::string>& names, const lang::Binding& binding) {
    for (const auto& n : names) {
        if (!binding.contains(n)) {
            return true;
        }
    }
    return false;
}

bool holdsCondition(const lang::ConditionExpr& expr, const lang::Binding& binding) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, lang::Atom>) {
                if (unbound(lang::freeNames(expr), binding)) {
                    return true;
                }
                return lang::compare(lang::evalTerm(n.lhs, binding), n.op, lang::evalTerm(n.rhs, binding));
            } else if constexpr (std::is_same_v<T, lang::Conjunction>) {
                for (const auto& o : n.operands) {
                    if (!holdsCondition(o, binding)) {
                        return false;
                    }
                }
                return true;
            } else if constexpr (std::is_same_v<T, lang::Disjunction>) {
                for (const auto& o : n.operands) {
                    if (holdsCondition(o, binding)) {
                        return true;
                    }
                }
                return false;
            } else {
                return std::is_same_v<T, lang::TrueConst>;
            }
        },
        expr.node);
}

struct Node {
    int parent = -1;
    Transition transition;
    GlobalState state;
};

std::vector<Transition> traceTo(const std::vector<Node>& nodes, int index) {
    std::vector<Transition> trace;
    for (int i = index; nodes[i].parent >= 0; i = nodes[i].parent) {
        trace.push_back(nodes[i].transition);
    }
    return {trace.rbegin(), trace.rend()};
}

struct Expansion {
    std::vector<Successor> successors;
    std::exception_ptr error;
};

std::vector<Expansion> expand(const Engine& engine, const std::vector<Node>& nodes, const std::vector<int>& frontier,
                              unsigned workers) {
    std::vector<Expansion> out(frontier.size());
    auto work = [&](std::size_t i) {
        try {
            out[i].successors = engine.successors(nodes[frontier[i]].state);
        } catch (...) {
            out[i].error = std::current_exception();
        }
    };
    unsigned threads = std::min<std::size_t>(std::max(1u, workers), frontier.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            work(i);
        }
        return out;
    }
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = cursor++; i < frontier.size(); i = cursor++) {
                work(i);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    return out;
}

}  // namespace

RunResult runRandom(const Engine& engine, const store::Database& fixture, std::uint64_t seed, std::size_t maxSteps) {
    std::mt19937_64 rng(seed);
    return run(engine, fixture, maxSteps, [&](std::size_t, std::size_t n) -> std::optional<std::size_t> {
        return static_cast<std::size_t>(rng() % n);
    });
}

RunResult runScript(const Engine& engine, const store::Database& fixture, const std::vector<std::size_t>& script,
                    std::size_t maxSteps) {
    return run(engine, fixture, maxSteps, [&](std::size_t step, std::size_t n) -> std::optional<std::size_t> {
        if (step >= script.size()) {
            return std::nullopt;
        }
        if (script[step] >= n) {
            throw Error("script step " + std::to_string(step + 1) + " picks successor " +
                        std::to_string(script[step]) + " of " + std::to_string(n));
        }
        return script[step];
    });
}

bool holds(const lang::FilterExpr& property, const GlobalState& state) {
    lang::Binding binding = state.binding();
    for (const auto& item : property.conjuncts) {
        if (const auto* cond = std::get_if<lang::ConditionExpr>(&item)) {
            if (!holdsCondition(*cond, binding)) {
                return false;
            }
            continue;
        }
        const auto& in = std::get<lang::TupleIn>(item);
        bool skip = false;
        for (const auto& t : in.terms) {
            skip = skip || unbound(lang::freeNames(t), binding);
        }
        if (!skip && !lang::evalFilter(lang::FilterExpr{{in}}, binding, &state.db)) {
            return false;
        }
    }
    return true;
}

VerificationResult verify(const Engine& engine, const store::Database& fixture, const VerifyOptions& options) {
    if (options.maxDepth == 0) {
        throw Error("max depth must be positive");
    }
    VerificationResult result;
    std::vector<Node> nodes;
    std::unordered_set<std::string> visited;
    nodes.push_back(Node{-1, {}, engine.initial(fixture)});
    visited.insert(nodes[0].state.key());

    auto finish = [&](VerificationResult::Status status, int at) {
        result.status = status;
        result.statesExplored = visited.size();
        if (at >= 0) {
            result.trace = traceTo(nodes, at);
            result.finalState = nodes[at].state;
        }
        return result;
    };

    if (options.property && !holds(*options.property, nodes[0].state)) {
        return finish(VerificationResult::Status::Violated, 0);
    }
    std::vector<int> frontier{0};
    bool exceeded = false;
    for (std::size_t depth = 0; !frontier.empty(); ++depth) {
        auto expansions = expand(engine, nodes, frontier, options.workers);
        bool last = depth == options.maxDepth;
        std::vector<int> next;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            auto& ex = expansions[i];
            if (ex.error) {
                std::rethrow_exception(ex.error);
            }
            int from = frontier[i];
            if (ex.successors.empty() && !engine.completed(nodes[from].state)) {
                return finish(VerificationResult::Status::Deadlock, from);
            }
            for (auto& s : ex.successors) {
                std::string key = s.state.key();
                if (visited.contains(key)) {
                    continue;
                }
                if (last) {
                    exceeded = true;
                    continue;
                }
                visited.insert(std::move(key));
                nodes.push_back(Node{from, std::move(s.transition), std::move(s.state)});
                int id = static_cast<int>(nodes.size()) - 1;
                if (options.property && !holds(*options.property, nodes[id].state)) {
                    return finish(VerificationResult::Status::Violated, id);
                }
                next.push_back(id);
            }
        }
        if (last) {
            break;
        }
        frontier = std::move(next);
    }
    return finish(exceeded ? VerificationResult::Status::BoundExceeded : VerificationResult::Status::Safe, -1);
}

GlobalState replay(const Engine& engine, const store::Database& fixture, const std::vector<Transition>& trace) {
    GlobalState state = engine.initial(fixture);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        try {
            state = engine.fire(state, trace[i]);
        } catch (const InvalidTrace& e) {
            std::string msg = e.what();
            throw InvalidTrace(i + 1, msg.substr(msg.find(": ") + 2));
        } catch (const Error& e) {
            throw InvalidTrace(i + 1, "'" + trace[i].str() + "' failed: " + e.what());
        }
    }
    return state;
}

}  // namespace prox::engine
