#include <gtest/gtest.h>

#include <algorithm>

#include "prox/engine/engine.hpp"
#include "prox/error.hpp"
#include "prox/lang/parser.hpp"
#include "prox/model/io.hpp"
#include "support.hpp"

using namespace prox;
using namespace prox::engine;
using prox::testing::corpusPath;
using prox::testing::Rng;

namespace {

using Kind = Transition::Kind;

struct Loaded {
    std::unique_ptr<Engine> engine;
    store::Database fixture;
};

Loaded load(const std::string& name, const std::string& fixture = "") {
    auto m = model::loadModelFile(corpusPath(name + ".yaml"));
    auto domains = loadDomainSpecFile(corpusPath(name + ".domains.yaml"));
    auto db = fixture.empty() ? store::Database(m.tables) : store::loadFixtureFile(m.tables, corpusPath(fixture));
    return {std::make_unique<Engine>(std::move(m), std::move(domains), true), std::move(db)};
}

Loaded recruitment() { return load("recruitment", "recruitment.fixture.yaml"); }

std::vector<Successor> ofKind(const std::vector<Successor>& all, Kind kind) {
    std::vector<Successor> out;
    std::copy_if(all.begin(), all.end(), std::back_inserter(out),
                 [&](const Successor& s) { return s.transition.kind == kind; });
    return out;
}

/// Follows the only successor of each kind/target until `stop` is offered.
GlobalState advanceUntil(const Engine& engine, GlobalState state, const std::string& stop) {
    for (int guard = 0; guard < 50; ++guard) {
        auto next = engine.successors(state);
        for (const auto& s : next) {
            if (s.transition.kind == Kind::FireTask && s.transition.target == stop) {
                return state;
            }
        }
        if (next.empty()) {
            break;
        }
        state = next.front().state;
    }
    ADD_FAILURE() << "task " << stop << " never offered";
    return state;
}

Loaded smallLoaded(const prox::testing::SmallCase& c) {
    auto m = model::loadModel(c.modelYaml);
    auto db = store::loadFixture(m.tables, c.fixtureYaml);
    return {std::make_unique<Engine>(std::move(m), c.domains, true), std::move(db)};
}

}  // namespace

TEST(EngineStart, RootEnabledAndNothingFired) {
    auto [engine, fixture] = recruitment();
    auto s0 = engine->initial(fixture);
    EXPECT_EQ(s0.lifecycle[0], Lifecycle::Enabled);
    EXPECT_FALSE(engine->completed(s0));
    for (const auto& [name, value] : s0.variables) {
        EXPECT_FALSE(value.has_value()) << name;
    }
    EXPECT_EQ(engine->blocks()[0].path, "root");
    EXPECT_EQ(engine->blocks()[1].path, "root.0");
}

TEST(EngineFire, OneTransitionPerOffer) {
    auto [engine, fixture] = recruitment();
    auto state = advanceUntil(*engine, engine->initial(fixture), "submit_application");
    auto fires = ofKind(engine->successors(state), Kind::FireTask);
    ASSERT_EQ(fires.size(), 3u);
    std::vector<std::string> offers;
    for (const auto& f : fires) {
        offers.push_back(std::get<std::string>(f.transition.answer.at("Offers.offerID")));
        EXPECT_EQ(f.state.db.rows("Candidate").size(), 1u);
        EXPECT_EQ(f.state.db.rows("Offers").size(), 3u);
    }
    EXPECT_EQ(offers, (std::vector<std::string>{"O-1", "O-2", "O-3"}));
}

TEST(EngineFire, InputStateIsUntouched) {
    auto [engine, fixture] = recruitment();
    auto state = advanceUntil(*engine, engine->initial(fixture), "submit_application");
    auto before = state.key();
    auto fired = engine->fire(state, ofKind(engine->successors(state), Kind::FireTask).front().transition);
    EXPECT_EQ(state.key(), before);
    EXPECT_NE(fired.key(), before);
}

TEST(EngineFire, NotEnabledTransitionIsRejected) {
    auto [engine, fixture] = recruitment();
    Transition t;
    t.kind = Kind::FireTask;
    t.target = "accept_candidate";
    EXPECT_THROW(engine->fire(engine->initial(fixture), t), InvalidTrace);
}

TEST(EngineChoice, ExclusiveFollowsGuard) {
    auto [engine, fixture] = recruitment();
    for (const char* expected : {"accept_candidate", "reject_candidate"}) {
        std::string score = expected == std::string("accept_candidate") ? "4.0" : "2.0";
        auto m = model::loadModelFile(corpusPath("recruitment.yaml"));
        Engine e(std::move(m), DomainSpec{{"score", {score}}}, true);
        auto state = e.initial(fixture);
        bool seen = false;
        for (int i = 0; i < 20 && !e.completed(state); ++i) {
            auto next = e.successors(state);
            ASSERT_FALSE(next.empty());
            for (const auto& s : next) {
                if (s.transition.kind == Kind::FireTask) {
                    EXPECT_NE(s.transition.target, expected == std::string("accept_candidate") ? "reject_candidate"
                                                                                               : "accept_candidate");
                    seen = seen || s.transition.target == expected;
                }
            }
            state = next.front().state;
        }
        EXPECT_TRUE(seen) << expected;
    }
}

TEST(EngineChoice, DeferredBranchesExcludeEachOther) {
    auto [engine, fixture] = load("withdrawal");
    auto state = engine->initial(fixture);
    std::vector<Successor> resolves;
    for (int i = 0; i < 10 && resolves.empty(); ++i) {
        auto next = engine->successors(state);
        ASSERT_FALSE(next.empty());
        resolves = ofKind(next, Kind::ResolveChoice);
        state = next.front().state;
    }
    ASSERT_EQ(resolves.size(), 2u);
    EXPECT_EQ(resolves[0].transition.branch, 0);
    EXPECT_EQ(resolves[1].transition.branch, 1);
    for (int branch = 0; branch < 2; ++branch) {
        const char* taken = branch == 0 ? "withdraw" : "confirm";
        const char* dropped = branch == 0 ? "confirm" : "withdraw";
        auto s = resolves[static_cast<std::size_t>(branch)].state;
        bool fired = false;
        for (int i = 0; i < 20 && !engine->completed(s); ++i) {
            auto next = engine->successors(s);
            ASSERT_FALSE(next.empty());
            for (const auto& n : next) {
                EXPECT_NE(n.transition.target, dropped);
                if (n.transition.target == taken && !fired) {
                    fired = true;
                    EXPECT_EQ(n.state.db.rows("Archive").size(), branch == 0 ? 1u : 0u);
                    EXPECT_EQ(n.state.db.rows("Candidate").size(), branch == 0 ? 0u : 1u);
                }
            }
            s = next.front().state;
        }
        EXPECT_TRUE(fired) << taken;
        EXPECT_TRUE(engine->completed(s));
    }
}

TEST(EngineParallel, InterleavingsAgree) {
    auto [engine, fixture] = load("withdrawal");
    std::vector<std::string> finals;
    for (int order = 0; order < 2; ++order) {
        auto state = advanceUntil(*engine, engine->initial(fixture), "notify_hr");
        const char* first = order == 0 ? "notify_hr" : "close_file";
        for (int i = 0; i < 30 && !engine->completed(state); ++i) {
            auto next = engine->successors(state);
            ASSERT_FALSE(next.empty());
            auto pick = std::find_if(next.begin(), next.end(), [&](const Successor& s) {
                return s.transition.kind == Kind::FireTask && s.transition.target == first;
            });
            state = pick != next.end() ? pick->state : next.front().state;
        }
        ASSERT_TRUE(engine->completed(state));
        finals.push_back(state.key());
    }
    EXPECT_EQ(finals[0], finals[1]);
}

TEST(EngineRun, SameSeedSameTrace) {
    auto [engine, fixture] = recruitment();
    auto a = runRandom(*engine, fixture, 7, 100);
    auto b = runRandom(*engine, fixture, 7, 100);
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.status, RunResult::Status::Completed);
    EXPECT_EQ(a.final.db.rows("Candidate").size(), 1u);
    EXPECT_EQ(replay(*engine, fixture, a.trace), a.final);
}

TEST(EngineRun, StepLimitAndScript) {
    auto [engine, fixture] = recruitment();
    EXPECT_EQ(runRandom(*engine, fixture, 1, 2).status, RunResult::Status::StepLimit);
    auto scripted = runScript(*engine, fixture, {0, 2}, 100);
    ASSERT_EQ(scripted.trace.size(), 2u);
    EXPECT_EQ(std::get<std::string>(scripted.trace[1].answer.at("Offers.offerID")), "O-3");
    EXPECT_THROW(runScript(*engine, fixture, {9}, 100), Error);
}

TEST(EngineRun, DeadlockModelGetsStuck) {
    auto [engine, fixture] = load("deadlock", "deadlock.fixture.yaml");
    bool stuck = false;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto r = runRandom(*engine, fixture, seed, 100);
        if (r.status == RunResult::Status::Stuck) {
            stuck = true;
            EXPECT_TRUE(engine->successors(r.final).empty());
            EXPECT_FALSE(engine->completed(r.final));
        }
    }
    EXPECT_TRUE(stuck);
}

TEST(EngineEffect, FailureRestoresState) {
    auto [engine, fixture] = recruitment();
    auto state = engine->initial(fixture);
    auto before = state.key();
    auto effect = lang::parseEffect("finalScore = 1.0; INSERT 'n', 'e', 'o', 's' INTO Candidate; finalDecision = 1 / 0");
    EXPECT_THROW(engine->applyEffect(effect, {}, state), EffectError);
    EXPECT_EQ(state.key(), before);
    EXPECT_THROW(engine->applyEffect(lang::parseEffect("INSERT 'x' INTO Offers"), {}, state), EffectError);
    EXPECT_EQ(state.key(), before);
}

TEST(EngineEffect, AssignmentsReadPreEffectValues) {
    auto [engine, fixture] = recruitment();
    auto state = engine->initial(fixture);
    engine->applyEffect(lang::parseEffect("finalScore = 2.0"), {}, state);
    engine->applyEffect(lang::parseEffect("finalScore = 5.0; finalDecision = finalScore"), state.binding(), state);
    EXPECT_EQ(state.variables.at("finalDecision"), Value(2.0));
    EXPECT_EQ(state.variables.at("finalScore"), Value(5.0));
}

TEST(EngineVerify, RecruitmentSafe) {
    auto [engine, fixture] = recruitment();
    VerifyOptions opts;
    opts.property = lang::parseFilter(prox::testing::readText(corpusPath("recruitment.safe.property")),
                                      lang::Syntax::Full);
    auto r = verify(*engine, fixture, opts);
    EXPECT_EQ(r.status, VerificationResult::Status::Safe);
    EXPECT_TRUE(r.trace.empty());
    EXPECT_GT(r.statesExplored, 1u);
}

TEST(EngineVerify, ViolationTraceReplays) {
    auto [engine, fixture] = recruitment();
    VerifyOptions opts;
    opts.property = lang::parseFilter("finalDecision < 0.5", lang::Syntax::Full);
    auto r = verify(*engine, fixture, opts);
    ASSERT_EQ(r.status, VerificationResult::Status::Violated);
    auto end = replay(*engine, fixture, r.trace);
    EXPECT_EQ(end, *r.finalState);
    EXPECT_FALSE(holds(*opts.property, end));
}

TEST(EngineVerify, DeadlockFound) {
    auto [engine, fixture] = load("deadlock", "deadlock.fixture.yaml");
    auto r = verify(*engine, fixture, {});
    ASSERT_EQ(r.status, VerificationResult::Status::Deadlock);
    auto end = replay(*engine, fixture, r.trace);
    EXPECT_TRUE(engine->successors(end).empty());
    EXPECT_FALSE(engine->completed(end));
}

TEST(EngineVerify, Bounds) {
    auto [engine, fixture] = recruitment();
    VerifyOptions opts;
    opts.maxDepth = 0;
    EXPECT_THROW(verify(*engine, fixture, opts), Error);
    opts.maxDepth = 1;
    EXPECT_EQ(verify(*engine, fixture, opts).status, VerificationResult::Status::BoundExceeded);
}

TEST(EngineVerify, HoldsIgnoresUnsetVariables) {
    auto [engine, fixture] = recruitment();
    auto s0 = engine->initial(fixture);
    EXPECT_TRUE(holds(lang::parseFilter("finalScore > 100.0", lang::Syntax::Full), s0));
    EXPECT_FALSE(holds(lang::parseFilter("TUPLE('O-9') IN Offers.offerID", lang::Syntax::Full), s0));
}

TEST(EngineVerify, AgreesWithExhaustiveSearch) {
    Rng rng(43);
    for (int i = 0; i < 40; ++i) {
        auto c = prox::testing::smallCase(rng, i);
        auto [engine, fixture] = smallLoaded(c);
        VerifyOptions opts;
        opts.property = c.property;
        opts.maxDepth = 64;
        auto r = verify(*engine, fixture, opts);
        auto oracle = prox::testing::enumerate(*engine, fixture, c.property, 100000);
        ASSERT_NE(r.status, VerificationResult::Status::BoundExceeded) << c.modelYaml;
        bool bad = oracle.deadlock || oracle.violation;
        EXPECT_EQ(r.status != VerificationResult::Status::Safe, bad) << c.modelYaml;
        if (r.status == VerificationResult::Status::Safe) {
            EXPECT_EQ(r.statesExplored, oracle.states) << c.modelYaml;
        }
    }
}

TEST(EngineVerify, WorkerCountDoesNotMatter) {
    Rng rng(47);
    for (int i = 0; i < 20; ++i) {
        auto c = prox::testing::smallCase(rng, i);
        auto [engine, fixture] = smallLoaded(c);
        VerifyOptions one;
        one.property = c.property;
        auto four = one;
        four.workers = 4;
        auto a = verify(*engine, fixture, one);
        auto b = verify(*engine, fixture, four);
        EXPECT_EQ(a.status, b.status);
        EXPECT_EQ(a.trace, b.trace);
        EXPECT_EQ(a.statesExplored, b.statesExplored);
    }
}

TEST(EngineReplay, ReportsFirstBadStep) {
    auto [engine, fixture] = recruitment();
    auto run = runRandom(*engine, fixture, 3, 100);
    ASSERT_GE(run.trace.size(), 4u);
    auto broken = run.trace;
    std::swap(broken[2], broken[3]);
    try {
        replay(*engine, fixture, broken);
        FAIL() << "expected InvalidTrace";
    } catch (const InvalidTrace& e) {
        EXPECT_EQ(e.step(), 3u);
    }
}

TEST(EngineDocuments, TraceRoundTrip) {
    auto [engine, fixture] = recruitment();
    auto run = runRandom(*engine, fixture, 11, 100);
    auto text = saveTrace(run.trace);
    EXPECT_EQ(loadTrace(text), run.trace);
    EXPECT_EQ(loadTrace("status: violated\ntrace:\n" + text), run.trace);
    EXPECT_THROW(loadTrace("- {step: teleport, block: root}\n"), ParseError);
}

TEST(EngineDocuments, DomainSpec) {
    auto d = loadDomainSpec("a: 1\nb: [x, y]\n");
    EXPECT_EQ(d.at("a"), std::vector<std::string>{"1"});
    EXPECT_EQ(d.at("b"), (std::vector<std::string>{"x", "y"}));
    EXPECT_THROW(loadDomainSpec("a: []\n"), ParseError);
}
