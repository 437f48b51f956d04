#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "prox/error.hpp"
#include "prox/lang/eval.hpp"
#include "prox/lang/parser.hpp"
#include "prox/testgen/testgen.hpp"
#include "support.hpp"

using namespace prox;
using namespace prox::testgen;
using prox::testing::corpusPath;
using prox::testing::Rng;

namespace {

const char* kScoring = "technicalScore > 3.5 AND culturalFit + teamCollaboration + finalEvaluation >= 11";

double num(const lang::Binding& b, const std::string& name) {
    const auto& v = b.at(name);
    return std::holds_alternative<double>(v) ? std::get<double>(v) : static_cast<double>(std::get<std::int64_t>(v));
}

std::vector<double> valuesOf(const Generation& g, const std::string& name) {
    std::vector<double> out;
    for (const auto& v : g.vectors) {
        out.push_back(num(v.inputs, name));
    }
    return out;
}

bool contains(const std::vector<double>& values, double x) {
    return std::any_of(values.begin(), values.end(), [&](double v) { return std::abs(v - x) < 1e-9; });
}

std::size_t lineCount(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST(Testgen, TruePredicateGivesOneVector) {
    auto g = generateVectors(lang::trueConst(), {}, 0.1);
    ASSERT_EQ(g.vectors.size(), 1u);
    EXPECT_TRUE(g.vectors[0].expected);
    EXPECT_EQ(renderVectors(g, Format::Table), "|| expected\n|| true\n");
}

TEST(Testgen, TwoVariableExample) {
    auto p = lang::parseCondition("x > 3.5 AND y >= 11");
    auto g = generateVectors(p, {{"x", {0, 20}}, {"y", {0, 20}}}, 0.1);
    for (double x : {3.4, 3.5, 3.6}) {
        EXPECT_TRUE(contains(valuesOf(g, "x"), x)) << x;
    }
    for (double y : {10.9, 11.0, 11.1}) {
        EXPECT_TRUE(contains(valuesOf(g, "y"), y)) << y;
    }
    EXPECT_TRUE(g.vectors[0].expected);
    EXPECT_FALSE(g.vectors[1].expected);
}

TEST(Testgen, ExpectedAlwaysMatchesEvaluation) {
    Rng rng(53);
    std::vector<std::string> vars{"a", "b", "c"};
    for (int i = 0; i < 100; ++i) {
        auto p = prox::testing::surfaceCondition(rng, vars, 4);
        Ranges ranges{{"a", {0, 5}}, {"b", {-3, 3}}, {"c", {0, 10}}};
        auto g = generateVectors(p, ranges, 0.5);
        for (const auto& v : g.vectors) {
            EXPECT_EQ(v.expected, lang::evalCondition(p, v.inputs)) << v.rationale;
        }
        EXPECT_EQ(g.vectors, generateVectors(p, ranges, 0.5).vectors) << "deterministic";
    }
}

TEST(Testgen, SingleVariableThresholdIsHitExactly) {
    Rng rng(59);
    for (int i = 0; i < 50; ++i) {
        double t = rng.uniform(1, 9) + 0.5;
        auto op = std::vector<const char*>{">", "<", ">=", "<="}[static_cast<std::size_t>(rng.uniform(0, 3))];
        auto p = lang::parseCondition("v " + std::string(op) + " " + std::to_string(t));
        auto g = generateVectors(p, {{"v", {0, 10}}}, 0.25);
        EXPECT_TRUE(contains(valuesOf(g, "v"), t)) << lang::evalCondition(p, {{"v", t}});
    }
}

TEST(Testgen, Deduplicates) {
    auto g = generateVectors(lang::parseCondition("x > 1 AND x > 1"), {{"x", {0, 5}}}, 0.1);
    auto xs = valuesOf(g, "x");
    auto sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
}

TEST(Testgen, NoWitness) {
    auto g = generateVectors(lang::parseCondition("x > 100"), {{"x", {0, 5}}}, 0.1);
    EXPECT_TRUE(g.noWitness);
    for (const auto& v : g.vectors) {
        EXPECT_FALSE(v.expected);
    }
}

TEST(Testgen, InputErrors) {
    auto p = lang::parseCondition("x > 1 AND y < 2");
    EXPECT_THROW(generateVectors(p, {{"x", {0, 5}}}, 0.1), Error);
    EXPECT_THROW(generateVectors(p, {{"x", {0, 5}}, {"y", {0, 5}}}, 0.0), Error);
}

TEST(Testgen, ScoringRule) {
    auto p = lang::parseCondition(kScoring);
    auto ranges = loadRangesFile(corpusPath("scoring.ranges.yaml"));
    auto cases = loadCasesFile(corpusPath("scoring.cases.yaml"));
    ASSERT_EQ(cases.size(), 10u);
    auto g = generateVectors(p, ranges, 0.1, cases);
    EXPECT_EQ(g.variables,
              (std::vector<std::string>{"technicalScore", "culturalFit", "teamCollaboration", "finalEvaluation"}));
    bool onThreshold = false;
    for (const auto& v : g.vectors) {
        if (std::abs(num(v.inputs, "technicalScore") - 3.5) < 1e-12) {
            onThreshold = true;
            EXPECT_FALSE(v.expected);
        }
    }
    EXPECT_TRUE(onThreshold);
    auto divergent = std::count_if(g.notes.begin(), g.notes.end(),
                                   [](const std::string& n) { return n.find("claims true") != std::string::npos; });
    EXPECT_EQ(divergent, 2);
    auto table = renderVectors(g, Format::Table);
    EXPECT_NE(table.find("3.9 | 3.0 | 3.5 | 4.0 || false"), std::string::npos);
    EXPECT_NE(table.find("4.0 | 2.0 | 2.0 | 6.5 || false"), std::string::npos);
    EXPECT_NE(table.find("3.5 | 5.0 | 4.0 | 4.0 || false"), std::string::npos);
}

TEST(Testgen, TableShape) {
    auto g = generateVectors(lang::parseCondition("x > 3.5 AND y >= 11"), {{"x", {0, 20}}, {"y", {0, 20}}}, 0.1);
    auto table = renderVectors(g, Format::Table);
    EXPECT_EQ(table.substr(0, table.find('\n')), "x | y || expected");
    EXPECT_EQ(lineCount(table), g.vectors.size() + 1);
    Generation empty;
    empty.variables = {"x"};
    EXPECT_EQ(renderVectors(empty, Format::Table), "x || expected\n");
}

TEST(Testgen, TableRowsReevaluate) {
    auto p = lang::parseCondition(kScoring);
    auto g = generateVectors(p, loadRangesFile(corpusPath("scoring.ranges.yaml")), 0.1);
    auto table = renderVectors(g, Format::Table);
    std::istringstream in(table);
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.rfind("#", 0) == 0) {
            continue;
        }
        auto split = line.find(" || ");
        ASSERT_NE(split, std::string::npos) << line;
        lang::Binding b;
        std::istringstream cells(line.substr(0, split));
        std::string cell;
        std::size_t col = 0;
        while (std::getline(cells, cell, '|')) {
            b[g.variables.at(col++)] = std::stod(cell);
        }
        EXPECT_EQ(line.substr(split + 4), lang::evalCondition(p, b) ? "true" : "false") << line;
        ++rows;
    }
    EXPECT_EQ(rows, g.vectors.size());
}

TEST(Testgen, ScriptFormat) {
    auto g = generateVectors(lang::parseCondition("x > 1"), {{"x", {0, 5}}}, 0.5);
    auto script = renderVectors(g, Format::Script);
    EXPECT_EQ(lineCount(script), g.vectors.size());
    EXPECT_NE(script.find("expect x=1.0 -> false"), std::string::npos) << script;
}

TEST(Testgen, RangesAndCasesDocuments) {
    EXPECT_EQ(loadRanges("a: [0, 2.5]\n").at("a"), (Range{0, 2.5}));
    EXPECT_THROW(loadRanges("a: [3, 1]\n"), ParseError);
    EXPECT_THROW(loadRanges("a: 4\n"), ParseError);
    auto cases = loadCases("- {values: {a: 1}, claimed: false, label: one}\n");
    ASSERT_EQ(cases.size(), 1u);
    EXPECT_EQ(cases[0].claimed, false);
    EXPECT_EQ(cases[0].label, "one");
}
