#include "prox/cli/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "CLI11.hpp"

#include "prox/encoder/encoder.hpp"
#include "prox/engine/engine.hpp"
#include "prox/error.hpp"
#include "prox/lang/parser.hpp"
#include "prox/lang/printer.hpp"
#include "prox/model/io.hpp"
#include "prox/store/database.hpp"
#include "prox/testgen/testgen.hpp"
#include "prox/validator/validator.hpp"

namespace prox::cli {

namespace {

/// Failure already reported to the user; carries the exit status.
struct Exit {
    int status;
};

class Painter {
public:
    explicit Painter(bool enabled) : enabled_(enabled) {}
    std::string operator()(const std::string& text, const char* code) const {
        return enabled_ ? "\x1b[" + std::string(code) + "m" + text + "\x1b[0m" : text;
    }

private:
    bool enabled_;
};

std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void writeFile(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out || !(out << text) || !out.flush()) {
        throw Error("cannot write '" + path + "'");
    }
}

/// Runs `load` and prefixes parse positions with the file name.
template <typename F>
auto fromFile(const std::string& path, F load) {
    try {
        return load(path);
    } catch (const ParseError& e) {
        throw Error(path + ":" + e.what());
    }
}

std::string indent(const std::string& text, const std::string& pad = "  ") {
    std::string out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out += pad + line + "\n";
    }
    return out;
}

struct Context {
    std::ostream& out;
    std::ostream& err;
    Painter paint;

    model::ProcessModel validModel(const std::string& path) const {
        auto model = fromFile(path, [](const std::string& p) { return model::loadModelFile(p); });
        auto diagnostics = validator::validate(model);
        if (!diagnostics.empty()) {
            err << diagnosticText(diagnostics);
            err << path << ": model has " << diagnostics.size() << " diagnostic(s); not proceeding\n";
            throw Exit{kFindings};
        }
        return model;
    }

    std::string diagnosticText(const std::vector<validator::Diagnostic>& diagnostics) const {
        std::string text;
        for (const auto& d : diagnostics) {
            std::string line = validator::formatText({d});
            std::string code(validator::toString(d.code));
            text += paint(code, "31") + line.substr(code.size());
        }
        return text;
    }

    store::Database fixture(const model::ProcessModel& model, const std::string& path) const {
        if (path.empty()) {
            return store::Database(model.tables);
        }
        return fromFile(path, [&](const std::string& p) { return store::loadFixtureFile(model.tables, p); });
    }

    engine::DomainSpec domains(const std::string& path) const {
        if (path.empty()) {
            return {};
        }
        return fromFile(path, [](const std::string& p) { return engine::loadDomainSpecFile(p); });
    }
};

struct ValidateArgs {
    std::string model;
    std::string format = "text";
};

int cmdValidate(const Context& cx, const ValidateArgs& a) {
    auto model = fromFile(a.model, [](const std::string& p) { return model::loadModelFile(p); });
    auto diagnostics = validator::validate(model);
    if (a.format == "structured") {
        cx.out << validator::formatStructured(diagnostics);
    } else {
        cx.out << cx.diagnosticText(diagnostics);
    }
    return diagnostics.empty() ? kOk : kFindings;
}

struct EncodeArgs {
    std::string model;
    std::string out;
};

int cmdEncode(const Context& cx, const EncodeArgs& a) {
    auto model = cx.validModel(a.model);
    std::string doc = encoder::saveEncoding(model.name, encoder::encodeProcess(model));
    if (a.out.empty()) {
        cx.out << doc;
    } else {
        writeFile(a.out, doc);
    }
    return kOk;
}

struct RunArgs {
    std::string model;
    std::string fixture;
    std::string domains;
    std::optional<std::uint64_t> seed;
    std::string script;
    std::size_t maxSteps = 1000;
};

int cmdRun(const Context& cx, const RunArgs& a) {
    auto model = cx.validModel(a.model);
    auto db = cx.fixture(model, a.fixture);
    engine::Engine engine(std::move(model), cx.domains(a.domains), true);
    engine::RunResult result;
    if (!a.script.empty()) {
        std::vector<std::size_t> script = fromFile(a.script, [](const std::string& p) {
            YAML::Node doc;
            try {
                doc = YAML::Load(readFile(p));
            } catch (const YAML::ParserException& e) {
                throw ParseError(e.mark.line + 1, e.mark.column + 1, e.msg);
            }
            std::vector<std::size_t> picks;
            if (!doc.IsSequence()) {
                throw ParseError(1, 1, "a script is a list of successor indices");
            }
            for (const auto& n : doc) {
                try {
                    picks.push_back(n.as<std::size_t>());
                } catch (const YAML::Exception&) {
                    throw ParseError(n.Mark().line + 1, n.Mark().column + 1, "expected a non-negative integer");
                }
            }
            return picks;
        });
        result = engine::runScript(engine, db, script, a.maxSteps);
    } else {
        result = engine::runRandom(engine, db, a.seed.value_or(0), a.maxSteps);
    }
    cx.out << "trace:\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        cx.out << "  " << i + 1 << ". " << result.trace[i].str() << "\n";
    }
    bool done = result.status == engine::RunResult::Status::Completed;
    cx.out << "status: " << cx.paint(std::string(engine::toString(result.status)), done ? "32" : "31") << "\n";
    cx.out << "final state:\n" << indent(engine::describeState(engine, result.final));
    return done ? kOk : kFindings;
}

struct VerifyArgs {
    std::string model;
    std::string fixture;
    std::string domains;
    std::string property;
    std::size_t maxDepth = 32;
    unsigned workers = 1;
    bool strict = false;
};

int cmdVerify(const Context& cx, const VerifyArgs& a) {
    auto model = cx.validModel(a.model);
    auto db = cx.fixture(model, a.fixture);
    engine::VerifyOptions options;
    options.maxDepth = a.maxDepth;
    options.workers = a.workers;
    if (!a.property.empty()) {
        options.property = fromFile(a.property, [](const std::string& p) {
            return lang::parseFilter(readFile(p), lang::Syntax::Full);
        });
    }
    engine::Engine engine(std::move(model), cx.domains(a.domains), true);
    auto result = engine::verify(engine, db, options);
    using S = engine::VerificationResult::Status;
    bool safe = result.status == S::Safe;
    cx.out << "status: " << cx.paint(std::string(engine::toString(result.status)), safe ? "32" : "31") << "\n";
    cx.out << "statesExplored: " << result.statesExplored << "\n";
    if (options.property) {
        cx.out << "property: \"" << lang::toString(*options.property) << "\"\n";
    }
    if (result.status == S::Violated || result.status == S::Deadlock) {
        cx.out << "trace:\n" << engine::saveTrace(result.trace);
        return kFindings;
    }
    if (result.status == S::BoundExceeded) {
        return a.strict ? kFailure : kOk;
    }
    return kOk;
}

struct TestgenArgs {
    std::string model;
    std::string predicate;
    std::string ranges;
    std::string cases;
    double epsilon = 0.1;
    std::string format = "table";
};

int cmdTestgen(const Context& cx, const TestgenArgs& a) {
    if (a.model.empty() == a.predicate.empty()) {
        throw CLI::ValidationError("testgen needs exactly one of a model file or --predicate");
    }
    testgen::Ranges ranges;
    if (!a.ranges.empty()) {
        ranges = fromFile(a.ranges, [](const std::string& p) { return testgen::loadRangesFile(p); });
    }
    std::vector<testgen::Case> cases;
    if (!a.cases.empty()) {
        cases = fromFile(a.cases, [](const std::string& p) { return testgen::loadCasesFile(p); });
    }
    auto format = a.format == "script" ? testgen::Format::Script : testgen::Format::Table;
    if (!a.predicate.empty()) {
        auto predicate = lang::parseCondition(a.predicate);
        cx.out << testgen::renderVectors(testgen::generateVectors(predicate, ranges, a.epsilon, cases), format);
        return kOk;
    }
    auto model = cx.validModel(a.model);
    std::vector<std::pair<std::string, const model::Block*>> stack{{"root", &model.root}};
    bool any = false;
    while (!stack.empty()) {
        auto [path, block] = stack.back();
        stack.pop_back();
        if (const auto* choice = std::get_if<model::ExclusiveChoice>(&block->node)) {
            cx.out << (any ? "\n" : "") << "# " << path << ": " << lang::toString(choice->guard) << "\n";
            cx.out << testgen::renderVectors(testgen::generateVectors(choice->guard, ranges, a.epsilon, cases),
                                             format);
            any = true;
        }
        const auto& children = block->children();
        for (std::size_t i = children.size(); i-- > 0;) {
            stack.emplace_back(path + "." + std::to_string(i), &children[i]);
        }
    }
    if (!any) {
        cx.err << a.model << ": no exclusive-choice guards\n";
    }
    return kOk;
}

struct ReplayArgs {
    std::string model;
    std::string fixture;
    std::string domains;
    std::string trace;
};

int cmdReplay(const Context& cx, const ReplayArgs& a) {
    auto model = cx.validModel(a.model);
    auto db = cx.fixture(model, a.fixture);
    auto trace = fromFile(a.trace, [](const std::string& p) { return engine::loadTrace(readFile(p)); });
    engine::Engine engine(std::move(model), cx.domains(a.domains), true);
    engine::GlobalState state;
    try {
        state = engine::replay(engine, db, trace);
    } catch (const InvalidTrace& e) {
        cx.err << a.trace << ": " << e.what() << "\n";
        cx.out << "certified: " << cx.paint("no", "31") << "\n";
        return kFindings;
    }
    cx.out << "certified: " << cx.paint("yes", "32") << "\n";
    cx.out << "steps: " << trace.size() << "\n";
    cx.out << "completed: " << (engine.completed(state) ? "true" : "false") << "\n";
    cx.out << "final state:\n" << indent(engine::describeState(engine, state));
    return kOk;
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool terminal) {
    const char* color = std::getenv("PROX_COLOR");
    Context cx{out, err, Painter(terminal && !(color != nullptr && std::string(color) == "0"))};

    CLI::App app{"Process models with data: validate, encode, simulate, verify, generate tests", "prox"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    ValidateArgs validate;
    auto* v = app.add_subcommand("validate", "Check the structural constraints of a model");
    v->add_option("model", validate.model, "Model file")->required();
    v->add_option("--format", validate.format, "Report format")->check(CLI::IsMember({"text", "structured"}));

    EncodeArgs encode;
    auto* e = app.add_subcommand("encode", "Write the precondition/effect encoding of a valid model");
    e->add_option("model", encode.model, "Model file")->required();
    e->add_option("--out", encode.out, "Output file (default: standard output)");

    RunArgs run;
    auto* r = app.add_subcommand("run", "Simulate one execution");
    r->add_option("model", run.model, "Model file")->required();
    r->add_option("--fixture", run.fixture, "Initial table contents");
    r->add_option("--domains", run.domains, "Values offered for user inputs");
    auto* seed = r->add_option("--seed", run.seed, "Seed of the random policy");
    r->add_option("--script", run.script, "List of successor indices to take")->excludes(seed);
    r->add_option("--max-steps", run.maxSteps, "Step limit")->check(CLI::PositiveNumber);

    VerifyArgs verify;
    auto* f = app.add_subcommand("verify", "Explore every execution up to a depth bound");
    f->add_option("model", verify.model, "Model file")->required();
    f->add_option("--fixture", verify.fixture, "Initial table contents");
    f->add_option("--domains", verify.domains, "Values offered for user inputs");
    f->add_option("--property", verify.property, "File holding a safety property");
    f->add_option("--max-depth", verify.maxDepth, "Depth bound")->check(CLI::PositiveNumber);
    f->add_option("--workers", verify.workers, "Expansion threads")->check(CLI::PositiveNumber);
    f->add_flag("--strict", verify.strict, "Exit 2 when the bound is exceeded");

    TestgenArgs tg;
    auto* t = app.add_subcommand("testgen", "Boundary-value vectors for a predicate or a model's guards");
    t->add_option("model", tg.model, "Model file");
    t->add_option("--predicate", tg.predicate, "Condition text");
    t->add_option("--domains", tg.ranges, "Numeric range per variable");
    t->add_option("--epsilon", tg.epsilon, "Step around thresholds")->check(CLI::PositiveNumber);
    t->add_option("--format", tg.format, "Output format")->check(CLI::IsMember({"table", "script"}));
    t->add_option("--cases", tg.cases, "Additional hand-written vectors");

    ReplayArgs replay;
    auto* p = app.add_subcommand("replay", "Re-execute a trace and report whether it is legal");
    p->add_option("model", replay.model, "Model file")->required();
    p->add_option("--fixture", replay.fixture, "Initial table contents");
    p->add_option("--domains", replay.domains, "Values offered for user inputs");
    p->add_option("--trace", replay.trace, "Trace or verify report")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (v->parsed()) return cmdValidate(cx, validate);
        if (e->parsed()) return cmdEncode(cx, encode);
        if (r->parsed()) return cmdRun(cx, run);
        if (f->parsed()) return cmdVerify(cx, verify);
        if (t->parsed()) return cmdTestgen(cx, tg);
        if (p->parsed()) return cmdReplay(cx, replay);
        return kFailure;
    } catch (const CLI::Success& s) {
        app.exit(s, out, err);
        return kOk;
    } catch (const CLI::ParseError& pe) {
        app.exit(pe, out, err);
        return kFailure;
    } catch (const Exit& x) {
        return x.status;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kFailure;
    }
}

}  // namespace prox::cli
