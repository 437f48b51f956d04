#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "prox/engine/engine.hpp"
#include "prox/error.hpp"
#include "prox/lang/parser.hpp"

namespace prox::engine {

namespace {

ParseError at(const YAML::Node& node, const std::string& message) {
    const auto& mark = node.Mark();
    return ParseError(static_cast<std::size_t>(mark.line + 1), static_cast<std::size_t>(mark.column + 1), message);
}

YAML::Node parseDocument(std::string_view text) {
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ParseError(static_cast<std::size_t>(e.mark.line + 1), static_cast<std::size_t>(e.mark.column + 1),
                         e.msg);
    }
}

std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emitBinding(YAML::Emitter& out, const char* key, const lang::Binding& binding) {
    if (binding.empty()) {
        return;
    }
    out << YAML::Key << key << YAML::Value << YAML::BeginMap;
    for (const auto& [name, value] : binding) {
        out << YAML::Key << name << YAML::Value << toLiteral(value);
    }
    out << YAML::EndMap;
}

lang::Binding readBinding(const YAML::Node& node) {
    lang::Binding out;
    if (!node) {
        return out;
    }
    if (!node.IsMap()) {
        throw at(node, "expected a mapping from names to literals");
    }
    for (const auto& kv : node) {
        try {
            out.emplace(kv.first.as<std::string>(), lang::parseLiteral(kv.second.as<std::string>()));
        } catch (const ParseError& e) {
            throw at(kv.second, e.what());
        } catch (const YAML::Exception&) {
            throw at(kv.second, "expected a scalar literal");
        }
    }
    return out;
}

}  // namespace

DomainSpec loadDomainSpec(std::string_view document) {
    YAML::Node doc = parseDocument(document);
    DomainSpec out;
    if (!doc || doc.IsNull()) {
        return out;
    }
    if (!doc.IsMap()) {
        throw at(doc, "domains must be a mapping from input names to value lists");
    }
    for (const auto& kv : doc) {
        std::vector<std::string> values;
        if (kv.second.IsScalar()) {
            values.push_back(kv.second.Scalar());
        } else if (kv.second.IsSequence()) {
            for (const auto& v : kv.second) {
                if (!v.IsScalar()) {
                    throw at(v, "domain values must be scalars");
                }
                values.push_back(v.Scalar());
            }
        } else {
            throw at(kv.second, "expected a list of values");
        }
        if (values.empty()) {
            throw at(kv.second, "domain of '" + kv.first.Scalar() + "' is empty");
        }
        out.emplace(kv.first.Scalar(), std::move(values));
    }
    return out;
}

DomainSpec loadDomainSpecFile(const std::string& path) { return loadDomainSpec(readFile(path)); }

std::string saveTrace(const std::vector<Transition>& trace) {
    YAML::Emitter out;
    out << YAML::BeginSeq;
    for (const auto& t : trace) {
        out << YAML::BeginMap;
        switch (t.kind) {
        case Transition::Kind::EnableBlock:
            out << YAML::Key << "step" << YAML::Value << "enable" << YAML::Key << "block" << YAML::Value << t.target;
            break;
        case Transition::Kind::CompleteBlock:
            out << YAML::Key << "step" << YAML::Value << "complete" << YAML::Key << "block" << YAML::Value
                << t.target;
            break;
        case Transition::Kind::ResolveChoice:
            out << YAML::Key << "step" << YAML::Value << "resolve" << YAML::Key << "block" << YAML::Value << t.target
                << YAML::Key << "branch" << YAML::Value << t.branch;
            break;
        case Transition::Kind::FireTask:
            out << YAML::Key << "step" << YAML::Value << "fire" << YAML::Key << "task" << YAML::Value << t.target;
            emitBinding(out, "inputs", t.inputs);
            emitBinding(out, "answer", t.answer);
            break;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    return std::string(out.c_str()) + "\n";
}

std::vector<Transition> loadTrace(std::string_view document) {
    YAML::Node doc = parseDocument(document);
    std::vector<Transition> out;
    if (!doc || doc.IsNull()) {
        return out;
    }
    if (doc.IsMap() && doc["trace"]) {
        YAML::Node inner = doc["trace"];
        doc.reset(inner);
    }
    if (!doc.IsSequence()) {
        throw at(doc, "a trace is a list of steps");
    }
    for (const auto& rec : doc) {
        if (!rec.IsMap() || !rec["step"]) {
            throw at(rec, "each trace step needs a 'step' key");
        }
        std::string step = rec["step"].as<std::string>();
        Transition t;
        auto field = [&](const char* key) {
            if (!rec[key] || !rec[key].IsScalar()) {
                throw at(rec, "'" + step + "' step needs '" + key + "'");
            }
            return rec[key].as<std::string>();
        };
        if (step == "enable") {
            t.kind = Transition::Kind::EnableBlock;
            t.target = field("block");
        } else if (step == "complete") {
            t.kind = Transition::Kind::CompleteBlock;
            t.target = field("block");
        } else if (step == "resolve") {
            t.kind = Transition::Kind::ResolveChoice;
            t.target = field("block");
            std::string branch = field("branch");
            if (branch != "0" && branch != "1") {
                throw at(rec["branch"], "branch must be 0 or 1");
            }
            t.branch = branch == "0" ? 0 : 1;
        } else if (step == "fire") {
            t.kind = Transition::Kind::FireTask;
            t.target = field("task");
            t.inputs = readBinding(rec["inputs"]);
            t.answer = readBinding(rec["answer"]);
        } else {
            throw at(rec["step"], "unknown step kind '" + step + "'");
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::string describeState(const Engine& engine, const GlobalState& state) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "blocks" << YAML::Value << YAML::BeginMap;
    for (std::size_t b = 0; b < engine.blocks().size(); ++b) {
        const auto& info = engine.blocks()[b];
        std::string label(toString(state.lifecycle[b]));
        if (const auto* task = std::get_if<model::Task>(&info.block->node)) {
            label += " (" + task->id + ")";
        }
        out << YAML::Key << info.path << YAML::Value << label;
    }
    out << YAML::EndMap;
    out << YAML::Key << "variables" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, value] : state.variables) {
        out << YAML::Key << name << YAML::Value;
        if (value) {
            out << toLiteral(*value);
        } else {
            out << YAML::Null;
        }
    }
    out << YAML::EndMap;
    out << YAML::Key << "database" << YAML::Value << YAML::Load(store::dumpFixture(state.db));
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace prox::engine
