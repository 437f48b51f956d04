#include "prox/testgen/testgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "prox/error.hpp"
#include "prox/lang/printer.hpp"

namespace prox::testgen {

namespace {

constexpr int kGridPoints = 11;

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

double number(const YAML::Node& node) {
    if (!node.IsScalar()) {
        throw at(node, "expected a number");
    }
    auto v = parseScalar(node.Scalar(), PrimitiveType::Double);
    if (!v) {
        throw at(node, "'" + node.Scalar() + "' is not a number");
    }
    return std::get<double>(*v);
}

double snap(double x) {
    double r = std::round(x * 1e9) / 1e9;
    return r == 0.0 ? 0.0 : r;
}

/// sum(coef[v] * v) + constant
struct Affine {
    std::map<std::string, double> coef;
    double constant = 0.0;
};

std::optional<double> numericConstant(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        return static_cast<double>(*i);
    }
    if (const auto* d = std::get_if<double>(&v)) {
        return *d;
    }
    return std::nullopt;
}

std::optional<Affine> affine(const lang::Term& term) {
    return std::visit(
        [](const auto& n) -> std::optional<Affine> {
            using T = std::decay_t<decltype(n)>;
            Affine out;
            if constexpr (std::is_same_v<T, lang::Constant>) {
                auto c = numericConstant(n.value);
                if (!c) {
                    return std::nullopt;
                }
                out.constant = *c;
            } else if constexpr (std::is_same_v<T, lang::Variable>) {
                out.coef[n.name] = 1.0;
            } else if constexpr (std::is_same_v<T, lang::AttributeRef>) {
                out.coef[n.key()] = 1.0;
            } else {
                auto l = affine(*n.lhs);
                auto r = affine(*n.rhs);
                if (!l || !r) {
                    return std::nullopt;
                }
                auto scaled = [](Affine a, double k) {
                    for (auto& [_, c] : a.coef) {
                        c *= k;
                    }
                    a.constant *= k;
                    return a;
                };
                switch (n.op) {
                case lang::ArithOp::Add:
                case lang::ArithOp::Sub: {
                    double sign = n.op == lang::ArithOp::Add ? 1.0 : -1.0;
                    out = *l;
                    for (const auto& [v, c] : r->coef) {
                        out.coef[v] += sign * c;
                    }
                    out.constant += sign * r->constant;
                    break;
                }
                case lang::ArithOp::Mul:
                    if (l->coef.empty()) {
                        out = scaled(*r, l->constant);
                    } else if (r->coef.empty()) {
                        out = scaled(*l, r->constant);
                    } else {
                        return std::nullopt;
                    }
                    break;
                case lang::ArithOp::Div:
                    if (!r->coef.empty() || r->constant == 0.0) {
                        return std::nullopt;
                    }
                    out = scaled(*l, 1.0 / r->constant);
                    break;
                }
            }
            return out;
        },
        term.node);
}

void collectAtoms(const lang::ConditionExpr& expr, std::vector<const lang::Atom*>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, lang::Atom>) {
                out.push_back(&n);
            } else if constexpr (std::is_same_v<T, lang::Conjunction> || std::is_same_v<T, lang::Disjunction>) {
                for (const auto& o : n.operands) {
                    collectAtoms(o, out);
                }
            }
        },
        expr.node);
}

lang::Binding pointBinding(const std::vector<std::string>& vars, const std::vector<double>& point) {
    lang::Binding b;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        b.emplace(vars[i], point[i]);
    }
    return b;
}

std::optional<bool> evaluate(const lang::ConditionExpr& predicate, const lang::Binding& b) {
    try {
        return lang::evalCondition(predicate, b);
    } catch (const EvaluationError&) {
        return std::nullopt;
    }
}

struct Witnesses {
    std::optional<std::vector<double>> satisfying;
    std::optional<std::vector<double>> violating;
};

/// Lexicographic walk over the per-axis points, first variable outermost.
Witnesses search(const lang::ConditionExpr& predicate, const std::vector<std::string>& vars,
                 const std::vector<std::vector<double>>& axes) {
    Witnesses w;
    std::vector<std::size_t> idx(vars.size(), 0);
    std::vector<double> point(vars.size());
    while (true) {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            point[i] = axes[i][idx[i]];
        }
        if (auto v = evaluate(predicate, pointBinding(vars, point))) {
            auto& slot = *v ? w.satisfying : w.violating;
            if (!slot) {
                slot = point;
            }
        }
        if (w.satisfying && w.violating) {
            return w;
        }
        std::size_t k = vars.size();
        while (k > 0 && ++idx[k - 1] == axes[k - 1].size()) {
            idx[k - 1] = 0;
            --k;
        }
        if (k == 0) {
            return w;
        }
    }
}

std::string render(const std::vector<std::string>& vars, const std::vector<double>& point) {
    std::string out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        out += (i ? ", " : "") + vars[i] + " = " + formatDouble(point[i]);
    }
    return out;
}

}  // namespace

Ranges loadRanges(std::string_view document) {
    YAML::Node doc = parseDocument(document);
    Ranges out;
    if (!doc || doc.IsNull()) {
        return out;
    }
    if (!doc.IsMap()) {
        throw at(doc, "ranges must map variable names to [lo, hi]");
    }
    for (const auto& kv : doc) {
        if (!kv.second.IsSequence() || kv.second.size() != 2) {
            throw at(kv.second, "range of '" + kv.first.Scalar() + "' must be [lo, hi]");
        }
        Range r{number(kv.second[0]), number(kv.second[1])};
        if (r.lo > r.hi) {
            throw at(kv.second, "range of '" + kv.first.Scalar() + "' is empty");
        }
        out.emplace(kv.first.Scalar(), r);
    }
    return out;
}

Ranges loadRangesFile(const std::string& path) { return loadRanges(readFile(path)); }

std::vector<Case> loadCases(std::string_view document) {
    YAML::Node doc = parseDocument(document);
    std::vector<Case> out;
    if (!doc || doc.IsNull()) {
        return out;
    }
    if (!doc.IsSequence()) {
        throw at(doc, "cases must be a list");
    }
    for (const auto& item : doc) {
        if (!item.IsMap() || !item["values"] || !item["values"].IsMap()) {
            throw at(item, "each case needs a 'values' mapping");
        }
        Case c;
        for (const auto& kv : item["values"]) {
            c.inputs.emplace(kv.first.Scalar(), number(kv.second));
        }
        if (const auto claimed = item["claimed"]) {
            if (claimed.Scalar() != "true" && claimed.Scalar() != "false") {
                throw at(claimed, "'claimed' must be true or false");
            }
            c.claimed = claimed.Scalar() == "true";
        }
        if (const auto label = item["label"]) {
            c.label = label.Scalar();
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Case> loadCasesFile(const std::string& path) { return loadCases(readFile(path)); }

Generation generateVectors(const lang::ConditionExpr& predicate, const Ranges& ranges, double epsilon,
                           const std::vector<Case>& cases) {
    if (!(epsilon > 0.0)) {
        throw Error("epsilon must be positive");
    }
    Generation gen;
    gen.variables = lang::freeNames(predicate);
    const auto& vars = gen.variables;
    std::vector<Range> bounds;
    for (const auto& v : vars) {
        auto it = ranges.find(v);
        if (it == ranges.end()) {
            throw Error("no range for variable '" + v + "'");
        }
        bounds.push_back(it->second);
    }

    std::vector<const lang::Atom*> atoms;
    collectAtoms(predicate, atoms);
    std::vector<std::optional<Affine>> forms;
    for (const auto* a : atoms) {
        auto l = affine(a->lhs);
        auto r = affine(a->rhs);
        if (l && r) {
            for (const auto& [v, c] : r->coef) {
                l->coef[v] -= c;
            }
            l->constant -= r->constant;
            std::erase_if(l->coef, [](const auto& kv) { return kv.second == 0.0; });
            forms.push_back(std::move(*l));
        } else {
            forms.push_back(std::nullopt);
        }
    }

    std::vector<std::vector<double>> axes;
    for (const auto& r : bounds) {
        std::vector<double> axis;
        for (int i = 0; i < kGridPoints; ++i) {
            axis.push_back(snap(r.lo + (r.hi - r.lo) * i / (kGridPoints - 1)));
        }
        axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
        axes.push_back(std::move(axis));
    }
    Witnesses w = search(predicate, vars, axes);
    if (!w.satisfying || !w.violating) {
        // Refine once: add the thresholds of single-variable atoms.
        for (const auto& f : forms) {
            if (!f || f->coef.size() != 1) {
                continue;
            }
            const auto& [name, c] = *f->coef.begin();
            std::size_t i = std::find(vars.begin(), vars.end(), name) - vars.begin();
            double t = snap(-f->constant / c);
            for (double p : {t - epsilon, t, t + epsilon}) {
                p = snap(p);
                if (p >= bounds[i].lo && p <= bounds[i].hi) {
                    axes[i].push_back(p);
                }
            }
            std::sort(axes[i].begin(), axes[i].end());
            axes[i].erase(std::unique(axes[i].begin(), axes[i].end()), axes[i].end());
        }
        w = search(predicate, vars, axes);
    }
    gen.noWitness = !w.satisfying.has_value();

    auto add = [&](const std::vector<double>& point, std::string rationale) {
        lang::Binding b = pointBinding(vars, point);
        bool seen = std::any_of(gen.vectors.begin(), gen.vectors.end(),
                                [&](const TestVector& t) { return t.inputs == b; });
        if (seen) {
            return;
        }
        auto expected = evaluate(predicate, b);
        if (!expected) {
            gen.notes.push_back("skipped " + render(vars, point) + ": predicate is undefined there");
            return;
        }
        gen.vectors.push_back(TestVector{std::move(b), *expected, std::move(rationale)});
    };

    if (w.satisfying) {
        add(*w.satisfying, "satisfying witness");
    } else {
        gen.notes.push_back("no satisfying assignment found over the ranges");
    }
    if (w.violating) {
        add(*w.violating, "violating witness");
    }
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        std::string atomText = lang::toString(lang::ConditionExpr{*atoms[a]});
        if (!forms[a]) {
            gen.notes.push_back("atom '" + atomText + "' is not affine; no threshold");
            continue;
        }
        for (const auto& [name, c] : forms[a]->coef) {
            std::size_t i = std::find(vars.begin(), vars.end(), name) - vars.begin();
            for (const auto* witness : {&w.satisfying, &w.violating}) {
                if (!*witness) {
                    continue;
                }
                const char* which = witness == &w.satisfying ? "satisfying" : "violating";
                std::vector<double> point = **witness;
                double rest = forms[a]->constant;
                for (const auto& [other, k] : forms[a]->coef) {
                    if (other != name) {
                        std::size_t j = std::find(vars.begin(), vars.end(), other) - vars.begin();
                        rest += k * point[j];
                    }
                }
                double t = snap(-rest / c);
                if (t < bounds[i].lo || t > bounds[i].hi) {
                    gen.notes.push_back("threshold " + name + " = " + formatDouble(t) + " of '" + atomText +
                                        "' at the " + which + " witness is outside the range");
                    continue;
                }
                std::string base = "'" + atomText + "' boundary on " + name + " at " + which + " witness";
                point[i] = t;
                add(point, base);
                point[i] = snap(t - epsilon);
                add(point, base + ", -epsilon");
                point[i] = snap(t + epsilon);
                add(point, base + ", +epsilon");
            }
        }
    }

    for (std::size_t k = 0; k < cases.size(); ++k) {
        const Case& c = cases[k];
        std::string label = c.label.empty() ? "case " + std::to_string(k + 1) : c.label;
        std::vector<double> point;
        for (const auto& v : vars) {
            auto it = c.inputs.find(v);
            if (it == c.inputs.end()) {
                throw Error(label + ": no value for '" + v + "'");
            }
            point.push_back(std::get<double>(*coerce(it->second, PrimitiveType::Double)));
        }
        lang::Binding b = pointBinding(vars, point);
        auto expected = evaluate(predicate, b);
        if (!expected) {
            throw Error(label + ": predicate is undefined at " + render(vars, point));
        }
        std::string rationale = "user " + label;
        if (c.claimed && *c.claimed != *expected) {
            rationale += " (claimed " + std::string(*c.claimed ? "true" : "false") + ")";
            gen.notes.push_back(label + " claims " + (*c.claimed ? "true" : "false") + " but the predicate gives " +
                                (*expected ? "true" : "false") + " at " + render(vars, point));
        }
        gen.vectors.push_back(TestVector{std::move(b), *expected, std::move(rationale)});
    }
    return gen;
}

std::string renderVectors(const Generation& generation, Format format) {
    const auto& vars = generation.variables;
    auto value = [](const lang::Binding& b, const std::string& v) { return formatDouble(std::get<double>(b.at(v))); };
    std::string out;
    if (format == Format::Table) {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            out += (i ? " | " : "") + vars[i];
        }
        out += vars.empty() ? "|| expected\n" : " || expected\n";
        for (const auto& t : generation.vectors) {
            for (std::size_t i = 0; i < vars.size(); ++i) {
                out += (i ? " | " : "") + value(t.inputs, vars[i]);
            }
            out += std::string(vars.empty() ? "|| " : " || ") + (t.expected ? "true" : "false") + "\n";
        }
    } else {
        for (const auto& t : generation.vectors) {
            out += "expect";
            for (std::size_t i = 0; i < vars.size(); ++i) {
                out += (i ? ", " : " ") + vars[i] + "=" + value(t.inputs, vars[i]);
            }
            out += std::string(" -> ") + (t.expected ? "true" : "false") + "  # " + t.rationale + "\n";
        }
    }
    if (generation.noWitness) {
        out += "# NoWitness: predicate is unsatisfiable over the ranges\n";
    }
    for (const auto& n : generation.notes) {
        if (n.rfind("no satisfying", 0) != 0) {
            out += "# note: " + n + "\n";
        }
    }
    return out;
}

}  // namespace prox::testgen
