#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "prox/lang/parser.hpp"

#ifndef PROX_CORPUS_DIR
#error "PROX_CORPUS_DIR must be defined"
#endif

namespace prox::testing {

std::string corpusPath(const std::string& name) { return std::string(PROX_CORPUS_DIR) + "/" + name; }

std::string readText(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

const std::vector<lang::CompareOp> kOps{lang::CompareOp::Eq, lang::CompareOp::Neq, lang::CompareOp::Gt,
                                        lang::CompareOp::Lt, lang::CompareOp::Le, lang::CompareOp::Ge};

lang::Term smallInt(Rng& rng, int lo, int hi) { return lang::constant(std::int64_t{rng.uniform(lo, hi)}); }

lang::Term surfaceTerm(Rng& rng, const std::vector<std::string>& vars) {
    lang::Term v = lang::variable(rng.pick(vars));
    switch (rng.uniform(0, 5)) {
    case 0: return lang::arith(lang::ArithOp::Add, v, lang::variable(rng.pick(vars)));
    case 1: return lang::arith(lang::ArithOp::Sub, v, smallInt(rng, 0, 3));
    case 2: return lang::arith(lang::ArithOp::Mul, smallInt(rng, 1, 3), v);
    case 3: return lang::arith(lang::ArithOp::Div, v, smallInt(rng, 1, 3));
    default: return v;
    }
}

lang::ConditionExpr surfaceAtom(Rng& rng, const std::vector<std::string>& vars) {
    lang::Term rhs = rng.chance(0.25) ? lang::variable(rng.pick(vars)) : smallInt(rng, -1, 5);
    return lang::atom(surfaceTerm(rng, vars), rng.pick(kOps), std::move(rhs));
}

const std::vector<std::string> kVariables{"x", "y", "score", "total"};

lang::Term name(Rng& rng) {
    if (rng.chance(0.5)) {
        return lang::variable(rng.pick(kVariables));
    }
    return rng.chance(0.5) ? lang::attribute("R", rng.pick(std::vector<std::string>{"a", "b"}))
                           : lang::attribute("S", rng.pick(std::vector<std::string>{"c", "d"}));
}

Value numericValue(Rng& rng) {
    if (rng.chance(0.5)) {
        return std::int64_t{rng.uniform(-5, 20)};
    }
    return rng.uniform(-8, 40) / 4.0;
}

/// Any literal or name; used where no operand types meet.
lang::Term anyLeaf(Rng& rng) { return rng.chance(0.5) ? lang::constant(randomValue(rng)) : name(rng); }

lang::Term leaf(Rng& rng) {
    switch (rng.uniform(0, 2)) {
    case 0: return lang::constant(numericValue(rng));
    case 1: return lang::variable(rng.pick(kVariables));
    default:
        return rng.chance(0.5) ? lang::attribute("R", rng.pick(std::vector<std::string>{"a", "b"}))
                               : lang::attribute("S", rng.pick(std::vector<std::string>{"c", "d"}));
    }
}

lang::ConditionExpr flatConjunction(Rng& rng, const std::vector<std::string>& names, int maxAtoms) {
    std::vector<lang::ConditionExpr> atoms;
    int n = rng.uniform(1, maxAtoms);
    for (int i = 0; i < n; ++i) {
        lang::Term lhs = lang::variable(rng.pick(names));
        lang::Term rhs = rng.chance(0.5) ? lang::constant(randomValue(rng)) : lang::variable(rng.pick(names));
        atoms.push_back(lang::atom(std::move(lhs), rng.pick(kOps), std::move(rhs)));
    }
    return lang::conjunction(std::move(atoms));
}

lang::TupleIn tupleIn(Rng& rng) {
    lang::TupleIn t;
    bool r = rng.chance(0.5);
    t.relation = r ? "R" : "S";
    std::vector<std::string> attrs = r ? std::vector<std::string>{"a", "b"} : std::vector<std::string>{"c", "d"};
    int n = rng.uniform(1, 2);
    for (int i = 0; i < n; ++i) {
        t.terms.push_back(anyLeaf(rng));
        t.attributes.push_back(attrs[static_cast<std::size_t>(i)]);
    }
    return t;
}

lang::Term updateValue(Rng& rng) {
    switch (rng.uniform(0, 3)) {
    case 0: return lang::constant(std::int64_t{rng.uniform(0, 9)});
    case 1: return lang::variable(rng.pick(std::vector<std::string>{"a", "b", "x"}));
    case 2: return lang::attribute("R", "a");
    default: return lang::arith(lang::ArithOp::Add, lang::variable("a"), lang::constant(std::int64_t{1}));
    }
}

}  // namespace

lang::ConditionExpr surfaceCondition(Rng& rng, const std::vector<std::string>& vars, int maxAtoms) {
    std::vector<lang::ConditionExpr> atoms;
    int n = rng.uniform(1, maxAtoms);
    for (int i = 0; i < n; ++i) {
        atoms.push_back(surfaceAtom(rng, vars));
    }
    return lang::conjunction(std::move(atoms));
}

Value randomValue(Rng& rng) {
    switch (rng.uniform(0, 4)) {
    case 0: return rng.pick(std::vector<std::string>{"a", "it's", "two words", "", "submitted"});
    case 1: return std::int64_t{rng.uniform(-5, 20)};
    case 2: return rng.uniform(-8, 40) / 4.0;
    case 3: return rng.chance(0.5);
    default: return *Date::fromIso(rng.pick(std::vector<std::string>{"2024-01-31", "1999-12-01", "2030-06-15"}));
    }
}

lang::Term randomTerm(Rng& rng, int depth) {
    if (depth <= 0 || rng.chance(0.4)) {
        return leaf(rng);
    }
    auto op = static_cast<lang::ArithOp>(rng.uniform(0, 3));
    return lang::arith(op, randomTerm(rng, depth - 1), randomTerm(rng, depth - 1));
}

lang::ConditionExpr randomCondition(Rng& rng, int depth) {
    if (depth <= 0 || rng.chance(0.3)) {
        if (rng.chance(0.1)) {
            return rng.chance(0.5) ? lang::trueConst() : lang::falseConst();
        }
        if (rng.chance(0.6)) {
            return lang::atom(randomTerm(rng, 2), rng.pick(kOps), randomTerm(rng, 2));
        }
        // Non-numeric atom: a literal of one type against a name or a literal of the same type.
        Value v = randomValue(rng);
        while (isNumeric(typeOf(v))) {
            v = randomValue(rng);
        }
        Value w = randomValue(rng);
        while (typeOf(w) != typeOf(v)) {
            w = randomValue(rng);
        }
        lang::Term lhs = rng.chance(0.5) ? lang::constant(v) : name(rng);
        lang::Term rhs = rng.chance(0.7) ? lang::constant(w) : name(rng);
        auto op = typeOf(v) == PrimitiveType::Boolean ? (rng.chance(0.5) ? lang::CompareOp::Eq : lang::CompareOp::Neq)
                                                      : rng.pick(kOps);
        return lang::atom(std::move(lhs), op, std::move(rhs));
    }
    std::vector<lang::ConditionExpr> operands;
    int n = rng.uniform(2, 3);
    for (int i = 0; i < n; ++i) {
        operands.push_back(randomCondition(rng, depth - 1));
    }
    return rng.chance(0.5) ? lang::ConditionExpr{lang::Conjunction{std::move(operands)}}
                           : lang::ConditionExpr{lang::Disjunction{std::move(operands)}};
}

lang::QueryExpr randomQuery(Rng& rng) {
    lang::QueryExpr q;
    q.from = rng.chance(0.5) ? std::vector<std::string>{"R"} : std::vector<std::string>{"R", "S"};
    std::vector<lang::AttributeRef> candidates{{"R", "a"}, {"R", "b"}};
    if (q.from.size() == 2) {
        candidates.push_back({"S", "c"});
        candidates.push_back({"S", "d"});
    }
    std::shuffle(candidates.begin(), candidates.end(), rng.engine());
    q.select.assign(candidates.begin(), candidates.begin() + rng.uniform(1, static_cast<int>(candidates.size())));
    if (rng.chance(0.7)) {
        q.where.conjuncts.clear();
        bool condition = rng.chance(0.5);
        int items = rng.uniform(1, 3);
        for (int i = 0; i < items; ++i, condition = !condition) {
            if (condition) {
                q.where.conjuncts.emplace_back(flatConjunction(rng, {"x", "y", "a"}, 3));
            } else {
                q.where.conjuncts.emplace_back(tupleIn(rng));
            }
        }
    }
    return q;
}

lang::EffectStmt randomEffect(Rng& rng) {
    switch (rng.uniform(0, 3)) {
    case 0: return lang::Assign{rng.pick(kVariables), rng.chance(0.7) ? randomTerm(rng, 2) : anyLeaf(rng)};
    case 1: {
        lang::Insert ins{{}, "R"};
        int n = rng.uniform(1, 3);
        for (int i = 0; i < n; ++i) {
            ins.values.push_back(rng.chance(0.5) ? randomTerm(rng, 1) : anyLeaf(rng));
        }
        return ins;
    }
    case 2: return lang::Delete{flatConjunction(rng, {"a", "b", "x"}, 2), "R"};
    default: break;
    }
    lang::ConditionalUpdate u;
    u.table = "R";
    u.set.push_back({"a", "a"});
    if (rng.chance(0.5)) {
        u.set.push_back({"b", "b"});
    }
    auto arm = [&] {
        std::vector<lang::PlaceholderAssignment> out;
        for (const auto& s : u.set) {
            out.push_back({s.placeholder, updateValue(rng)});
        }
        return out;
    };
    int branches = rng.uniform(1, 3);
    for (int i = 0; i < branches; ++i) {
        lang::FilterExpr when;
        when.conjuncts.emplace_back(flatConjunction(rng, {"a", "b", "x"}, 2));
        u.branches.push_back({std::move(when), arm()});
    }
    u.otherwise = arm();
    return u;
}

lang::ConditionalUpdate randomUpdate(Rng& rng) {
    auto intTerm = [&]() -> lang::Term {
        auto leaf = [&]() -> lang::Term {
            int k = rng.uniform(0, 3);
            if (k == 3) {
                return lang::constant(std::int64_t{rng.uniform(0, 4)});
            }
            return lang::variable(std::vector<std::string>{"a", "x", "y"}[static_cast<std::size_t>(k)]);
        };
        if (rng.chance(0.4)) {
            auto op = rng.chance(0.5) ? lang::ArithOp::Add : lang::ArithOp::Sub;
            return lang::arith(op, leaf(), leaf());
        }
        return leaf();
    };
    auto strTerm = [&]() -> lang::Term {
        return rng.chance(0.5) ? lang::variable("b") : lang::constant(std::string(rng.chance(0.5) ? "p" : "q"));
    };
    auto condition = [&]() -> lang::ConditionExpr {
        std::vector<lang::ConditionExpr> atoms;
        int n = rng.uniform(1, 2);
        for (int i = 0; i < n; ++i) {
            if (rng.chance(0.7)) {
                atoms.push_back(lang::atom(intTerm(), static_cast<lang::CompareOp>(rng.uniform(0, 5)), intTerm()));
            } else {
                auto op = rng.chance(0.5) ? lang::CompareOp::Eq : lang::CompareOp::Neq;
                atoms.push_back(lang::atom(lang::variable("b"), op, strTerm()));
            }
        }
        return lang::conjunction(std::move(atoms));
    };

    lang::ConditionalUpdate u;
    u.table = "R";
    if (rng.chance(0.8)) {
        u.set.push_back({"a", "na"});
    }
    if (u.set.empty() || rng.chance(0.5)) {
        u.set.push_back({"b", "nb"});
    }
    auto arm = [&] {
        std::vector<lang::PlaceholderAssignment> out;
        for (const auto& s : u.set) {
            out.push_back({s.placeholder, s.attribute == "a" ? intTerm() : strTerm()});
        }
        return out;
    };
    int branches = rng.uniform(1, 3);
    for (int i = 0; i < branches; ++i) {
        lang::FilterExpr when;
        when.conjuncts.emplace_back(condition());
        if (rng.chance(0.3)) {
            lang::TupleIn member{{intTerm()}, "R", {"a"}};
            when.conjuncts.emplace_back(std::move(member));
        }
        u.branches.push_back({std::move(when), arm()});
    }
    u.otherwise = arm();
    return u;
}

// ---- models ---------------------------------------------------------------------

namespace {

const std::vector<std::string> kTypes{"string", "integer", "double", "boolean", "date"};

std::string literalFor(const std::string& type) {
    if (type == "string") return "'x'";
    if (type == "integer") return "1";
    if (type == "double") return "1.5";
    if (type == "boolean") return "TRUE";
    return "DATE '2024-01-01'";
}

struct GenTable {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    bool readOnly = false;
};

std::string attrList(const std::vector<std::pair<std::string, std::string>>& attrs) {
    std::string out = "[";
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        out += (i ? ", " : "") + attrs[i].first + ":" + attrs[i].second;
    }
    return out + "]";
}

}  // namespace

std::string validModelYaml(Rng& rng, int index) {
    std::vector<GenTable> tables;
    int nTables = rng.uniform(1, 3);
    for (int t = 0; t < nTables; ++t) {
        GenTable table{"T" + std::to_string(t), {}, t == 0 && rng.chance(0.5)};
        int nAttrs = rng.uniform(1, 4);
        for (int a = 0; a < nAttrs; ++a) {
            table.attrs.emplace_back("a" + std::to_string(a), rng.pick(kTypes));
        }
        tables.push_back(std::move(table));
    }
    std::ostringstream y;
    y << "process: generated" << index << "\ntables:\n";
    for (const auto& t : tables) {
        y << "  - name: " << t.name << "\n    attrs: " << attrList(t.attrs) << "\n";
        if (t.readOnly) {
            y << "    readOnly: true\n";
        }
    }
    y << "root:\n  sequence:\n";
    int nTasks = rng.uniform(1, 4);
    for (int k = 0; k < nTasks; ++k) {
        const GenTable& src = rng.pick(tables);
        std::vector<std::pair<std::string, std::string>> read;
        for (const auto& a : src.attrs) {
            if (read.empty() || rng.chance(0.5)) {
                read.push_back(a);
            }
        }
        std::string userType = rng.pick(kTypes);
        std::vector<const GenTable*> writable;
        for (const auto& t : tables) {
            if (!t.readOnly) {
                writable.push_back(&t);
            }
        }
        const GenTable* dst = !writable.empty() && rng.chance(0.7) ? rng.pick(writable) : nullptr;

        std::string edges;
        y << "    - task:\n        id: task" << k << "\n        inputs:\n";
        y << "          - name: src\n            type: " << src.name
          << "\n            kind: data_store\n            attrs: " << attrList(read) << "\n            state: read\n";
        y << "          - name: u\n            type: " << userType << "\n            kind: user_data\n";
        y << "        outputs:\n";
        y << "          - name: keep" << k << "\n            type: " << userType << "\n            kind: data_object\n";
        edges += "          - [u, keep" + std::to_string(k) + "]\n";
        for (const auto& [name, type] : read) {
            y << "          - name: src" << k << "_" << name << "\n            type: " << type << "\n            kind: data_object\n";
            edges += "          - [src." + name + ", src" + std::to_string(k) + "_" + name + "]\n";
        }
        std::string ops;
        if (dst != nullptr) {
            y << "          - name: dst\n            type: " << dst->name
              << "\n            kind: data_store\n            attrs: " << attrList(dst->attrs)
              << "\n            state: create\n";
            for (const auto& [name, type] : dst->attrs) {
                ops += "          - id: mk_" + name + "\n            expression: \"" + literalFor(type) + "\"\n";
                edges += "          - [u, op:mk_" + name + "]\n";
                edges += "          - [op:mk_" + name + ", dst." + name + "]\n";
            }
        }
        if (!ops.empty()) {
            y << "        operations:\n" << ops;
        }
        y << "        dataflow:\n" << edges;
    }
    return y.str();
}

namespace {

void collectTasks(model::Block& block, std::vector<model::Task*>& out) {
    if (auto* task = std::get_if<model::Task>(&block.node)) {
        out.push_back(task);
        return;
    }
    std::visit(
        [&](auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, model::Sequence>) {
                for (auto& child : node.children) collectTasks(child, out);
            } else if constexpr (!std::is_same_v<T, model::Task>) {
                for (auto& child : node.branches) collectTasks(child, out);
            }
        },
        block.node);
}

model::DataNode dataNode(std::string name, model::SemanticType type, model::DataKind kind, model::Direction dir) {
    model::DataNode node;
    node.name = std::move(name);
    node.objectType = std::move(type);
    node.kind = kind;
    node.direction = dir;
    return node;
}

}  // namespace

Mutation mutate(const model::ProcessModel& base, int rule, Rng& rng) {
    using model::DataKind;
    using model::Direction;
    using model::NodeRef;
    using model::SemanticType;
    using validator::Code;

    Mutation m{base, Code::InputUnconnected, ""};
    std::vector<model::Task*> all;
    collectTasks(m.model.root, all);
    model::Task& task = *all[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(all.size()) - 1))];
    m.taskId = task.id;
    const std::string& table = m.model.tables.front().name;
    const auto& firstAttr = m.model.tables.front().attributes.front();
    auto dbl = SemanticType::primitive(PrimitiveType::Double);

    switch (rule) {
    case 1:
        task.inputs.push_back(dataNode("mut_extra", dbl, DataKind::UserData, Direction::Input));
        m.expected = Code::InputUnconnected;
        break;
    case 2: {
        auto node = dataNode("mut_record", SemanticType::domain(table), DataKind::UserData, Direction::Input);
        node.attributes.push_back(firstAttr);
        task.inputs.push_back(std::move(node));
        m.expected = Code::InputAttrUnconnected;
        break;
    }
    case 3:
        task.outputs.push_back(dataNode("mut_orphan", dbl, DataKind::DataObject, Direction::Output));
        m.expected = Code::OutputUnconnected;
        break;
    case 4: {
        auto node = dataNode("mut_shape", SemanticType::domain(table), DataKind::DataObject, Direction::Output);
        node.attributes.push_back(firstAttr);
        task.outputs.push_back(std::move(node));
        m.expected = Code::OutputAttrUnconnected;
        break;
    }
    case 5:
        if (!task.operations.empty() && rng.chance(0.5)) {
            task.operations.front().expression = "";
            m.expected = Code::OpEmptyExpr;
        } else {
            task.operations.push_back({"mut_dangling", "1"});
            task.dataflow.push_back({*NodeRef::parse("u"), *NodeRef::parse("op:mut_dangling")});
            m.expected = Code::OpDisconnected;
        }
        break;
    default: {
        if (rng.chance(0.5)) {
            task.dataflow.push_back({*NodeRef::parse("u"), *NodeRef::parse("u")});
            m.expected = Code::SelfLoop;
        } else {
            auto uType = task.findNode("u")->objectType;
            auto other = uType == SemanticType::primitive(PrimitiveType::String)
                             ? SemanticType::primitive(PrimitiveType::Integer)
                             : SemanticType::primitive(PrimitiveType::String);
            task.outputs.push_back(dataNode("mut_sink", other, DataKind::DataObject, Direction::Output));
            task.dataflow.push_back({*NodeRef::parse("u"), *NodeRef::parse("mut_sink")});
            m.expected = Code::TypeMismatch;
        }
        break;
    }
    }
    return m;
}

namespace {

struct SmallGen {
    Rng& rng;
    int vars;
    int tasks = 0;
    std::ostringstream out;

    std::string pad(int n) const { return std::string(static_cast<std::size_t>(n), ' '); }

    void task(int ind) {
        std::string id = "t" + std::to_string(tasks++);
        std::string x = "x" + std::to_string(rng.uniform(0, vars - 1));
        std::string p = pad(ind);
        out << p << "task:\n" << p << "  id: " << id << "\n";
        switch (rng.uniform(0, 3)) {
        case 0:
            out << p << "  inputs:\n" << p << "    - {name: w, type: integer, kind: user_data}\n";
            out << p << "  outputs:\n" << p << "    - {name: " << x << ", type: integer, kind: data_object}\n";
            out << p << "  dataflow:\n" << p << "    - [w, " << x << "]\n";
            break;
        case 1:
            out << p << "  inputs:\n" << p << "    - {name: p, type: integer, kind: user_data}\n";
            out << p << "  outputs:\n"
                << p << "    - {name: slot, type: Slot, kind: data_store, attrs: [v:integer], state: create}\n";
            out << p << "  dataflow:\n" << p << "    - [p, slot.v]\n";
            break;
        case 2:
            out << p << "  inputs:\n"
                << p << "    - {name: slot, type: Slot, kind: data_store, attrs: [v:integer], state: read}\n";
            out << p << "  outputs:\n" << p << "    - {name: " << x << ", type: integer, kind: data_object}\n";
            out << p << "  dataflow:\n" << p << "    - [slot.v, " << x << "]\n";
            break;
        default:
            out << p << "  inputs:\n"
                << p << "    - {name: slot, type: Slot, kind: data_store, attrs: [v:integer], state: read}\n";
            out << p << "  outputs:\n"
                << p << "    - {name: gone, type: Slot, kind: data_store, attrs: [v:integer], state: deleted}\n";
            out << p << "  dataflow:\n" << p << "    - [slot.v, gone.v]\n";
            break;
        }
    }

    void block(int ind, int depth) {
        if (depth == 0 || tasks >= 4 || rng.chance(0.35)) {
            task(ind);
            return;
        }
        std::string p = pad(ind);
        switch (rng.uniform(0, 3)) {
        case 0:
            out << p << "sequence:\n";
            for (int i = 0; i < 2; ++i) {
                out << p << "  -\n";
                block(ind + 4, depth - 1);
            }
            break;
        case 1: {
            std::vector<std::string> names;
            for (int i = 0; i < vars; ++i) {
                names.push_back("x" + std::to_string(i));
            }
            std::string guard = "x" + std::to_string(rng.uniform(0, vars - 1)) + " >= " +
                                std::to_string(rng.uniform(0, 2));
            if (rng.chance(0.3)) {
                guard += " AND x0 <= 1";
            }
            out << p << "exclusive:\n" << p << "  guard: \"" << guard << "\"\n" << p << "  then:\n";
            block(ind + 4, depth - 1);
            out << p << "  else:\n";
            block(ind + 4, depth - 1);
            break;
        }
        default:
            out << p << (rng.chance(0.5) ? "deferred" : "parallel") << ":\n";
            for (int i = 0; i < 2; ++i) {
                out << p << "  -\n";
                block(ind + 4, depth - 1);
            }
            break;
        }
    }
};

}  // namespace

SmallCase smallCase(Rng& rng, int index) {
    SmallCase c;
    SmallGen g{rng, rng.uniform(1, 2)};
    g.out << "process: small" << index << "\ntables:\n  - name: Slot\n    attrs: [v:integer]\n";
    g.out << "root:\n  sequence:\n    - task:\n        id: init\n        inputs:\n";
    for (int i = 0; i < g.vars; ++i) {
        g.out << "          - {name: u" << i << ", type: integer, kind: user_data}\n";
    }
    g.out << "        outputs:\n";
    for (int i = 0; i < g.vars; ++i) {
        g.out << "          - {name: x" << i << ", type: integer, kind: data_object}\n";
    }
    g.out << "        dataflow:\n";
    for (int i = 0; i < g.vars; ++i) {
        g.out << "          - [u" << i << ", x" << i << "]\n";
    }
    g.out << "    -\n";
    g.block(6, 2);
    c.modelYaml = g.out.str();

    c.fixtureYaml = rng.chance(0.5) ? "Slot: []\n" : "Slot:\n  - [" + std::to_string(rng.uniform(0, 1)) + "]\n";
    for (int i = 0; i < g.vars; ++i) {
        c.domains["u" + std::to_string(i)] = {"0", "1"};
    }
    c.domains["w"] = {"0", "2"};
    c.domains["p"] = {"0", "1"};
    if (rng.chance(0.7)) {
        std::string text = "x0 <= " + std::to_string(rng.uniform(0, 2));
        if (g.vars > 1 && rng.chance(0.5)) {
            text = "x0 + x1 <= " + std::to_string(rng.uniform(1, 3));
        }
        if (rng.chance(0.3)) {
            text += " AND TUPLE(" + std::to_string(rng.uniform(0, 1)) + ") IN Slot.v";
        }
        c.property = lang::parseFilter(text, lang::Syntax::Full);
    }
    return c;
}

// ---- oracles ---------------------------------------------------------------------

std::vector<lang::Row> referenceUpdate(const store::Table& table, const lang::ConditionalUpdate& update,
                                       const lang::Binding& outer, const lang::RelationSource& source) {
    std::vector<lang::Row> out;
    for (const auto& row : table.rows) {
        lang::Binding b = outer;
        for (std::size_t i = 0; i < table.attributeNames.size(); ++i) {
            b.insert_or_assign(table.attributeNames[i], row[i]);
        }
        const std::vector<lang::PlaceholderAssignment>* arm = &update.otherwise;
        for (const auto& branch : update.branches) {
            if (lang::evalFilter(branch.when, b, &source)) {
                arm = &branch.then;
                break;
            }
        }
        std::map<std::string, Value> placeholders;
        for (const auto& a : *arm) {
            placeholders[a.placeholder] = lang::evalTerm(a.value, b);
        }
        lang::Row next = row;
        for (const auto& s : update.set) {
            auto pos = std::find(table.attributeNames.begin(), table.attributeNames.end(), s.attribute) -
                       table.attributeNames.begin();
            auto type = table.schema.attributes[static_cast<std::size_t>(pos)].type.primitiveType();
            next[static_cast<std::size_t>(pos)] = *coerce(placeholders.at(s.placeholder), type);
        }
        out.push_back(std::move(next));
    }
    return out;
}

Enumeration enumerate(const engine::Engine& engine, const store::Database& fixture,
                      const std::optional<lang::FilterExpr>& property, std::size_t limit) {
    Enumeration result;
    std::unordered_set<std::string> seen;
    std::vector<engine::GlobalState> stack{engine.initial(fixture)};
    seen.insert(stack.back().key());
    while (!stack.empty()) {
        engine::GlobalState state = std::move(stack.back());
        stack.pop_back();
        if (property && !engine::holds(*property, state)) {
            result.violation = true;
        }
        auto next = engine.successors(state);
        if (next.empty() && !engine.completed(state)) {
            result.deadlock = true;
        }
        for (auto& s : next) {
            if (seen.insert(s.state.key()).second) {
                if (seen.size() > limit) {
                    throw std::runtime_error("state space exceeds the enumeration limit");
                }
                stack.push_back(std::move(s.state));
            }
        }
    }
    result.states = seen.size();
    return result;
}

std::vector<lang::Binding> assignments(const std::vector<std::string>& vars, const std::vector<Value>& domain) {
    std::vector<lang::Binding> out{lang::Binding{}};
    for (const auto& v : vars) {
        std::vector<lang::Binding> next;
        for (const auto& b : out) {
            for (const auto& value : domain) {
                lang::Binding e = b;
                e.emplace(v, value);
                next.push_back(std::move(e));
            }
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace prox::testing
