#include "prox/engine/engine.hpp"

#include <algorithm>

#include "prox/error.hpp"
#include "prox/lang/complement.hpp"
#include "prox/lang/printer.hpp"

namespace prox::engine {

std::string_view toString(Lifecycle state) {
    switch (state) {
    case Lifecycle::Idle: return "idle";
    case Lifecycle::Enabled: return "enabled";
    case Lifecycle::Active: return "active";
    case Lifecycle::Compl: return "compl";
    }
    return "?";
}

lang::Binding GlobalState::binding() const {
    lang::Binding out;
    for (const auto& [name, value] : variables) {
        if (value) {
            out.emplace(name, *value);
        }
    }
    return out;
}

std::string GlobalState::key() const {
    std::string key;
    for (auto s : lifecycle) {
        key += static_cast<char>('0' + static_cast<int>(s));
    }
    key += '|';
    for (int c : cursor) {
        key += std::to_string(c);
        key += ',';
    }
    key += '|';
    for (const auto& [name, value] : variables) {
        key += name;
        key += '=';
        key += value ? toLiteral(*value) : "?";
        key += '\x1f';
    }
    key += '|';
    key += db.canonicalKey();
    return key;
}

std::string Transition::str() const {
    switch (kind) {
    case Kind::EnableBlock: return "enable " + target;
    case Kind::CompleteBlock: return "complete " + target;
    case Kind::ResolveChoice: return "resolve " + target + " -> branch " + std::to_string(branch);
    case Kind::FireTask: break;
    }
    std::string out = "fire " + target;
    auto render = [&](const lang::Binding& b) {
        std::string s;
        for (const auto& [k, v] : b) {
            s += (s.empty() ? "" : ", ") + k + " = " + toLiteral(v);
        }
        return s;
    };
    if (!inputs.empty()) {
        out += " inputs {" + render(inputs) + "}";
    }
    if (!answer.empty()) {
        out += " with {" + render(answer) + "}";
    }
    return out;
}

namespace {

Value typedDefault(PrimitiveType type) {
    switch (type) {
    case PrimitiveType::String: return std::string();
    case PrimitiveType::Integer: return std::int64_t{0};
    case PrimitiveType::Double: return 0.0;
    case PrimitiveType::Boolean: return false;
    case PrimitiveType::Date: return Date{};
    }
    return std::string();
}

lang::Binding merged(lang::Binding base, const lang::Binding& extra) {
    for (const auto& [k, v] : extra) {
        base.insert_or_assign(k, v);
    }
    return base;
}

}  // namespace

Engine::Engine(model::ProcessModel model, DomainSpec domains, bool defaultMissingInputs)
    : model_(std::move(model)), encoding_(encoder::encodeProcess(model_)) {
    index(model_.root, "root", -1);
    variableTypes_ = model::processVariables(model_);
    prepareInputs(domains, defaultMissingInputs);
}

Engine::Engine(model::ProcessModel model, encoder::ProcessEncoding encoding, DomainSpec domains,
               bool defaultMissingInputs)
    : model_(std::move(model)), encoding_(std::move(encoding)) {
    index(model_.root, "root", -1);
    variableTypes_ = model::processVariables(model_);
    for (const auto& [id, block] : taskBlock_) {
        if (!encoding_.contains(id)) {
            throw EncodingError("no encoding for task '" + id + "'");
        }
    }
    prepareInputs(domains, defaultMissingInputs);
}

void Engine::index(const model::Block& block, const std::string& path, int parent) {
    int self = static_cast<int>(blocks_.size());
    blocks_.push_back(BlockInfo{path, &block, parent, {}});
    pathBlock_.emplace(path, self);
    if (const auto* task = std::get_if<model::Task>(&block.node)) {
        taskBlock_.emplace(task->id, self);
    }
    const auto& children = block.children();
    for (std::size_t i = 0; i < children.size(); ++i) {
        int child = static_cast<int>(blocks_.size());
        blocks_[self].children.push_back(child);
        index(children[i], path + "." + std::to_string(i), self);
    }
}

void Engine::prepareInputs(const DomainSpec& domains, bool defaultMissingInputs) {
    for (const auto& [id, leaf] : encoding_) {
        std::vector<lang::Binding> combos{lang::Binding{}};
        for (const auto& [name, type] : leaf.userInputs) {
            std::vector<Value> values;
            auto it = domains.find(name);
            if (it == domains.end()) {
                if (!defaultMissingInputs) {
                    throw Error("no domain for input '" + name + "' of task '" + id + "'");
                }
                values.push_back(typedDefault(type));
            } else {
                for (const auto& text : it->second) {
                    auto v = parseScalar(text, type);
                    if (!v) {
                        throw TypeError("domain value '" + text + "' of input '" + name + "' is not a " +
                                        std::string(toString(type)));
                    }
                    values.push_back(std::move(*v));
                }
            }
            std::vector<lang::Binding> next;
            for (const auto& combo : combos) {
                for (const auto& v : values) {
                    lang::Binding b = combo;
                    b.emplace(name, v);
                    next.push_back(std::move(b));
                }
            }
            combos = std::move(next);
        }
        inputs_.emplace(id, std::move(combos));
    }
}

std::vector<lang::Binding> Engine::inputCombinations(std::string_view taskId) const {
    auto it = inputs_.find(taskId);
    return it == inputs_.end() ? std::vector<lang::Binding>{} : it->second;
}

GlobalState Engine::initial(store::Database fixture) const {
    GlobalState state;
    state.lifecycle.assign(blocks_.size(), Lifecycle::Idle);
    state.lifecycle[0] = Lifecycle::Enabled;
    state.cursor.assign(blocks_.size(), -1);
    for (const auto& [name, _] : variableTypes_) {
        state.variables.emplace(name, std::nullopt);
    }
    state.db = std::move(fixture);
    return state;
}

bool Engine::completed(const GlobalState& state) const { return state.lifecycle[0] == Lifecycle::Compl; }

bool Engine::blockedByDeferred(const GlobalState& state, int block) const {
    int parent = blocks_[block].parent;
    return parent >= 0 && std::holds_alternative<model::DeferredChoice>(blocks_[parent].block->node) &&
           state.cursor[parent] < 0;
}

int Engine::exclusiveBranch(const GlobalState& state, int block) const {
    const auto& choice = std::get<model::ExclusiveChoice>(blocks_[block].block->node);
    lang::Binding binding = state.binding();
    bool guard = lang::evalCondition(choice.guard, binding);
    bool other = lang::evalCondition(lang::complement(choice.guard), binding);
    if (guard == other) {
        throw LifecycleViolation("guard '" + lang::toString(choice.guard) + "' and its complement are both " +
                                 (guard ? "true" : "false"));
    }
    return guard ? 0 : 1;
}

void Engine::checkLegal(const GlobalState& before, const GlobalState& after) const {
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        Lifecycle from = before.lifecycle[b];
        Lifecycle to = after.lifecycle[b];
        if (from == to) {
            continue;
        }
        bool legal = (from == Lifecycle::Idle && to == Lifecycle::Enabled) ||
                     (from == Lifecycle::Enabled && to == Lifecycle::Active) ||
                     (from == Lifecycle::Active && to == Lifecycle::Compl) ||
                     (from == Lifecycle::Compl && to == Lifecycle::Idle);
        if (!legal && from == Lifecycle::Enabled && to == Lifecycle::Compl) {
            legal = blocks_[b].block->isTask();
        }
        if (!legal && from == Lifecycle::Enabled && to == Lifecycle::Idle) {
            int parent = blocks_[b].parent;
            legal = parent >= 0 && std::holds_alternative<model::DeferredChoice>(blocks_[parent].block->node);
        }
        if (!legal) {
            throw LifecycleViolation("block " + blocks_[b].path + " moved " + std::string(toString(from)) + " -> " +
                                     std::string(toString(to)));
        }
    }
}

std::optional<GlobalState> Engine::enable(const GlobalState& state, int block) const {
    const BlockInfo& info = blocks_[block];
    if (info.block->isTask() || state.lifecycle[block] != Lifecycle::Enabled || blockedByDeferred(state, block)) {
        return std::nullopt;
    }
    GlobalState next = state;
    next.lifecycle[block] = Lifecycle::Active;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, model::Sequence>) {
                next.cursor[block] = 0;
                next.lifecycle[info.children[0]] = Lifecycle::Enabled;
            } else if constexpr (std::is_same_v<T, model::ExclusiveChoice>) {
                int branch = exclusiveBranch(state, block);
                next.cursor[block] = branch;
                next.lifecycle[info.children[branch]] = Lifecycle::Enabled;
            } else if constexpr (!std::is_same_v<T, model::Task>) {
                next.cursor[block] = -1;
                for (int child : info.children) {
                    next.lifecycle[child] = Lifecycle::Enabled;
                }
            }
        },
        info.block->node);
    checkLegal(state, next);
    return next;
}

std::optional<GlobalState> Engine::complete(const GlobalState& state, int block) const {
    const BlockInfo& info = blocks_[block];
    if (info.block->isTask() || state.lifecycle[block] != Lifecycle::Active) {
        return std::nullopt;
    }
    GlobalState next = state;
    if (std::holds_alternative<model::Sequence>(info.block->node)) {
        int pos = state.cursor[block];
        int child = info.children[pos];
        if (state.lifecycle[child] != Lifecycle::Compl) {
            return std::nullopt;
        }
        next.lifecycle[child] = Lifecycle::Idle;
        if (pos + 1 < static_cast<int>(info.children.size())) {
            next.cursor[block] = pos + 1;
            next.lifecycle[info.children[pos + 1]] = Lifecycle::Enabled;
        } else {
            next.cursor[block] = -1;
            next.lifecycle[block] = Lifecycle::Compl;
        }
    } else if (std::holds_alternative<model::Parallel>(info.block->node)) {
        for (int child : info.children) {
            if (state.lifecycle[child] != Lifecycle::Compl) {
                return std::nullopt;
            }
        }
        for (int child : info.children) {
            next.lifecycle[child] = Lifecycle::Idle;
        }
        next.lifecycle[block] = Lifecycle::Compl;
    } else {
        int branch = state.cursor[block];
        if (branch < 0 || state.lifecycle[info.children[branch]] != Lifecycle::Compl) {
            return std::nullopt;
        }
        next.lifecycle[info.children[branch]] = Lifecycle::Idle;
        next.cursor[block] = -1;
        next.lifecycle[block] = Lifecycle::Compl;
    }
    checkLegal(state, next);
    return next;
}

GlobalState Engine::resolve(const GlobalState& state, int block, int branch) const {
    const BlockInfo& info = blocks_[block];
    GlobalState next = state;
    next.cursor[block] = branch;
    next.lifecycle[info.children[1 - branch]] = Lifecycle::Idle;
    checkLegal(state, next);
    return next;
}

std::vector<lang::Binding> Engine::answers(const GlobalState& state, const encoder::LeafEncoding& leaf,
                                           const lang::Binding& inputs) const {
    if (!leaf.precondition) {
        return {lang::Binding{}};
    }
    return lang::evalQuery(*leaf.precondition, state.db, merged(state.binding(), inputs));
}

void Engine::applyEffect(const std::vector<lang::EffectStmt>& effect, const lang::Binding& binding,
                         GlobalState& state) const {
    store::Snapshot snapshot = state.db.snapshot();
    auto variables = state.variables;
    try {
        for (const auto& stmt : effect) {
            std::visit(
                [&](const auto& s) {
                    using T = std::decay_t<decltype(s)>;
                    if constexpr (std::is_same_v<T, lang::Assign>) {
                        auto type = variableTypes_.find(s.variable);
                        if (type == variableTypes_.end()) {
                            throw EffectError("assignment to undeclared variable '" + s.variable + "'");
                        }
                        Value v = lang::evalTerm(s.value, binding);
                        auto coerced = coerce(v, type->second);
                        if (!coerced) {
                            throw TypeError("variable '" + s.variable + "' is " +
                                            std::string(toString(type->second)) + ", got " + toLiteral(v));
                        }
                        state.variables[s.variable] = std::move(*coerced);
                    } else if constexpr (std::is_same_v<T, lang::Insert>) {
                        std::vector<Value> values;
                        for (const auto& t : s.values) {
                            values.push_back(lang::evalTerm(t, binding));
                        }
                        state.db.insertRow(s.table, std::move(values));
                    } else if constexpr (std::is_same_v<T, lang::Delete>) {
                        state.db.deleteRows(s.table, s.keyFilter, binding);
                    } else {
                        state.db.conditionalUpdate(s, binding);
                    }
                },
                stmt);
        }
    } catch (const Error& e) {
        state.db.restore(snapshot);
        state.variables = std::move(variables);
        throw EffectError(e.what());
    }
}

GlobalState Engine::fireTask(const GlobalState& state, int block, const lang::Binding& answer,
                             const lang::Binding& inputs) const {
    const auto& task = std::get<model::Task>(blocks_[block].block->node);
    const auto& leaf = encoding_.at(task.id);
    GlobalState next = state;
    applyEffect(leaf.effect, merged(merged(state.binding(), inputs), answer), next);
    next.lifecycle[block] = Lifecycle::Compl;
    checkLegal(state, next);
    return next;
}

std::vector<Successor> Engine::successors(const GlobalState& state) const {
    std::vector<Successor> out;
    if (completed(state)) {
        return out;
    }
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b) {
        const BlockInfo& info = blocks_[b];
        Lifecycle lc = state.lifecycle[b];
        if (lc == Lifecycle::Idle || lc == Lifecycle::Compl) {
            continue;
        }
        if (const auto* task = std::get_if<model::Task>(&info.block->node)) {
            if (lc != Lifecycle::Enabled || blockedByDeferred(state, b)) {
                continue;
            }
            const auto& leaf = encoding_.at(task->id);
            for (const auto& inputs : inputs_.at(task->id)) {
                for (auto& answer : answers(state, leaf, inputs)) {
                    try {
                        GlobalState next = fireTask(state, b, answer, inputs);
                        Transition t{Transition::Kind::FireTask, task->id, -1, std::move(answer), inputs};
                        out.push_back(Successor{std::move(t), std::move(next)});
                    } catch (const EffectError&) {
                        // A binding the effect cannot be applied under is not a step.
                    }
                }
            }
            continue;
        }
        if (auto next = enable(state, b)) {
            out.push_back(Successor{Transition{Transition::Kind::EnableBlock, info.path, -1, {}, {}}, std::move(*next)});
        }
        if (lc == Lifecycle::Active && std::holds_alternative<model::DeferredChoice>(info.block->node) &&
            state.cursor[b] < 0) {
            for (int branch = 0; branch < 2; ++branch) {
                out.push_back(Successor{Transition{Transition::Kind::ResolveChoice, info.path, branch, {}, {}},
                                        resolve(state, b, branch)});
            }
        }
        if (auto next = complete(state, b)) {
            out.push_back(
                Successor{Transition{Transition::Kind::CompleteBlock, info.path, -1, {}, {}}, std::move(*next)});
        }
    }
    return out;
}

std::vector<Transition> Engine::enabledTransitions(const GlobalState& state) const {
    std::vector<Transition> out;
    for (auto& s : successors(state)) {
        out.push_back(std::move(s.transition));
    }
    return out;
}

GlobalState Engine::fire(const GlobalState& state, const Transition& t) const {
    auto notEnabled = [&](const std::string& why) -> InvalidTrace {
        return InvalidTrace(0, "'" + t.str() + "' is not enabled: " + why);
    };
    if (completed(state)) {
        throw notEnabled("the process has completed");
    }
    if (t.kind == Transition::Kind::FireTask) {
        auto it = taskBlock_.find(t.target);
        if (it == taskBlock_.end()) {
            throw notEnabled("unknown task");
        }
        int b = it->second;
        if (state.lifecycle[b] != Lifecycle::Enabled || blockedByDeferred(state, b)) {
            throw notEnabled("task is " + std::string(toString(state.lifecycle[b])));
        }
        const auto& combos = inputs_.at(t.target);
        if (std::find(combos.begin(), combos.end(), t.inputs) == combos.end()) {
            throw notEnabled("inputs are outside the configured domains");
        }
        auto found = answers(state, encoding_.at(t.target), t.inputs);
        if (std::find(found.begin(), found.end(), t.answer) == found.end()) {
            throw notEnabled("binding is not a precondition answer");
        }
        return fireTask(state, b, t.answer, t.inputs);
    }
    auto it = pathBlock_.find(t.target);
    if (it == pathBlock_.end()) {
        throw notEnabled("unknown block");
    }
    int b = it->second;
    switch (t.kind) {
    case Transition::Kind::EnableBlock:
        if (auto next = enable(state, b)) {
            return *next;
        }
        throw notEnabled("block is " + std::string(toString(state.lifecycle[b])));
    case Transition::Kind::CompleteBlock:
        if (auto next = complete(state, b)) {
            return *next;
        }
        throw notEnabled("completion condition does not hold");
    case Transition::Kind::ResolveChoice:
        if (!std::holds_alternative<model::DeferredChoice>(blocks_[b].block->node) ||
            state.lifecycle[b] != Lifecycle::Active || state.cursor[b] >= 0 || t.branch < 0 || t.branch > 1) {
            throw notEnabled("no unresolved deferred choice");
        }
        return resolve(state, b, t.branch);
    case Transition::Kind::FireTask:
        break;
    }
    throw notEnabled("unknown transition kind");
}

}  // namespace prox::engine
