#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "prox/model/model.hpp"

namespace prox::validator {

enum class Code {
    InputUnconnected,
    InputAttrUnconnected,
    OutputUnconnected,
    OutputAttrUnconnected,
    OpDisconnected,
    OpEmptyExpr,
    SelfLoop,
    TypeMismatch,
    ForeignTableInUpdate,
    ReadonlyWrite,
    BlockArity,
};

/// E_INPUT_UNCONNECTED etc.
std::string_view toString(Code code);

struct Diagnostic {
    Code code;
    std::string taskId;   // empty for block-level findings
    std::string subject;  // node, node.attr, op:id, or a block path
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

/// All findings, ordered by task id, subject, code.
std::vector<Diagnostic> validate(const model::ProcessModel& model);
bool isValid(const model::ProcessModel& model);

/// `CODE task=<id> at=<ref>: message`, one line per diagnostic.
std::string formatText(const std::vector<Diagnostic>& diagnostics);
/// JSON object {"valid": bool, "diagnostics": [{code, task, at, message}]}.
std::string formatStructured(const std::vector<Diagnostic>& diagnostics);

}  // namespace prox::validator
