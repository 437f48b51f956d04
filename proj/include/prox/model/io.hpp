#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "prox/model/model.hpp"

namespace prox::model {

/// Parses and resolves a model document. Throws ParseError for malformed
/// documents (unknown keys, wrong shapes, bad arities), ResolutionError for
/// dangling references and TypeError for ill-typed guards.
ProcessModel loadModel(std::string_view text);
ProcessModel loadModelFile(const std::filesystem::path& path);

std::string saveModel(const ProcessModel& model);

}  // namespace prox::model
