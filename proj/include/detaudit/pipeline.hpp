#pragma once

#include <string>
#include <vector>

#include "detaudit/run_config.hpp"
#include "detaudit/score_file.hpp"

namespace detaudit {

enum class Method { kObjectLab, kMap, kTile, kClod };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

/// Single-number score per image for any method, in dataset order.
std::vector<MethodScore> score_images(const Dataset& dataset, Method method, const RunConfig& cfg,
                                      unsigned workers = 1);

/// Score-file text for `method`, header included.
std::string score_file_text(const Dataset& dataset, Method method, const RunConfig& cfg,
                            unsigned workers = 1);

}  // namespace detaudit
