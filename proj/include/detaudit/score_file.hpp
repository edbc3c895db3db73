#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "detaudit/evaluator.hpp"
#include "detaudit/objectlab.hpp"

namespace detaudit {

// Score files are JSONL: an optional {"header": {...}} line, then one record
// per image sorted ascending by score (ties by image_id):
//   {"image_id", "method", "score", "badloc", "swap", "overlook", "per_box"}
// Baseline methods write null subtype fields and an empty per_box object.

struct MethodScore {
  ImageId image_id = 0;
  double score = 0.0;
};

std::string objectlab_scores_to_jsonl(std::vector<ImageScore> scores,
                                      const nlohmann::json& header);
std::string method_scores_to_jsonl(const std::string& method, std::vector<MethodScore> scores,
                                   const nlohmann::json& header);

/// image_id,score,badloc,swap,overlook in the same row order as the JSONL.
std::string objectlab_scores_to_csv(std::vector<ImageScore> scores);

/// Reads one numeric column ("score", "badloc", "swap" or "overlook").
ScoreMap parse_score_file(std::string_view text, const std::string& source = "<scores>",
                          const std::string& field = "score");

}  // namespace detaudit
