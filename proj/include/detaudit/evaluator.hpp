#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "detaudit/dataset.hpp"
#include "detaudit/injector.hpp"

namespace detaudit {

using ScoreMap = std::map<ImageId, double>;
using TruthMap = std::map<ImageId, bool>;

/// Images ordered most-suspect first: ascending score, ties by image_id.
struct RankedResult {
  std::vector<ImageId> order;
  std::vector<bool> truth;  // aligned with `order`
};

struct MetricsReport {
  std::size_t num_images = 0;
  std::size_t num_positives = 0;  // T
  double average_precision = 0.0;
  double precision_at_100 = 0.0;
  std::size_t precision_at_100_k = 0;  // min(100, N)
  double precision_at_T = 0.0;
  std::vector<double> precision_curve;  // precision at k = 1..N
};

/// Throws EvaluationError when the id sets differ or a score is NaN.
RankedResult rank_images(const ScoreMap& scores, const TruthMap& truth);

/// Mean over positives of the precision at each positive's rank. Throws
/// EvaluationError without positives.
double average_precision(const ScoreMap& scores, const TruthMap& truth);

/// Fraction of positives among the k lowest-scoring images, 1 <= k <= N.
double precision_at_k(const ScoreMap& scores, const TruthMap& truth, std::size_t k);

MetricsReport evaluate(const ScoreMap& scores, const TruthMap& truth);

/// Any-error truth (default) or the flag for a single error type.
TruthMap truth_from_manifest(const ErrorManifest& manifest);
TruthMap truth_from_manifest(const ErrorManifest& manifest, ErrorType type);

nlohmann::json metrics_to_json(const MetricsReport& report);
std::string metrics_table(const MetricsReport& report);

}  // namespace detaudit
