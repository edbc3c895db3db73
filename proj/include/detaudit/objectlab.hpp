#pragma once

#include <span>
#include <vector>

#include "detaudit/dataset.hpp"
#include "detaudit/geometry.hpp"

namespace detaudit {

/// How predicted boxes that overlap a same-class annotation are treated when
/// estimating overlooked-box quality.
enum class OverlookedMode {
  /// An overlapping same-class annotation counts as a match (quality 1).
  kMatchedSkip,
  /// Only non-overlapping same-class annotations are considered; an
  /// overlapping match therefore falls through to the sim* floor.
  kLiteral,
};

const char* to_string(OverlookedMode mode);
OverlookedMode overlooked_mode_from_string(const std::string& name);

inline constexpr double kMaxQuality = 1.0;

struct ScoringConfig {
  SimilarityParams similarity;
  double tau_up = 0.95;  // "confident" predictions strictly exceed this
  double softmin_temperature = 1.0;
  OverlookedMode overlooked_mode = OverlookedMode::kMatchedSkip;

  /// Throws ConfigError. `tau_down` is the ingestion floor the predictions
  /// were filtered with.
  void validate(double tau_down = 0.0) const;
};

struct ImageScore {
  ImageId image_id = 0;
  double score = 1.0;
  double badloc = 1.0;
  double swap = 1.0;
  double overlook = 1.0;
  std::vector<double> badloc_boxes;    // one per annotation
  std::vector<double> swap_boxes;      // one per annotation
  std::vector<double> overlook_boxes;  // one per confident prediction, or {1}

  friend bool operator==(const ImageScore&, const ImageScore&) = default;
};

/// Softmin pooling: <q, softmax((1 - q) / T)>. Lies in [min(q), mean(q)].
/// `values` must be nonempty.
double softmin(std::span<const double> values, double temperature = 1.0);

std::vector<double> badloc_box_scores(const ImageRecord& image, const ScoringConfig& cfg);
std::vector<double> swapped_box_scores(const ImageRecord& image, const ScoringConfig& cfg);
std::vector<double> overlooked_box_scores(const ImageRecord& image,
                                          const ScoringConfig& cfg, double sim_star);

/// Cube root of the product of the three subtype scores.
double combine_subtypes(double badloc, double swap, double overlook);

ImageScore objectlab_score(const ImageRecord& image, const ScoringConfig& cfg,
                           double sim_star);

/// Computes sim* over the dataset, then scores each image independently.
/// Output follows the dataset's image_id order and is independent of
/// `workers`.
std::vector<ImageScore> score_dataset(const Dataset& dataset, const ScoringConfig& cfg,
                                      unsigned workers = 1);

}  // namespace detaudit
