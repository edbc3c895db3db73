#include "detaudit/objectlab.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "parallel.hpp"

namespace detaudit {

const char* to_string(OverlookedMode mode) {
  return mode == OverlookedMode::kMatchedSkip ? "matched-skip" : "literal";
}

OverlookedMode overlooked_mode_from_string(const std::string& name) {
  if (name == "matched-skip") return OverlookedMode::kMatchedSkip;
  if (name == "literal") return OverlookedMode::kLiteral;
  throw ConfigError("unknown overlooked mode '" + name + "' (expected matched-skip or literal)");
}

void ScoringConfig::validate(double tau_down) const {
  if (!similarity.is_valid()) {
    throw ConfigError("similarity alpha must lie in [0, 1] and sigma must be positive");
  }
  if (!(tau_up > tau_down && tau_up <= 1.0)) {
    throw ConfigError("tau_up must satisfy tau_down < tau_up <= 1");
  }
  if (!(softmin_temperature > 0.0) || !std::isfinite(softmin_temperature)) {
    throw ConfigError("softmin temperature must be positive");
  }
}

double softmin(std::span<const double> values, double temperature) {
  if (values.empty()) throw std::invalid_argument("softmin of an empty vector");
  // Weights exp((1 - q) / T) are largest at the minimum; shifting the
  // exponent by (1 - min) / T keeps every weight in (0, 1].
  const double lo = *std::min_element(values.begin(), values.end());
  double weight_sum = 0.0;
  double excess = 0.0;
  for (const double q : values) {
    const double w = std::exp((lo - q) / temperature);
    weight_sum += w;
    excess += w * (q - lo);
  }
  const double hi = *std::max_element(values.begin(), values.end());
  return std::clamp(lo + excess / weight_sum, lo, hi);
}

std::vector<double> badloc_box_scores(const ImageRecord& image, const ScoringConfig& cfg) {
  std::vector<double> scores;
  scores.reserve(image.annotations.size());
  for (const auto& ann : image.annotations) {
    double q = kMaxQuality;
    bool matched = false;
    for (const auto& pred : image.predictions) {
      if (pred.class_id != ann.class_id || iou(pred.box, ann.box) <= 0.0) continue;
      const double s = similarity(ann.box, pred.box, image.dims, cfg.similarity);
      q = matched ? std::max(q, s) : s;
      matched = true;
    }
    scores.push_back(q);
  }
  return scores;
}

std::vector<double> swapped_box_scores(const ImageRecord& image, const ScoringConfig& cfg) {
  std::vector<double> scores;
  scores.reserve(image.annotations.size());
  for (const auto& ann : image.annotations) {
    double best = -1.0;
    for (const auto& pred : image.predictions) {
      if (pred.class_id == ann.class_id || !(pred.confidence > cfg.tau_up)) continue;
      best = std::max(best, similarity(ann.box, pred.box, image.dims, cfg.similarity));
    }
    scores.push_back(best < 0.0 ? kMaxQuality : 1.0 - best);
  }
  return scores;
}

std::vector<double> overlooked_box_scores(const ImageRecord& image,
                                          const ScoringConfig& cfg, double sim_star) {
  std::vector<double> scores;
  for (const auto& pred : image.predictions) {
    if (!(pred.confidence > cfg.tau_up)) continue;
    bool overlapped = false;
    double best = -1.0;
    for (const auto& ann : image.annotations) {
      if (ann.class_id != pred.class_id) continue;
      if (iou(ann.box, pred.box) > 0.0) {
        overlapped = true;
        continue;
      }
      best = std::max(best, similarity(ann.box, pred.box, image.dims, cfg.similarity));
    }
    if (overlapped && cfg.overlooked_mode == OverlookedMode::kMatchedSkip) {
      scores.push_back(kMaxQuality);
    } else if (best >= 0.0) {
      scores.push_back(best);
    } else {
      scores.push_back(sim_star * (1.0 - pred.confidence));
    }
  }
  if (scores.empty()) scores.push_back(kMaxQuality);
  return scores;
}

double combine_subtypes(double badloc, double swap, double overlook) {
  return std::cbrt(badloc * swap * overlook);
}

ImageScore objectlab_score(const ImageRecord& image, const ScoringConfig& cfg,
                           double sim_star) {
  ImageScore out;
  out.image_id = image.image_id;
  out.badloc_boxes = badloc_box_scores(image, cfg);
  out.swap_boxes = swapped_box_scores(image, cfg);
  out.overlook_boxes = overlooked_box_scores(image, cfg, sim_star);

  const double t = cfg.softmin_temperature;
  out.badloc = out.badloc_boxes.empty() ? kMaxQuality : softmin(out.badloc_boxes, t);
  out.swap = out.swap_boxes.empty() ? kMaxQuality : softmin(out.swap_boxes, t);
  out.overlook = softmin(out.overlook_boxes, t);
  out.score = combine_subtypes(out.badloc, out.swap, out.overlook);
  return out;
}

std::vector<ImageScore> score_dataset(const Dataset& dataset, const ScoringConfig& cfg,
                                      unsigned workers) {
  const double sim_star = min_similarity(dataset, cfg.similarity, workers);
  std::vector<ImageScore> out(dataset.images.size());
  detail::parallel_for(dataset.images.size(), workers, [&](std::size_t i) {
    out[i] = objectlab_score(dataset.images[i], cfg, sim_star);
  });
  return out;
}

}  // namespace detaudit
