#include "detaudit/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace detaudit {

namespace {

void check_id_sets(const ScoreMap& scores, const TruthMap& truth) {
  std::vector<ImageId> only_scores;
  std::vector<ImageId> only_truth;
  auto s = scores.begin();
  auto t = truth.begin();
  while (s != scores.end() || t != truth.end()) {
    if (t == truth.end() || (s != scores.end() && s->first < t->first)) {
      only_scores.push_back((s++)->first);
    } else if (s == scores.end() || t->first < s->first) {
      only_truth.push_back((t++)->first);
    } else {
      ++s;
      ++t;
    }
  }
  if (only_scores.empty() && only_truth.empty()) return;

  auto list = [](const std::vector<ImageId>& ids) {
    std::string out;
    const std::size_t shown = std::min<std::size_t>(ids.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) out += (i ? "," : "") + std::to_string(ids[i]);
    if (ids.size() > shown) out += ",... (" + std::to_string(ids.size()) + " total)";
    return out;
  };
  throw EvaluationError("image id sets differ; only in scores: [" + list(only_scores) +
                        "]; only in ground truth: [" + list(only_truth) + "]");
}

}  // namespace

RankedResult rank_images(const ScoreMap& scores, const TruthMap& truth) {
  check_id_sets(scores, truth);
  std::vector<std::pair<double, ImageId>> keyed;
  keyed.reserve(scores.size());
  for (const auto& [id, score] : scores) {
    if (std::isnan(score)) throw EvaluationError("score for image " + std::to_string(id) + " is NaN");
    keyed.emplace_back(score, id);
  }
  std::sort(keyed.begin(), keyed.end());
  RankedResult ranked;
  for (const auto& [score, id] : keyed) {
    ranked.order.push_back(id);
    ranked.truth.push_back(truth.at(id));
  }
  return ranked;
}

double average_precision(const ScoreMap& scores, const TruthMap& truth) {
  const RankedResult ranked = rank_images(scores, truth);
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ranked.truth.size(); ++i) {
    if (!ranked.truth[i]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  if (hits == 0) throw EvaluationError("average precision is undefined without mislabeled images");
  return sum / static_cast<double>(hits);
}

double precision_at_k(const ScoreMap& scores, const TruthMap& truth, std::size_t k) {
  const RankedResult ranked = rank_images(scores, truth);
  if (k < 1 || k > ranked.truth.size()) {
    throw EvaluationError("precision@k needs 1 <= k <= " + std::to_string(ranked.truth.size()) +
                          ", got " + std::to_string(k));
  }
  const auto hits = std::count(ranked.truth.begin(), ranked.truth.begin() + static_cast<std::ptrdiff_t>(k), true);
  return static_cast<double>(hits) / static_cast<double>(k);
}

MetricsReport evaluate(const ScoreMap& scores, const TruthMap& truth) {
  const RankedResult ranked = rank_images(scores, truth);
  MetricsReport r;
  r.num_images = ranked.truth.size();
  if (r.num_images == 0) throw EvaluationError("nothing to evaluate: no images");

  std::size_t hits = 0;
  double ap_sum = 0.0;
  r.precision_curve.reserve(r.num_images);
  for (std::size_t i = 0; i < r.num_images; ++i) {
    if (ranked.truth[i]) {
      ++hits;
      ap_sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    r.precision_curve.push_back(static_cast<double>(hits) / static_cast<double>(i + 1));
  }
  r.num_positives = hits;
  if (hits == 0) throw EvaluationError("average precision is undefined without mislabeled images");
  r.average_precision = ap_sum / static_cast<double>(hits);
  r.precision_at_100_k = std::min<std::size_t>(100, r.num_images);
  r.precision_at_100 = r.precision_curve[r.precision_at_100_k - 1];
  r.precision_at_T = r.precision_curve[r.num_positives - 1];
  return r;
}

TruthMap truth_from_manifest(const ErrorManifest& manifest) {
  TruthMap truth;
  for (const auto& e : manifest.images) truth[e.image_id] = e.flagged();
  return truth;
}

TruthMap truth_from_manifest(const ErrorManifest& manifest, ErrorType type) {
  TruthMap truth;
  for (const auto& e : manifest.images) {
    switch (type) {
      case ErrorType::kDrop: truth[e.image_id] = e.overlooked; break;
      case ErrorType::kSwap: truth[e.image_id] = e.swapped; break;
      case ErrorType::kShift: truth[e.image_id] = e.badloc; break;
    }
  }
  return truth;
}

nlohmann::json metrics_to_json(const MetricsReport& report) {
  return {{"num_images", report.num_images},
          {"num_mislabeled", report.num_positives},
          {"average_precision", report.average_precision},
          {"precision_at_100", report.precision_at_100},
          {"precision_at_100_k", report.precision_at_100_k},
          {"precision_at_T", report.precision_at_T},
          {"T", report.num_positives},
          {"precision_curve", report.precision_curve}};
}

std::string metrics_table(const MetricsReport& report) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "images              %zu\n"
                "mislabeled (T)      %zu\n"
                "average precision   %.6f\n"
                "precision@%-9zu %.6f\n"
                "precision@T         %.6f\n",
                report.num_images, report.num_positives, report.average_precision,
                report.precision_at_100_k, report.precision_at_100, report.precision_at_T);
  return buf;
}

}  // namespace detaudit
