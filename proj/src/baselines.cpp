#include "detaudit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

namespace detaudit {

void MapConfig::validate() const {
  if (iou_thresholds.empty()) throw ConfigError("map: at least one IoU threshold is required");
  for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
    const double t = iou_thresholds[i];
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("map: IoU thresholds must lie in (0, 1]");
    if (i > 0 && !(t > iou_thresholds[i - 1])) {
      throw ConfigError("map: IoU thresholds must be strictly increasing");
    }
  }
  if (interpolation_points < 2) throw ConfigError("map: interpolation points must be >= 2");
}

void TileConfig::validate() const {
  if (grid_size < 1) throw ConfigError("tile: grid size must be >= 1");
  if (!(overlap_threshold > 0.0 && overlap_threshold <= 1.0)) {
    throw ConfigError("tile: overlap threshold must lie in (0, 1]");
  }
  if (!(background_prior_weight >= 0.0) || !std::isfinite(background_prior_weight)) {
    throw ConfigError("tile: background prior weight must be non-negative");
  }
}

void ClodConfig::validate() const {
  if (!(linkage_cutoff > 0.0 && linkage_cutoff <= 1.0)) {
    throw ConfigError("clod: linkage cutoff must lie in (0, 1]");
  }
}

namespace {

bool box_less(const BoundingBox& a, const BoundingBox& b) {
  return std::tie(a.x1, a.y1, a.x2, a.y2) < std::tie(b.x1, b.y1, b.x2, b.y2);
}

// Per-box class distribution: confidence on the predicted class, the rest on
// background (index K).
void add_prediction(std::vector<double>& probs, const PredictedBox& p, double weight) {
  probs[static_cast<std::size_t>(p.class_id)] += weight * p.confidence;
  probs.back() += weight * (1.0 - p.confidence);
}

void normalize_or_background(std::vector<double>& probs, double total) {
  if (total > 0.0) {
    for (auto& v : probs) v /= total;
  } else {
    std::fill(probs.begin(), probs.end(), 0.0);
    probs.back() = 1.0;
  }
}

double geometric_mean(const std::vector<double>& values) {
  double log_sum = 0.0;
  for (const double v : values) {
    if (v <= 0.0) return 0.0;
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(values.size()));
}

}  // namespace

double average_precision_at_iou(const std::vector<BoundingBox>& annotations,
                                const std::vector<PredictedBox>& predictions,
                                double iou_threshold, int interpolation_points) {
  if (annotations.empty() || predictions.empty()) return 0.0;

  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predictions[a].confidence > predictions[b].confidence;
  });

  std::vector<bool> taken(annotations.size(), false);
  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t tp = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const BoundingBox& pb = predictions[order[rank]].box;
    std::optional<std::size_t> best;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < annotations.size(); ++g) {
      if (taken[g]) continue;
      const double o = iou(pb, annotations[g]);
      if (o < iou_threshold) continue;
      // Equal-IoU candidates resolve by geometry, not by input position.
      if (!best || o > best_iou ||
          (o == best_iou && box_less(annotations[g], annotations[*best]))) {
        best = g;
        best_iou = o;
      }
    }
    if (best) {
      taken[*best] = true;
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(rank + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(annotations.size()));
  }

  // Interpolated precision: best precision at any recall >= r.
  for (std::size_t i = precision.size() - 1; i-- > 0;) {
    precision[i] = std::max(precision[i], precision[i + 1]);
  }
  double sum = 0.0;
  const int n = interpolation_points;
  for (int j = 0; j < n; ++j) {
    const double r = static_cast<double>(j) / static_cast<double>(n - 1);
    auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / static_cast<double>(n);
}

double per_image_map(const ImageRecord& image, const MapConfig& cfg) {
  std::set<int> classes;
  for (const auto& a : image.annotations) classes.insert(a.class_id);
  for (const auto& p : image.predictions) classes.insert(p.class_id);
  if (classes.empty()) return 1.0;

  double total = 0.0;
  for (const int k : classes) {
    std::vector<BoundingBox> gts;
    std::vector<PredictedBox> preds;
    for (const auto& a : image.annotations) {
      if (a.class_id == k) gts.push_back(a.box);
    }
    for (const auto& p : image.predictions) {
      if (p.class_id == k) preds.push_back(p);
    }
    if (gts.empty() || preds.empty()) continue;
    double class_ap = 0.0;
    for (const double t : cfg.iou_thresholds) {
      class_ap += average_precision_at_iou(gts, preds, t, cfg.interpolation_points);
    }
    total += class_ap / static_cast<double>(cfg.iou_thresholds.size());
  }
  return total / static_cast<double>(classes.size());
}

BoundingBox tile_box(const ImageDims& dims, int grid_size, int row, int col) {
  const double w = dims.width;
  const double h = dims.height;
  const double j = grid_size;
  return {col * w / j, row * h / j, (col + 1) * w / j, (row + 1) * h / j};
}

double tile_score(const ImageRecord& image, int num_classes, const TileConfig& cfg,
                  const SimilarityParams& params) {
  const std::size_t background = static_cast<std::size_t>(num_classes);
  std::vector<double> tile_scores;
  tile_scores.reserve(static_cast<std::size_t>(cfg.grid_size * cfg.grid_size));

  for (int row = 0; row < cfg.grid_size; ++row) {
    for (int col = 0; col < cfg.grid_size; ++col) {
      const BoundingBox tile = tile_box(image.dims, cfg.grid_size, row, col);

      std::size_t label = background;
      double best_cover = 0.0;
      for (const auto& a : image.annotations) {
        const double cover = intersection_area(tile, a.box) / tile.area();
        if (cover > best_cover) {
          best_cover = cover;
          label = static_cast<std::size_t>(a.class_id);
        }
      }
      if (best_cover < cfg.overlap_threshold) label = background;

      std::vector<double> probs(background + 1, 0.0);
      probs.back() = cfg.background_prior_weight;
      double total = cfg.background_prior_weight;
      for (const auto& p : image.predictions) {
        const double w = similarity(tile, p.box, image.dims, params);
        add_prediction(probs, p, w);
        total += w;
      }
      normalize_or_background(probs, total);
      tile_scores.push_back(probs[label]);
    }
  }
  return geometric_mean(tile_scores);
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<BoxCluster> clod_clusters(const ImageRecord& image, int num_classes,
                                      const ClodConfig& cfg) {
  const std::size_t n_ann = image.annotations.size();
  const std::size_t n = n_ann + image.predictions.size();
  auto box_at = [&](std::size_t i) -> const BoundingBox& {
    return i < n_ann ? image.annotations[i].box : image.predictions[i - n_ann].box;
  };

  // Single linkage with a stopping distance is Kruskal's algorithm cut at
  // that distance: merge closest pairs first, ties by member indices.
  struct Edge {
    double distance;
    std::size_t a;
    std::size_t b;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = 1.0 - iou(box_at(i), box_at(j));
      if (d <= cfg.linkage_cutoff) edges.push_back({d, i, j});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.distance, x.a, x.b) < std::tie(y.distance, y.a, y.b);
  });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (const Edge& e : edges) {
    const std::size_t ra = find_root(parent, e.a);
    const std::size_t rb = find_root(parent, e.b);
    if (ra == rb) continue;
    parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  // The root is always the lowest member index, so clusters come out ordered.
  std::vector<BoxCluster> clusters;
  std::vector<std::size_t> slot(n, n);
  const std::size_t background = static_cast<std::size_t>(num_classes);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find_root(parent, i);
    if (slot[root] == n) {
      slot[root] = clusters.size();
      clusters.emplace_back();
    }
    BoxCluster& c = clusters[slot[root]];
    if (i < n_ann) {
      c.annotation_indices.push_back(i);
    } else {
      c.prediction_indices.push_back(i - n_ann);
    }
  }

  for (auto& c : clusters) {
    std::vector<int> votes(background, 0);
    for (const auto i : c.annotation_indices) ++votes[static_cast<std::size_t>(image.annotations[i].class_id)];
    c.label = num_classes;
    int best_votes = 0;
    for (std::size_t k = 0; k < votes.size(); ++k) {
      if (votes[k] > best_votes) {
        best_votes = votes[k];
        c.label = static_cast<int>(k);
      }
    }
    c.probabilities.assign(background + 1, 0.0);
    double total = 0.0;
    for (const auto i : c.prediction_indices) {
      const PredictedBox& p = image.predictions[i];
      add_prediction(c.probabilities, p, p.confidence);
      total += p.confidence;
    }
    normalize_or_background(c.probabilities, total);
  }
  return clusters;
}

double clod_score(const ImageRecord& image, int num_classes, const ClodConfig& cfg) {
  const auto clusters = clod_clusters(image, num_classes, cfg);
  if (clusters.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& c : clusters) sum += c.probabilities[static_cast<std::size_t>(c.label)];
  return sum / static_cast<double>(clusters.size());
}

}  // namespace detaudit
