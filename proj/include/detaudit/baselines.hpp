#pragma once

#include <cstddef>
#include <vector>

#include "detaudit/dataset.hpp"
#include "detaudit/geometry.hpp"

namespace detaudit {

// Comparison label-quality scores. Classification-style reductions (tiles,
// clusters) use class id K == num_classes as the background label.

struct MapConfig {
  std::vector<double> iou_thresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                        0.75, 0.80, 0.85, 0.90, 0.95};
  int interpolation_points = 101;

  void validate() const;
};

struct TileConfig {
  int grid_size = 8;
  double overlap_threshold = 0.5;  // fraction of the tile covered by a box
  double background_prior_weight = 1.0;

  void validate() const;
};

struct ClodConfig {
  double linkage_cutoff = 0.5;  // in IoU distance, 1 - IoU

  void validate() const;
};

struct BoxCluster {
  std::vector<std::size_t> annotation_indices;
  std::vector<std::size_t> prediction_indices;
  int label = 0;                     // class id, or K for background
  std::vector<double> probabilities;  // K + 1 entries summing to 1
};

/// Interpolated AP for one class at one IoU threshold. `annotations` and
/// `predictions` are already restricted to that class.
double average_precision_at_iou(const std::vector<BoundingBox>& annotations,
                                const std::vector<PredictedBox>& predictions,
                                double iou_threshold, int interpolation_points);

/// Per-image mean average precision of predictions against the given label.
/// 1 when both sides are empty; a class present on only one side scores 0.
double per_image_map(const ImageRecord& image, const MapConfig& cfg);

/// Tile-reduction self-confidence, pooled over the J x J grid by geometric
/// mean.
double tile_score(const ImageRecord& image, int num_classes, const TileConfig& cfg,
                  const SimilarityParams& params);

/// Box of tile (row, col) in a J x J partition of the image.
BoundingBox tile_box(const ImageDims& dims, int grid_size, int row, int col);

/// Single-linkage clustering of annotated and predicted boxes under the
/// 1 - IoU distance. Clusters are ordered by their lowest member index
/// (annotations first, then predictions).
std::vector<BoxCluster> clod_clusters(const ImageRecord& image, int num_classes,
                                      const ClodConfig& cfg);

/// Mean self-confidence over the image's clusters; 1 for an image with no
/// boxes.
double clod_score(const ImageRecord& image, int num_classes, const ClodConfig& cfg);

}  // namespace detaudit
