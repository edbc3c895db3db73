#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "detaudit/errors.hpp"
#include "detaudit/geometry.hpp"

namespace detaudit {

using ImageId = std::int64_t;

/// A dataset category. Position in `Dataset::categories` is the dense class
/// id used everywhere internally; `original_id` is the id from the file.
struct Category {
  std::int64_t original_id = 0;
  std::string name;

  friend bool operator==(const Category&, const Category&) = default;
};

struct AnnotatedBox {
  BoundingBox box;
  int class_id = 0;
  std::int64_t annotation_id = 0;

  friend bool operator==(const AnnotatedBox&, const AnnotatedBox&) = default;
};

struct PredictedBox {
  BoundingBox box;
  int class_id = 0;
  double confidence = 0.0;

  friend bool operator==(const PredictedBox&, const PredictedBox&) = default;
};

struct ImageRecord {
  ImageId image_id = 0;
  ImageDims dims;
  std::string file_name;
  std::vector<AnnotatedBox> annotations;  // the given label
  std::vector<PredictedBox> predictions;  // already filtered at tau_down

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct Dataset {
  std::vector<ImageRecord> images;  // ascending image_id
  std::vector<Category> categories;

  int num_classes() const { return static_cast<int>(categories.size()); }

  const ImageRecord* find(ImageId id) const;
  std::optional<int> dense_class(std::int64_t original_id) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct IngestConfig {
  double tau_down = 0.5;  // predictions must strictly exceed this
  bool clip_boxes = true;

  bool is_valid() const { return tau_down >= 0.0 && tau_down < 1.0; }
};

// COCO annotation JSON: {images[{id,width,height,file_name?}],
// annotations[{id?,image_id,category_id,bbox:[x,y,w,h]}], categories[{id,name}]}.
// Throws ParseError on malformed text and ValidationError on contract
// violations; warnings (clipped boxes) are appended to `warnings`.
Dataset parse_annotations(std::string_view text, const IngestConfig& cfg,
                          ValidationReport* warnings = nullptr,
                          const std::string& source = "<annotations>");
Dataset load_annotations(const std::filesystem::path& path,
                         const IngestConfig& cfg = {},
                         ValidationReport* warnings = nullptr);

// COCO detection results: [{image_id, category_id, bbox:[x,y,w,h], score}],
// or that list under "predictions" in an object that also carries a header.
// Returns `dataset` with predictions replaced by the filtered file contents.
Dataset parse_predictions(std::string_view text, Dataset dataset,
                          const IngestConfig& cfg,
                          ValidationReport* warnings = nullptr,
                          const std::string& source = "<predictions>");
Dataset load_predictions(const std::filesystem::path& path, Dataset dataset,
                         const IngestConfig& cfg = {},
                         ValidationReport* warnings = nullptr);

/// COCO annotation document for `dataset`. `info` goes in the "info" field
/// when non-null.
nlohmann::json annotations_to_json(const Dataset& dataset,
                                   const nlohmann::json& info = nullptr);

/// COCO detection-results list for the predictions held in `dataset`.
nlohmann::json predictions_to_json(const Dataset& dataset);

nlohmann::json report_to_json(const ValidationReport& report);

/// Smallest similarity between an annotated and a predicted box of the same
/// image, over all images. 0 when no image has both.
double min_similarity(const Dataset& dataset, const SimilarityParams& params,
                      unsigned workers = 1);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace detaudit
