#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "detaudit/dataset.hpp"

namespace detaudit {

enum class ErrorType { kDrop, kSwap, kShift };

const char* to_string(ErrorType type);

struct InjectionSpec {
  double image_fraction = 0.22;
  // Independent per-type draws for a selected image, redrawn until at least
  // one type fires.
  double p_drop = 1.0 / 3.0;
  double p_swap = 1.0 / 3.0;
  double p_shift = 1.0 / 3.0;
  // Shift magnitude per axis, as a fraction of the box side.
  double shift_min = 0.25;
  double shift_max = 0.5;
  std::uint64_t seed = 0;
  bool allow_empty_images = true;

  void validate() const;
};

struct BoxPerturbation {
  ErrorType type = ErrorType::kDrop;
  std::size_t box_index = 0;  // position in the clean annotation list
  std::int64_t annotation_id = 0;
  BoundingBox original_box;
  int original_class = 0;
  BoundingBox new_box;  // unchanged for swaps, meaningless for drops
  int new_class = 0;    // unchanged for shifts and drops
};

struct ImageErrors {
  ImageId image_id = 0;
  bool overlooked = false;  // a box was dropped
  bool swapped = false;     // a class label was changed
  bool badloc = false;      // a box was shifted
  std::vector<BoxPerturbation> details;

  bool flagged() const { return overlooked || swapped || badloc; }
};

struct ErrorManifest {
  std::vector<ImageErrors> images;  // same order as the dataset

  std::size_t flagged_count() const;
};

struct InjectionResult {
  Dataset corrupted;
  ErrorManifest manifest;
};

/// Corrupts the annotations of a clean dataset. Predictions in `clean` are
/// dropped from the result. Deterministic in (clean, spec).
InjectionResult inject_errors(const Dataset& clean, const InjectionSpec& spec);

nlohmann::json spec_to_json(const InjectionSpec& spec);

/// JSONL: one header line {"header": ...}, then one record per image.
std::string manifest_to_jsonl(const ErrorManifest& manifest, const Dataset& dataset,
                              const nlohmann::json& header);

/// Reads the per-image flags back. Per-box details are not retained.
ErrorManifest parse_manifest(std::string_view text, const std::string& source = "<manifest>");

}  // namespace detaudit
