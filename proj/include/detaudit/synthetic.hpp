#pragma once

#include <cstddef>
#include <cstdint>

#include "detaudit/dataset.hpp"

namespace detaudit {

/// Clean benchmark data: each image holds 1..max_boxes boxes, each inside its
/// own cell of a 3 x 2 grid, so boxes of one image never overlap.
struct SyntheticSpec {
  std::size_t num_images = 500;
  int num_classes = 5;
  int min_boxes = 1;
  int max_boxes = 5;
  int width = 640;
  int height = 480;
  std::uint64_t seed = 0;

  void validate() const;
};

Dataset make_synthetic_dataset(const SyntheticSpec& spec);

/// A stand-in detector that echoes the given annotations.
struct OracleSpec {
  double confidence = 0.99;
  double jitter = 0.0;  // each edge moves by up to this fraction of its side
  std::uint64_t seed = 0;

  void validate() const;
};

/// `source` with predictions replaced by copies of its annotations at the
/// configured confidence, optionally jittered.
Dataset oracle_predict(const Dataset& source, const OracleSpec& spec);

/// `target` with each image's predictions taken from the same image id in
/// `source`, keeping only those above `tau_down`.
Dataset transfer_predictions(Dataset target, const Dataset& source, double tau_down = 0.5);

}  // namespace detaudit
