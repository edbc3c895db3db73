#include "detaudit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "detaudit/random.hpp"

namespace detaudit {

namespace {
constexpr int kGridCols = 3;
constexpr int kGridRows = 2;
}  // namespace

void SyntheticSpec::validate() const {
  if (num_classes < 1) throw ConfigError("synthetic: need at least one class");
  if (min_boxes < 0 || min_boxes > max_boxes || max_boxes > kGridCols * kGridRows) {
    throw ConfigError("synthetic: box count range must satisfy 0 <= min <= max <= 6");
  }
  if (width < 8 * kGridCols || height < 8 * kGridRows) {
    throw ConfigError("synthetic: image too small for the placement grid");
  }
}

Dataset make_synthetic_dataset(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Dataset ds;
  for (int k = 0; k < spec.num_classes; ++k) {
    ds.categories.push_back({k + 1, "class_" + std::to_string(k + 1)});
  }

  const double cell_w = static_cast<double>(spec.width) / kGridCols;
  const double cell_h = static_cast<double>(spec.height) / kGridRows;
  std::int64_t next_annotation = 1;

  for (std::size_t i = 0; i < spec.num_images; ++i) {
    ImageRecord img;
    img.image_id = static_cast<ImageId>(i + 1);
    img.dims = {spec.width, spec.height};
    char name[32];
    std::snprintf(name, sizeof(name), "synthetic_%06zu.png", i + 1);
    img.file_name = name;

    const int n = spec.min_boxes +
                  static_cast<int>(rng.below(static_cast<std::size_t>(spec.max_boxes - spec.min_boxes + 1)));
    std::vector<int> cells(kGridCols * kGridRows);
    std::iota(cells.begin(), cells.end(), 0);
    // Partial Fisher-Yates: the first n cells are a uniform sample.
    for (int c = 0; c < n; ++c) {
      const std::size_t j = static_cast<std::size_t>(c) + rng.below(cells.size() - static_cast<std::size_t>(c));
      std::swap(cells[static_cast<std::size_t>(c)], cells[j]);
    }
    for (int c = 0; c < n; ++c) {
      const int cell = cells[static_cast<std::size_t>(c)];
      const double cx = (cell % kGridCols) * cell_w;
      const double cy = (cell / kGridCols) * cell_h;
      const double w = std::floor(rng.uniform(0.35, 0.65) * cell_w);
      const double h = std::floor(rng.uniform(0.35, 0.65) * cell_h);
      const double x = std::ceil(cx) + std::floor(rng.uniform() * (cell_w - w - 1.0));
      const double y = std::ceil(cy) + std::floor(rng.uniform() * (cell_h - h - 1.0));
      const int cls = static_cast<int>(rng.below(static_cast<std::size_t>(spec.num_classes)));
      img.annotations.push_back({BoundingBox::from_xywh(x, y, w, h), cls, next_annotation++});
    }
    ds.images.push_back(std::move(img));
  }
  return ds;
}

void OracleSpec::validate() const {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw ConfigError("oracle: confidence must lie in [0, 1]");
  }
  if (!(jitter >= 0.0 && jitter < 0.5)) throw ConfigError("oracle: jitter must lie in [0, 0.5)");
}

Dataset oracle_predict(const Dataset& source, const OracleSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Dataset out = source;
  for (auto& img : out.images) {
    img.predictions.clear();
    for (const auto& a : img.annotations) {
      BoundingBox b = a.box;
      if (spec.jitter > 0.0) {
        const double w = b.width();
        const double h = b.height();
        b.x1 += rng.uniform(-spec.jitter, spec.jitter) * w;
        b.y1 += rng.uniform(-spec.jitter, spec.jitter) * h;
        b.x2 += rng.uniform(-spec.jitter, spec.jitter) * w;
        b.y2 += rng.uniform(-spec.jitter, spec.jitter) * h;
        b = clip_to_image(b, img.dims);
      }
      img.predictions.push_back({b, a.class_id, spec.confidence});
    }
  }
  return out;
}

Dataset transfer_predictions(Dataset target, const Dataset& source, double tau_down) {
  for (auto& img : target.images) {
    img.predictions.clear();
    if (const ImageRecord* src = source.find(img.image_id)) {
      for (const auto& p : src->predictions) {
        if (p.confidence > tau_down) img.predictions.push_back(p);
      }
    }
  }
  return target;
}

}  // namespace detaudit
