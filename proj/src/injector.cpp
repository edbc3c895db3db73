#include "detaudit/injector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "detaudit/random.hpp"
#include "jsonl.hpp"

namespace detaudit {

using nlohmann::json;

const char* to_string(ErrorType type) {
  switch (type) {
    case ErrorType::kDrop: return "drop";
    case ErrorType::kSwap: return "swap";
    case ErrorType::kShift: return "shift";
  }
  return "?";
}

void InjectionSpec::validate() const {
  if (!(image_fraction >= 0.0 && image_fraction <= 1.0)) {
    throw ConfigError("inject: image fraction must lie in [0, 1]");
  }
  for (const double p : {p_drop, p_swap, p_shift}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("inject: type probabilities must lie in [0, 1]");
  }
  if (p_drop + p_swap + p_shift > 1.0 + 1e-12) {
    throw ConfigError("inject: type probabilities must sum to at most 1");
  }
  if (p_drop + p_swap + p_shift <= 0.0) {
    throw ConfigError("inject: at least one error type needs a positive probability");
  }
  if (!(shift_min > 0.0 && shift_min <= shift_max && shift_max <= 1.0)) {
    throw ConfigError("inject: shift range must satisfy 0 < min <= max <= 1");
  }
}

std::size_t ErrorManifest::flagged_count() const {
  return static_cast<std::size_t>(
      std::count_if(images.begin(), images.end(), [](const ImageErrors& e) { return e.flagged(); }));
}

namespace {

BoundingBox shift_box(const BoundingBox& b, const ImageDims& dims, const InjectionSpec& spec,
                      Rng& rng) {
  const double fx = rng.uniform(spec.shift_min, spec.shift_max);
  const double fy = rng.uniform(spec.shift_min, spec.shift_max);
  const double sx = rng.bernoulli(0.5) ? 1.0 : -1.0;
  const double sy = rng.bernoulli(0.5) ? 1.0 : -1.0;
  const double dx = fx * b.width();
  const double dy = fy * b.height();
  auto moved = [&](double ox, double oy) {
    return clip_to_image({b.x1 + ox, b.y1 + oy, b.x2 + ox, b.y2 + oy}, dims);
  };
  // Only a full-side displacement against the image border can clip a box to
  // nothing; flip direction on that axis, then halve as a last resort.
  const std::array<std::pair<double, double>, 4> signs = {{{sx, sy}, {-sx, sy}, {sx, -sy}, {-sx, -sy}}};
  for (const auto& [fsx, fsy] : signs) {
    const BoundingBox c = moved(fsx * dx, fsy * dy);
    if (c.is_valid()) return c;
  }
  return moved(0.5 * sx * dx, 0.5 * sy * dy);
}

}  // namespace

InjectionResult inject_errors(const Dataset& clean, const InjectionSpec& spec) {
  spec.validate();
  std::size_t total_boxes = 0;
  for (const auto& img : clean.images) total_boxes += img.annotations.size();
  if (spec.image_fraction > 0.0 && total_boxes == 0) {
    throw InjectionError("cannot inject errors into a dataset without annotated boxes");
  }

  InjectionResult out;
  out.corrupted = clean;
  for (auto& img : out.corrupted.images) img.predictions.clear();
  out.manifest.images.reserve(clean.images.size());

  Rng rng(spec.seed);
  const int num_classes = clean.num_classes();

  for (auto& img : out.corrupted.images) {
    ImageErrors errors;
    errors.image_id = img.image_id;
    const std::size_t n = img.annotations.size();

    if (n == 0 || !rng.bernoulli(spec.image_fraction)) {
      out.manifest.images.push_back(std::move(errors));
      continue;
    }

    const double p_drop = (spec.allow_empty_images || n > 1) ? spec.p_drop : 0.0;
    const double p_swap = num_classes >= 2 ? spec.p_swap : 0.0;
    const double p_shift = spec.p_shift;
    if (p_drop + p_swap + p_shift <= 0.0) {
      out.manifest.images.push_back(std::move(errors));
      continue;
    }
    bool drop = false, swap = false, shift = false;
    while (!(drop || swap || shift)) {
      drop = rng.bernoulli(p_drop);
      swap = rng.bernoulli(p_swap);
      shift = rng.bernoulli(p_shift);
    }

    const std::vector<AnnotatedBox> original = img.annotations;
    std::vector<bool> touched(n, false);

    if (swap) {
      const std::size_t i = rng.below(n);
      AnnotatedBox& a = img.annotations[i];
      // Uniform over the K - 1 other classes.
      int k = static_cast<int>(rng.below(static_cast<std::size_t>(num_classes - 1)));
      if (k >= a.class_id) ++k;
      errors.details.push_back({ErrorType::kSwap, i, a.annotation_id, a.box, a.class_id, a.box, k});
      a.class_id = k;
      touched[i] = true;
      errors.swapped = true;
    }
    if (shift) {
      const std::size_t i = rng.below(n);
      AnnotatedBox& a = img.annotations[i];
      const BoundingBox moved = shift_box(a.box, img.dims, spec, rng);
      errors.details.push_back(
          {ErrorType::kShift, i, a.annotation_id, original[i].box, original[i].class_id, moved, a.class_id});
      a.box = moved;
      touched[i] = true;
      errors.badloc = true;
    }
    if (drop) {
      std::vector<std::size_t> candidates;
      for (std::size_t i = 0; i < n; ++i) {
        if (!touched[i]) candidates.push_back(i);
      }
      if (!candidates.empty()) {
        const std::size_t i = candidates[rng.below(candidates.size())];
        errors.details.push_back({ErrorType::kDrop, i, original[i].annotation_id, original[i].box,
                                  original[i].class_id, original[i].box, original[i].class_id});
        img.annotations.erase(img.annotations.begin() + static_cast<std::ptrdiff_t>(i));
        errors.overlooked = true;
      }
    }
    out.manifest.images.push_back(std::move(errors));
  }
  return out;
}

json spec_to_json(const InjectionSpec& spec) {
  return {{"image_fraction", spec.image_fraction},
          {"p_drop", spec.p_drop},
          {"p_swap", spec.p_swap},
          {"p_shift", spec.p_shift},
          {"shift_min", spec.shift_min},
          {"shift_max", spec.shift_max},
          {"seed", spec.seed},
          {"allow_empty_images", spec.allow_empty_images}};
}

std::string manifest_to_jsonl(const ErrorManifest& manifest, const Dataset& dataset,
                              const json& header) {
  auto category = [&](int k) { return dataset.categories.at(static_cast<std::size_t>(k)).original_id; };
  auto bbox = [](const BoundingBox& b) { return json::array({b.x1, b.y1, b.x2 - b.x1, b.y2 - b.y1}); };

  std::string out = detail::header_line(header);
  for (const auto& img : manifest.images) {
    json details = json::array();
    for (const auto& d : img.details) {
      json rec = {{"type", to_string(d.type)},
                  {"box_index", d.box_index},
                  {"annotation_id", d.annotation_id},
                  {"original", {{"bbox", bbox(d.original_box)}, {"category_id", category(d.original_class)}}}};
      if (d.type == ErrorType::kDrop) {
        rec["corrupted"] = nullptr;
      } else {
        rec["corrupted"] = {{"bbox", bbox(d.new_box)}, {"category_id", category(d.new_class)}};
      }
      details.push_back(std::move(rec));
    }
    const json rec = {{"image_id", img.image_id},
                      {"overlooked", img.overlooked},
                      {"swapped", img.swapped},
                      {"badloc", img.badloc},
                      {"details", std::move(details)}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

ErrorManifest parse_manifest(std::string_view text, const std::string& source) {
  ErrorManifest manifest;
  detail::for_each_record(text, source, [&](const json& rec, const std::string& where) {
    auto flag = [&](const char* key) {
      auto it = rec.find(key);
      if (it == rec.end() || !it->is_boolean()) {
        throw ParseError(source, where + ": \"" + key + "\" must be a boolean");
      }
      return it->get<bool>();
    };
    ImageErrors e;
    e.image_id = detail::record_image_id(rec, source, where);
    e.overlooked = flag("overlooked");
    e.swapped = flag("swapped");
    e.badloc = flag("badloc");
    manifest.images.push_back(std::move(e));
  });
  return manifest;
}

}  // namespace detaudit
