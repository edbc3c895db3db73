#include "detaudit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "parallel.hpp"

namespace detaudit {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(source, e.what(), e.byte);
  }
}

class Reader {
 public:
  explicit Reader(const std::string& source) : source_(source) {}

  const json& field(const json& obj, const char* key,
                    const std::string& where) const {
    if (!obj.is_object()) fail(where + " is not an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(where + ": missing \"" + key + "\"");
    return *it;
  }

  const json* optional_field(const json& obj, const char* key) const {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  }

  const json& array(const json& v, const std::string& where) const {
    if (!v.is_array()) fail(where + " is not an array");
    return v;
  }

  std::int64_t integer(const json& v, const std::string& where) const {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && std::floor(d) == d) return static_cast<std::int64_t>(d);
    }
    fail(where + " is not an integer");
  }

  double number(const json& v, const std::string& where) const {
    if (!v.is_number()) fail(where + " is not a number");
    return v.get<double>();
  }

  std::string string(const json& v, const std::string& where) const {
    if (!v.is_string()) fail(where + " is not a string");
    return v.get<std::string>();
  }

  BoundingBox xywh(const json& v, const std::string& where) const {
    if (!v.is_array() || v.size() != 4) fail(where + " must be [x, y, w, h]");
    double c[4];
    for (std::size_t i = 0; i < 4; ++i) c[i] = number(v[i], where);
    return BoundingBox::from_xywh(c[0], c[1], c[2], c[3]);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(source_, what);
  }

 private:
  const std::string& source_;
};

std::string describe(const BoundingBox& b) {
  std::ostringstream os;
  os << "[" << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2 << "]";
  return os.str();
}

// Validates a box against its image, clipping when allowed. Returns nullopt
// (after recording an error) when the box cannot be used.
std::optional<BoundingBox> admit_box(BoundingBox box, const ImageRecord& image,
                                     const IngestConfig& cfg,
                                     const std::string& what,
                                     ValidationReport& issues) {
  if (!box.is_valid()) {
    issues.push_back({Severity::kError, image.image_id,
                      what + " has non-positive width/height or non-finite "
                             "coordinates: " + describe(box)});
    return std::nullopt;
  }
  if (inside_image(box, image.dims)) return box;
  if (!cfg.clip_boxes) {
    issues.push_back({Severity::kError, image.image_id,
                      what + " extends past the image bounds: " + describe(box)});
    return std::nullopt;
  }
  const BoundingBox clipped = clip_to_image(box, image.dims);
  if (!clipped.is_valid()) {
    issues.push_back({Severity::kError, image.image_id,
                      what + " lies outside the image: " + describe(box)});
    return std::nullopt;
  }
  issues.push_back({Severity::kWarning, image.image_id,
                    what + " clipped from " + describe(box) + " to " +
                        describe(clipped)});
  return clipped;
}

void finish(ValidationReport& issues, ValidationReport* warnings) {
  const bool failed = std::any_of(issues.begin(), issues.end(), [](const auto& i) {
    return i.severity == Severity::kError;
  });
  if (failed) throw ValidationError(std::move(issues));
  if (warnings) warnings->insert(warnings->end(), issues.begin(), issues.end());
}

std::unordered_map<ImageId, std::size_t> index_images(const Dataset& ds) {
  std::unordered_map<ImageId, std::size_t> index;
  for (std::size_t i = 0; i < ds.images.size(); ++i) index[ds.images[i].image_id] = i;
  return index;
}

}  // namespace

const ImageRecord* Dataset::find(ImageId id) const {
  auto it = std::lower_bound(images.begin(), images.end(), id,
                             [](const ImageRecord& r, ImageId v) { return r.image_id < v; });
  return it != images.end() && it->image_id == id ? &*it : nullptr;
}

std::optional<int> Dataset::dense_class(std::int64_t original_id) const {
  auto it = std::lower_bound(
      categories.begin(), categories.end(), original_id,
      [](const Category& c, std::int64_t v) { return c.original_id < v; });
  if (it == categories.end() || it->original_id != original_id) return std::nullopt;
  return static_cast<int>(it - categories.begin());
}

Dataset parse_annotations(std::string_view text, const IngestConfig& cfg,
                          ValidationReport* warnings, const std::string& source) {
  if (!cfg.is_valid()) throw ConfigError("tau_down must lie in [0, 1)");
  const json root = parse_json(text, source);
  const Reader rd(source);
  if (!root.is_object()) rd.fail("annotation file root is not an object");

  Dataset ds;
  ValidationReport issues;

  const json& cats = rd.array(rd.field(root, "categories", "root"), "categories");
  for (std::size_t i = 0; i < cats.size(); ++i) {
    const std::string where = "categories[" + std::to_string(i) + "]";
    Category c;
    c.original_id = rd.integer(rd.field(cats[i], "id", where), where + ".id");
    if (const json* name = rd.optional_field(cats[i], "name")) {
      c.name = rd.string(*name, where + ".name");
    }
    ds.categories.push_back(std::move(c));
  }
  std::stable_sort(ds.categories.begin(), ds.categories.end(),
                   [](const Category& a, const Category& b) { return a.original_id < b.original_id; });
  for (std::size_t i = 1; i < ds.categories.size(); ++i) {
    if (ds.categories[i].original_id == ds.categories[i - 1].original_id) {
      issues.push_back({Severity::kError, std::nullopt,
                        "duplicate category id " +
                            std::to_string(ds.categories[i].original_id)});
    }
  }

  const json& imgs = rd.array(rd.field(root, "images", "root"), "images");
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    const std::string where = "images[" + std::to_string(i) + "]";
    ImageRecord rec;
    rec.image_id = rd.integer(rd.field(imgs[i], "id", where), where + ".id");
    const std::int64_t w = rd.integer(rd.field(imgs[i], "width", where), where + ".width");
    const std::int64_t h = rd.integer(rd.field(imgs[i], "height", where), where + ".height");
    if (const json* fn = rd.optional_field(imgs[i], "file_name")) {
      rec.file_name = rd.string(*fn, where + ".file_name");
    }
    if (w < 1 || h < 1 || w > std::numeric_limits<int>::max() ||
        h > std::numeric_limits<int>::max()) {
      issues.push_back({Severity::kError, rec.image_id,
                        "image has invalid dimensions " + std::to_string(w) +
                            "x" + std::to_string(h)});
      continue;
    }
    rec.dims = {static_cast<int>(w), static_cast<int>(h)};
    ds.images.push_back(std::move(rec));
  }
  std::stable_sort(ds.images.begin(), ds.images.end(),
                   [](const ImageRecord& a, const ImageRecord& b) { return a.image_id < b.image_id; });
  for (std::size_t i = 1; i < ds.images.size(); ++i) {
    if (ds.images[i].image_id == ds.images[i - 1].image_id) {
      issues.push_back({Severity::kError, ds.images[i].image_id, "duplicate image id"});
    }
  }

  const auto index = index_images(ds);
  if (const json* anns = rd.optional_field(root, "annotations")) {
    rd.array(*anns, "annotations");
    for (std::size_t i = 0; i < anns->size(); ++i) {
      const json& a = (*anns)[i];
      const std::string where = "annotations[" + std::to_string(i) + "]";
      const ImageId image_id = rd.integer(rd.field(a, "image_id", where), where + ".image_id");
      const std::int64_t cat = rd.integer(rd.field(a, "category_id", where), where + ".category_id");
      const BoundingBox raw = rd.xywh(rd.field(a, "bbox", where), where + ".bbox");
      std::int64_t ann_id = static_cast<std::int64_t>(i) + 1;
      if (const json* id = rd.optional_field(a, "id")) ann_id = rd.integer(*id, where + ".id");

      auto img = index.find(image_id);
      if (img == index.end()) {
        issues.push_back({Severity::kError, image_id,
                          where + " references unknown image id " + std::to_string(image_id)});
        continue;
      }
      const auto dense = ds.dense_class(cat);
      if (!dense) {
        issues.push_back({Severity::kError, image_id,
                          where + " references unknown category id " + std::to_string(cat)});
        continue;
      }
      ImageRecord& rec = ds.images[img->second];
      const auto box = admit_box(raw, rec, cfg, where, issues);
      if (!box) continue;
      rec.annotations.push_back({*box, *dense, ann_id});
    }
  }

  finish(issues, warnings);
  return ds;
}

Dataset load_annotations(const std::filesystem::path& path, const IngestConfig& cfg,
                         ValidationReport* warnings) {
  return parse_annotations(read_text_file(path), cfg, warnings, path.string());
}

Dataset parse_predictions(std::string_view text, Dataset dataset,
                          const IngestConfig& cfg, ValidationReport* warnings,
                          const std::string& source) {
  if (!cfg.is_valid()) throw ConfigError("tau_down must lie in [0, 1)");
  const json doc = parse_json(text, source);
  const Reader rd(source);
  // Either a bare COCO results list or {"header": ..., "predictions": [...]}.
  const json& root = doc.is_object() ? rd.field(doc, "predictions", "root") : doc;
  rd.array(root, "predictions");

  for (auto& img : dataset.images) img.predictions.clear();
  const auto index = index_images(dataset);
  ValidationReport issues;

  for (std::size_t i = 0; i < root.size(); ++i) {
    const json& p = root[i];
    const std::string where = "predictions[" + std::to_string(i) + "]";
    const ImageId image_id = rd.integer(rd.field(p, "image_id", where), where + ".image_id");
    const std::int64_t cat = rd.integer(rd.field(p, "category_id", where), where + ".category_id");
    const BoundingBox raw = rd.xywh(rd.field(p, "bbox", where), where + ".bbox");
    const double score = rd.number(rd.field(p, "score", where), where + ".score");

    auto img = index.find(image_id);
    if (img == index.end()) {
      issues.push_back({Severity::kError, image_id,
                        where + " references unknown image id " + std::to_string(image_id)});
      continue;
    }
    const auto dense = dataset.dense_class(cat);
    if (!dense) {
      issues.push_back({Severity::kError, image_id,
                        where + " references unknown category id " + std::to_string(cat)});
      continue;
    }
    if (!(score >= 0.0 && score <= 1.0)) {
      std::ostringstream os;
      os << where << " has score " << score << " outside [0, 1]";
      issues.push_back({Severity::kError, image_id, os.str()});
      continue;
    }
    if (score <= cfg.tau_down) continue;
    ImageRecord& rec = dataset.images[img->second];
    const auto box = admit_box(raw, rec, cfg, where, issues);
    if (!box) continue;
    rec.predictions.push_back({*box, *dense, score});
  }

  finish(issues, warnings);
  return dataset;
}

Dataset load_predictions(const std::filesystem::path& path, Dataset dataset,
                         const IngestConfig& cfg, ValidationReport* warnings) {
  return parse_predictions(read_text_file(path), std::move(dataset), cfg, warnings,
                           path.string());
}

namespace {

json xywh_json(const BoundingBox& b) {
  return json::array({b.x1, b.y1, b.x2 - b.x1, b.y2 - b.y1});
}

}  // namespace

json annotations_to_json(const Dataset& dataset, const json& info) {
  json doc = json::object();
  if (!info.is_null()) doc["info"] = info;
  json cats = json::array();
  for (const auto& c : dataset.categories) {
    cats.push_back({{"id", c.original_id}, {"name", c.name}});
  }
  json images = json::array();
  json anns = json::array();
  for (const auto& img : dataset.images) {
    json rec = {{"id", img.image_id}, {"width", img.dims.width}, {"height", img.dims.height}};
    if (!img.file_name.empty()) rec["file_name"] = img.file_name;
    images.push_back(std::move(rec));
    for (const auto& a : img.annotations) {
      anns.push_back({{"id", a.annotation_id},
                      {"image_id", img.image_id},
                      {"category_id", dataset.categories.at(a.class_id).original_id},
                      {"bbox", xywh_json(a.box)},
                      {"area", a.box.area()},
                      {"iscrowd", 0}});
    }
  }
  doc["categories"] = std::move(cats);
  doc["images"] = std::move(images);
  doc["annotations"] = std::move(anns);
  return doc;
}

json predictions_to_json(const Dataset& dataset) {
  json out = json::array();
  for (const auto& img : dataset.images) {
    for (const auto& p : img.predictions) {
      out.push_back({{"image_id", img.image_id},
                     {"category_id", dataset.categories.at(p.class_id).original_id},
                     {"bbox", xywh_json(p.box)},
                     {"score", p.confidence}});
    }
  }
  return out;
}

json report_to_json(const ValidationReport& report) {
  json out = json::array();
  for (const auto& issue : report) {
    out.push_back({{"severity", to_string(issue.severity)},
                   {"image_id", issue.image_id ? json(*issue.image_id) : json(nullptr)},
                   {"message", issue.message}});
  }
  return out;
}

double min_similarity(const Dataset& dataset, const SimilarityParams& params,
                      unsigned workers) {
  constexpr double kNone = std::numeric_limits<double>::infinity();
  std::vector<double> per_image(dataset.images.size(), kNone);
  detail::parallel_for(dataset.images.size(), workers, [&](std::size_t i) {
    const ImageRecord& img = dataset.images[i];
    double lo = kNone;
    for (const auto& a : img.annotations) {
      for (const auto& p : img.predictions) {
        lo = std::min(lo, similarity(a.box, p.box, img.dims, params));
      }
    }
    per_image[i] = lo;
  });
  const double lo = per_image.empty() ? kNone : *std::min_element(per_image.begin(), per_image.end());
  return lo == kNone ? 0.0 : lo;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace detaudit
