#include "detaudit/pipeline.hpp"

#include "parallel.hpp"

namespace detaudit {

const char* to_string(Method method) {
  switch (method) {
    case Method::kObjectLab: return "objectlab";
    case Method::kMap: return "map";
    case Method::kTile: return "tile";
    case Method::kClod: return "clod";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "objectlab") return Method::kObjectLab;
  if (name == "map") return Method::kMap;
  if (name == "tile") return Method::kTile;
  if (name == "clod") return Method::kClod;
  throw ConfigError("unknown scoring method '" + name + "'");
}

std::vector<MethodScore> score_images(const Dataset& dataset, Method method, const RunConfig& cfg,
                                      unsigned workers) {
  std::vector<MethodScore> out(dataset.images.size());
  if (method == Method::kObjectLab) {
    const auto scores = score_dataset(dataset, cfg.scoring, workers);
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = {scores[i].image_id, scores[i].score};
    return out;
  }
  const int k = dataset.num_classes();
  detail::parallel_for(dataset.images.size(), workers, [&](std::size_t i) {
    const ImageRecord& img = dataset.images[i];
    double s = 0.0;
    switch (method) {
      case Method::kMap: s = per_image_map(img, cfg.map); break;
      case Method::kTile: s = tile_score(img, k, cfg.tile, cfg.scoring.similarity); break;
      case Method::kClod: s = clod_score(img, k, cfg.clod); break;
      case Method::kObjectLab: break;
    }
    out[i] = {img.image_id, s};
  });
  return out;
}

std::string score_file_text(const Dataset& dataset, Method method, const RunConfig& cfg,
                            unsigned workers) {
  nlohmann::json header = provenance_header("score", cfg);
  header["method"] = to_string(method);
  if (method == Method::kObjectLab) {
    return objectlab_scores_to_jsonl(score_dataset(dataset, cfg.scoring, workers), header);
  }
  return method_scores_to_jsonl(to_string(method), score_images(dataset, method, cfg, workers), header);
}

}  // namespace detaudit
