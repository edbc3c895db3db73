#include "detaudit/run_config.hpp"

namespace detaudit {

using nlohmann::json;

void RunConfig::apply_seed() {
  inject.seed = seed;
  oracle.seed = seed;
  synthetic.seed = seed;
}

void RunConfig::validate() const {
  if (!ingest.is_valid()) throw ConfigError("tau_down must lie in [0, 1)");
  scoring.validate(ingest.tau_down);
  map.validate();
  tile.validate();
  clod.validate();
  inject.validate();
  oracle.validate();
  synthetic.validate();
}

json RunConfig::to_json() const {
  return {
      {"ingest", {{"tau_down", ingest.tau_down}, {"clip_boxes", ingest.clip_boxes}}},
      {"scoring",
       {{"alpha", scoring.similarity.alpha},
        {"sigma", scoring.similarity.sigma},
        {"tau_up", scoring.tau_up},
        {"softmin_temperature", scoring.softmin_temperature},
        {"overlooked_mode", to_string(scoring.overlooked_mode)}}},
      {"map", {{"iou_thresholds", map.iou_thresholds}, {"interpolation_points", map.interpolation_points}}},
      {"tile",
       {{"grid_size", tile.grid_size},
        {"overlap_threshold", tile.overlap_threshold},
        {"background_prior_weight", tile.background_prior_weight}}},
      {"clod", {{"linkage_cutoff", clod.linkage_cutoff}}},
      {"inject", spec_to_json(inject)},
      {"oracle", {{"confidence", oracle.confidence}, {"jitter", oracle.jitter}, {"seed", oracle.seed}}},
      {"synthetic",
       {{"num_images", synthetic.num_images},
        {"num_classes", synthetic.num_classes},
        {"min_boxes", synthetic.min_boxes},
        {"max_boxes", synthetic.max_boxes},
        {"width", synthetic.width},
        {"height", synthetic.height},
        {"seed", synthetic.seed}}},
      {"seed", seed},
  };
}

namespace {

template <typename T>
void read(const json& obj, const char* key, T& into) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    into = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field \"") + key + "\" has the wrong type");
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  auto it = j.find(key);
  if (it == j.end()) return empty;
  if (!it->is_object()) throw ConfigError(std::string("config section \"") + key + "\" is not an object");
  return *it;
}

}  // namespace

void RunConfig::update_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config is not an object");
  const json& in = section(j, "ingest");
  read(in, "tau_down", ingest.tau_down);
  read(in, "clip_boxes", ingest.clip_boxes);

  const json& sc = section(j, "scoring");
  read(sc, "alpha", scoring.similarity.alpha);
  read(sc, "sigma", scoring.similarity.sigma);
  read(sc, "tau_up", scoring.tau_up);
  read(sc, "softmin_temperature", scoring.softmin_temperature);
  std::string mode = to_string(scoring.overlooked_mode);
  read(sc, "overlooked_mode", mode);
  scoring.overlooked_mode = overlooked_mode_from_string(mode);

  read(section(j, "map"), "iou_thresholds", map.iou_thresholds);
  read(section(j, "map"), "interpolation_points", map.interpolation_points);
  const json& tl = section(j, "tile");
  read(tl, "grid_size", tile.grid_size);
  read(tl, "overlap_threshold", tile.overlap_threshold);
  read(tl, "background_prior_weight", tile.background_prior_weight);
  read(section(j, "clod"), "linkage_cutoff", clod.linkage_cutoff);

  const json& inj = section(j, "inject");
  read(inj, "image_fraction", inject.image_fraction);
  read(inj, "p_drop", inject.p_drop);
  read(inj, "p_swap", inject.p_swap);
  read(inj, "p_shift", inject.p_shift);
  read(inj, "shift_min", inject.shift_min);
  read(inj, "shift_max", inject.shift_max);
  read(inj, "allow_empty_images", inject.allow_empty_images);

  const json& orc = section(j, "oracle");
  read(orc, "confidence", oracle.confidence);
  read(orc, "jitter", oracle.jitter);

  const json& syn = section(j, "synthetic");
  read(syn, "num_images", synthetic.num_images);
  read(syn, "num_classes", synthetic.num_classes);
  read(syn, "min_boxes", synthetic.min_boxes);
  read(syn, "max_boxes", synthetic.max_boxes);
  read(syn, "width", synthetic.width);
  read(syn, "height", synthetic.height);

  read(j, "seed", seed);
  apply_seed();
}

json provenance_header(const std::string& command, const RunConfig& cfg) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"config", cfg.to_json()}};
}

}  // namespace detaudit
