// detaudit: label-quality auditing for object-detection datasets.
//
//   detaudit synthesize -o clean.json
//   detaudit inject clean.json -o corrupted.json -m manifest.jsonl
//   detaudit oracle-predict clean.json -o predictions.json
//   detaudit score corrupted.json predictions.json --method objectlab -o scores.jsonl
//   detaudit evaluate scores.jsonl manifest.jsonl
//   detaudit validate corrupted.json [predictions.json]
//
// Tunables may come from a key-value file (--config) or from the header of an
// earlier output (--replay); flags override both.

#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "detaudit/evaluator.hpp"
#include "detaudit/pipeline.hpp"
#include "detaudit/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace detaudit;

namespace {

constexpr int kExitInvalidInput = 1;

struct Paths {
  std::string annotations;
  std::string predictions;
  std::string scores;
  std::string manifest;
  std::string output;
  std::string manifest_out;
  std::string csv;
};

void emit_issues(const ValidationReport& issues) {
  if (issues.empty()) return;
  std::cerr << json{{"issues", report_to_json(issues)}}.dump() << "\n";
}

int fail(const std::string& message) {
  const ValidationReport report = {{Severity::kError, std::nullopt, message}};
  std::cerr << json{{"errors", report_to_json(report)}}.dump() << "\n";
  return kExitInvalidInput;
}

// Refuses to overwrite any input: commands are read-only on their inputs.
void guard_output(const std::string& out, std::initializer_list<std::string> inputs) {
  if (out.empty() || !fs::exists(out)) return;
  for (const auto& in : inputs) {
    if (!in.empty() && fs::exists(in) && fs::equivalent(out, in)) {
      throw ConfigError("output " + out + " would overwrite input " + in);
    }
  }
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

// Config recorded in an artifact written by this tool: the first JSONL line,
// a COCO "info" block, or a wrapped prediction/report header.
json embedded_config(const std::string& path) {
  const std::string text = read_text_file(path);
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) doc = json::parse(text.substr(0, text.find('\n')), nullptr, false);
  if (doc.is_object()) {
    for (const char* key : {"header", "info"}) {
      auto it = doc.find(key);
      if (it != doc.end() && it->is_object() && it->contains("config")) return (*it)["config"];
    }
  }
  throw ConfigError(path + " carries no embedded config");
}

std::string replay_argument(int argc, char** argv) {
  const std::string flag = "--replay";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == flag && i + 1 < argc) return argv[i + 1];
    if (arg.rfind(flag + "=", 0) == 0) return arg.substr(flag.size() + 1);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-quality auditing for object-detection datasets"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string replay;
  try {
    replay = replay_argument(argc, argv);
    if (!replay.empty()) cfg.update_from_json(embedded_config(replay));
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  app.add_option("--replay", replay, "Start from the config embedded in an earlier output; flags still override")
      ->check(CLI::ExistingFile);
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string overlooked_mode = to_string(cfg.scoring.overlooked_mode);
  bool no_clip = !cfg.ingest.clip_boxes;

  app.add_option("--workers", workers, "Worker threads (outputs do not depend on it)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Seed for injection, oracle jitter and synthesis");
  app.add_option("--tau-down", cfg.ingest.tau_down, "Drop predictions with confidence <= this")
      ->capture_default_str();
  app.add_flag("--no-clip", no_clip, "Reject out-of-image boxes instead of clipping them");
  app.add_option("--alpha", cfg.scoring.similarity.alpha, "Kernel weight in the box similarity")
      ->capture_default_str();
  app.add_option("--sigma", cfg.scoring.similarity.sigma, "Kernel bandwidth")->capture_default_str();
  app.add_option("--tau-up", cfg.scoring.tau_up, "High-confidence threshold")->capture_default_str();
  app.add_option("--temperature", cfg.scoring.softmin_temperature, "Softmin pooling temperature")
      ->capture_default_str();
  app.add_option("--overlooked-mode", overlooked_mode, "matched-skip or literal")
      ->check(CLI::IsMember({"matched-skip", "literal"}))
      ->capture_default_str();
  app.add_option("--iou-thresholds", cfg.map.iou_thresholds, "mAP IoU thresholds");
  app.add_option("--map-points", cfg.map.interpolation_points, "mAP recall interpolation points")
      ->capture_default_str();
  app.add_option("--tile-grid", cfg.tile.grid_size, "Tile grid size J")->capture_default_str();
  app.add_option("--tile-overlap", cfg.tile.overlap_threshold, "Tile coverage needed to take a box label")
      ->capture_default_str();
  app.add_option("--tile-prior", cfg.tile.background_prior_weight, "Background pseudo-box weight")
      ->capture_default_str();
  app.add_option("--clod-cutoff", cfg.clod.linkage_cutoff, "Single-linkage stop distance (1 - IoU)")
      ->capture_default_str();
  app.add_option("--image-fraction", cfg.inject.image_fraction, "Fraction of images to corrupt")
      ->capture_default_str();
  app.add_option("--p-drop", cfg.inject.p_drop, "Drop probability per selected image")->capture_default_str();
  app.add_option("--p-swap", cfg.inject.p_swap, "Swap probability per selected image")->capture_default_str();
  app.add_option("--p-shift", cfg.inject.p_shift, "Shift probability per selected image")->capture_default_str();
  app.add_option("--shift-min", cfg.inject.shift_min, "Smallest shift, fraction of box side")
      ->capture_default_str();
  app.add_option("--shift-max", cfg.inject.shift_max, "Largest shift, fraction of box side")
      ->capture_default_str();
  bool forbid_empty = !cfg.inject.allow_empty_images;
  app.add_flag("--forbid-empty", forbid_empty, "Never drop the last box of an image");
  app.add_option("--confidence", cfg.oracle.confidence, "Oracle prediction confidence")->capture_default_str();
  app.add_option("--jitter", cfg.oracle.jitter, "Oracle edge jitter, fraction of box side")
      ->capture_default_str();
  app.add_option("--num-images", cfg.synthetic.num_images, "Synthetic image count")->capture_default_str();
  app.add_option("--num-classes", cfg.synthetic.num_classes, "Synthetic class count")->capture_default_str();
  app.add_option("--min-boxes", cfg.synthetic.min_boxes)->capture_default_str();
  app.add_option("--max-boxes", cfg.synthetic.max_boxes)->capture_default_str();
  app.add_option("--width", cfg.synthetic.width)->capture_default_str();
  app.add_option("--height", cfg.synthetic.height)->capture_default_str();

  Paths paths;
  std::string method = "objectlab";
  auto* score = app.add_subcommand("score", "Score every image of a dataset");
  score->add_option("annotations", paths.annotations, "COCO annotation JSON")->required()->check(CLI::ExistingFile);
  score->add_option("predictions", paths.predictions, "COCO detection results JSON")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--method", method, "objectlab, map, tile or clod")
      ->check(CLI::IsMember({"objectlab", "map", "tile", "clod"}))
      ->capture_default_str();
  score->add_option("-o,--output", paths.output, "Score file (JSONL); stdout when omitted");
  score->add_option("--csv", paths.csv, "Also write image_id,score,badloc,swap,overlook as CSV");

  auto* inject = app.add_subcommand("inject", "Corrupt a clean dataset and record the ground truth");
  inject->add_option("annotations", paths.annotations)->required()->check(CLI::ExistingFile);
  inject->add_option("-o,--output", paths.output, "Corrupted COCO annotation JSON")->required();
  inject->add_option("-m,--manifest", paths.manifest_out, "Error manifest (JSONL)")->required();

  std::string field = "score";
  std::string error_type = "any";
  bool as_json = false;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Retrieval metrics of a score file against a manifest");
  evaluate_cmd->add_option("scores", paths.scores)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("manifest", paths.manifest)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--field", field, "Score column to rank by")
      ->check(CLI::IsMember({"score", "badloc", "swap", "overlook"}))
      ->capture_default_str();
  evaluate_cmd->add_option("--error-type", error_type, "Ground truth: any, drop, swap or shift")
      ->check(CLI::IsMember({"any", "drop", "swap", "shift"}))
      ->capture_default_str();
  evaluate_cmd->add_option("-o,--output", paths.output, "Also write the report as JSON");
  evaluate_cmd->add_flag("--json", as_json, "Print JSON instead of a table");

  bool plain = false;
  auto* oracle = app.add_subcommand("oracle-predict", "Turn annotations into a synthetic prediction file");
  oracle->add_option("annotations", paths.annotations)->required()->check(CLI::ExistingFile);
  oracle->add_option("-o,--output", paths.output, "Prediction file")->required();
  oracle->add_flag("--plain", plain, "Write a bare COCO results list without the header");

  auto* validate = app.add_subcommand("validate", "Check annotation (and prediction) files");
  validate->add_option("annotations", paths.annotations)->required()->check(CLI::ExistingFile);
  validate->add_option("predictions", paths.predictions)->check(CLI::ExistingFile);

  auto* synthesize = app.add_subcommand("synthesize", "Generate a clean synthetic benchmark dataset");
  synthesize->add_option("-o,--output", paths.output, "COCO annotation JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.ingest.clip_boxes = !no_clip;
    cfg.inject.allow_empty_images = !forbid_empty;
    cfg.scoring.overlooked_mode = overlooked_mode_from_string(overlooked_mode);
    cfg.apply_seed();
    cfg.validate();

    if (*score) {
      guard_output(paths.output, {paths.annotations, paths.predictions});
      guard_output(paths.csv, {paths.annotations, paths.predictions});
      ValidationReport warnings;
      Dataset ds = load_annotations(paths.annotations, cfg.ingest, &warnings);
      ds = load_predictions(paths.predictions, std::move(ds), cfg.ingest, &warnings);
      emit_issues(warnings);
      const Method m = method_from_string(method);
      write_output(paths.output, score_file_text(ds, m, cfg, workers));
      if (!paths.csv.empty()) {
        if (m != Method::kObjectLab) throw ConfigError("--csv is only available for --method objectlab");
        write_text_file(paths.csv, objectlab_scores_to_csv(score_dataset(ds, cfg.scoring, workers)));
      }
    } else if (*inject) {
      guard_output(paths.output, {paths.annotations});
      guard_output(paths.manifest_out, {paths.annotations});
      ValidationReport warnings;
      const Dataset clean = load_annotations(paths.annotations, cfg.ingest, &warnings);
      emit_issues(warnings);
      const InjectionResult result = inject_errors(clean, cfg.inject);
      const json header = provenance_header("inject", cfg);
      write_text_file(paths.output, annotations_to_json(result.corrupted, header).dump() + "\n");
      write_text_file(paths.manifest_out, manifest_to_jsonl(result.manifest, result.corrupted, header));
      std::cerr << "corrupted " << result.manifest.flagged_count() << " of "
                << result.manifest.images.size() << " images\n";
    } else if (*evaluate_cmd) {
      guard_output(paths.output, {paths.scores, paths.manifest});
      const ScoreMap scores = parse_score_file(read_text_file(paths.scores), paths.scores, field);
      const ErrorManifest manifest = parse_manifest(read_text_file(paths.manifest), paths.manifest);
      TruthMap truth;
      if (error_type == "any") {
        truth = truth_from_manifest(manifest);
      } else {
        const ErrorType t = error_type == "drop"   ? ErrorType::kDrop
                            : error_type == "swap" ? ErrorType::kSwap
                                                   : ErrorType::kShift;
        truth = truth_from_manifest(manifest, t);
      }
      const MetricsReport report = evaluate(scores, truth);
      json header = provenance_header("evaluate", cfg);
      header["field"] = field;
      header["error_type"] = error_type;
      const json doc = {{"header", header}, {"metrics", metrics_to_json(report)}};
      if (!paths.output.empty()) write_text_file(paths.output, doc.dump(2) + "\n");
      std::cout << (as_json ? doc.dump(2) + "\n" : metrics_table(report));
    } else if (*oracle) {
      guard_output(paths.output, {paths.annotations});
      ValidationReport warnings;
      const Dataset ds = load_annotations(paths.annotations, cfg.ingest, &warnings);
      emit_issues(warnings);
      const json preds = predictions_to_json(oracle_predict(ds, cfg.oracle));
      const json doc = plain ? preds : json{{"header", provenance_header("oracle-predict", cfg)}, {"predictions", preds}};
      write_text_file(paths.output, doc.dump() + "\n");
    } else if (*validate) {
      ValidationReport issues;
      bool valid = true;
      try {
        Dataset ds = load_annotations(paths.annotations, cfg.ingest, &issues);
        if (!paths.predictions.empty()) {
          ds = load_predictions(paths.predictions, std::move(ds), cfg.ingest, &issues);
        }
      } catch (const ValidationError& e) {
        valid = false;
        issues.insert(issues.end(), e.issues().begin(), e.issues().end());
      }
      std::cout << json{{"valid", valid}, {"issues", report_to_json(issues)}}.dump(2) << "\n";
      return valid ? 0 : kExitInvalidInput;
    } else if (*synthesize) {
      const Dataset ds = make_synthetic_dataset(cfg.synthetic);
      write_text_file(paths.output, annotations_to_json(ds, provenance_header("synthesize", cfg)).dump() + "\n");
    }
  } catch (const ValidationError& e) {
    std::cerr << json{{"errors", report_to_json(e.issues())}}.dump() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return 0;
}
