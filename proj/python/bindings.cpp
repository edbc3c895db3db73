#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "detaudit/baselines.hpp"
#include "detaudit/evaluator.hpp"
#include "detaudit/injector.hpp"
#include "detaudit/objectlab.hpp"
#include "detaudit/pipeline.hpp"
#include "detaudit/synthetic.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace detaudit;

namespace {

void bind_geometry(py::module_& m) {
  py::class_<BoundingBox>(m, "BoundingBox")
      .def(py::init<>())
      .def(py::init([](double x1, double y1, double x2, double y2) { return BoundingBox{x1, y1, x2, y2}; }),
           "x1"_a, "y1"_a, "x2"_a, "y2"_a)
      .def_static("from_xywh", &BoundingBox::from_xywh, "x"_a, "y"_a, "w"_a, "h"_a)
      .def_readwrite("x1", &BoundingBox::x1)
      .def_readwrite("y1", &BoundingBox::y1)
      .def_readwrite("x2", &BoundingBox::x2)
      .def_readwrite("y2", &BoundingBox::y2)
      .def_property_readonly("area", &BoundingBox::area)
      .def("is_valid", &BoundingBox::is_valid)
      .def(py::self == py::self)
      .def("__repr__", [](const BoundingBox& b) {
        return "BoundingBox(" + std::to_string(b.x1) + ", " + std::to_string(b.y1) + ", " +
               std::to_string(b.x2) + ", " + std::to_string(b.y2) + ")";
      });

  py::class_<ImageDims>(m, "ImageDims")
      .def(py::init([](int w, int h) { return ImageDims{w, h}; }), "width"_a, "height"_a)
      .def_readwrite("width", &ImageDims::width)
      .def_readwrite("height", &ImageDims::height);

  py::class_<SimilarityParams>(m, "SimilarityParams")
      .def(py::init([](double alpha, double sigma) { return SimilarityParams{alpha, sigma}; }),
           "alpha"_a = 0.1, "sigma"_a = 0.1)
      .def_readwrite("alpha", &SimilarityParams::alpha)
      .def_readwrite("sigma", &SimilarityParams::sigma);

  m.def("iou", &iou, "a"_a, "b"_a);
  m.def("corner_vector", &corner_vector, "box"_a, "dims"_a);
  m.def("gaussian_kernel", &gaussian_kernel, "a"_a, "b"_a, "dims"_a, "sigma"_a = 0.1);
  m.def("similarity", &similarity, "a"_a, "b"_a, "dims"_a, "params"_a = SimilarityParams{});
}

void bind_dataset(py::module_& m) {
  py::class_<Category>(m, "Category")
      .def_readonly("original_id", &Category::original_id)
      .def_readonly("name", &Category::name);
  py::class_<AnnotatedBox>(m, "AnnotatedBox")
      .def(py::init([](BoundingBox b, int k) { return AnnotatedBox{b, k, 0}; }), "box"_a, "class_id"_a)
      .def_readwrite("box", &AnnotatedBox::box)
      .def_readwrite("class_id", &AnnotatedBox::class_id)
      .def_readwrite("annotation_id", &AnnotatedBox::annotation_id);
  py::class_<PredictedBox>(m, "PredictedBox")
      .def(py::init([](BoundingBox b, int k, double p) { return PredictedBox{b, k, p}; }),
           "box"_a, "class_id"_a, "confidence"_a)
      .def_readwrite("box", &PredictedBox::box)
      .def_readwrite("class_id", &PredictedBox::class_id)
      .def_readwrite("confidence", &PredictedBox::confidence);
  py::class_<ImageRecord>(m, "ImageRecord")
      .def(py::init([](ImageId id, ImageDims dims, std::vector<AnnotatedBox> anns, std::vector<PredictedBox> preds) {
             ImageRecord r;
             r.image_id = id;
             r.dims = dims;
             r.annotations = std::move(anns);
             r.predictions = std::move(preds);
             return r;
           }),
           "image_id"_a, "dims"_a, "annotations"_a = std::vector<AnnotatedBox>{},
           "predictions"_a = std::vector<PredictedBox>{})
      .def_readwrite("image_id", &ImageRecord::image_id)
      .def_readwrite("dims", &ImageRecord::dims)
      .def_readwrite("annotations", &ImageRecord::annotations)
      .def_readwrite("predictions", &ImageRecord::predictions);
  py::class_<Dataset>(m, "Dataset")
      .def_readonly("images", &Dataset::images)
      .def_readonly("categories", &Dataset::categories)
      .def_property_readonly("num_classes", &Dataset::num_classes)
      .def("__len__", [](const Dataset& d) { return d.images.size(); });

  py::class_<IngestConfig>(m, "IngestConfig")
      .def(py::init([](double tau_down, bool clip) { return IngestConfig{tau_down, clip}; }),
           "tau_down"_a = 0.5, "clip_boxes"_a = true)
      .def_readwrite("tau_down", &IngestConfig::tau_down)
      .def_readwrite("clip_boxes", &IngestConfig::clip_boxes);

  m.def("load_annotations",
        [](const std::filesystem::path& p, const IngestConfig& cfg) { return load_annotations(p, cfg); },
        "path"_a, "config"_a = IngestConfig{});
  m.def("load_predictions",
        [](const std::filesystem::path& p, const Dataset& ds, const IngestConfig& cfg) {
          return load_predictions(p, ds, cfg);
        },
        "path"_a, "dataset"_a, "config"_a = IngestConfig{});
  m.def("min_similarity", &min_similarity, "dataset"_a, "params"_a = SimilarityParams{}, "workers"_a = 1u);
}

void bind_scoring(py::module_& m) {
  py::enum_<OverlookedMode>(m, "OverlookedMode")
      .value("MATCHED_SKIP", OverlookedMode::kMatchedSkip)
      .value("LITERAL", OverlookedMode::kLiteral);

  py::class_<ScoringConfig>(m, "ScoringConfig")
      .def(py::init<>())
      .def_readwrite("similarity", &ScoringConfig::similarity)
      .def_readwrite("tau_up", &ScoringConfig::tau_up)
      .def_readwrite("softmin_temperature", &ScoringConfig::softmin_temperature)
      .def_readwrite("overlooked_mode", &ScoringConfig::overlooked_mode);

  py::class_<ImageScore>(m, "ImageScore")
      .def_readonly("image_id", &ImageScore::image_id)
      .def_readonly("score", &ImageScore::score)
      .def_readonly("badloc", &ImageScore::badloc)
      .def_readonly("swap", &ImageScore::swap)
      .def_readonly("overlook", &ImageScore::overlook)
      .def_readonly("badloc_boxes", &ImageScore::badloc_boxes)
      .def_readonly("swap_boxes", &ImageScore::swap_boxes)
      .def_readonly("overlook_boxes", &ImageScore::overlook_boxes);

  m.def("softmin", [](const std::vector<double>& v, double t) { return softmin(v, t); },
        "values"_a, "temperature"_a = 1.0);
  m.def("objectlab_score", &objectlab_score, "image"_a, "config"_a, "sim_star"_a);
  m.def("score_dataset", &score_dataset, "dataset"_a, "config"_a = ScoringConfig{}, "workers"_a = 1u,
        py::call_guard<py::gil_scoped_release>());

  py::class_<MapConfig>(m, "MapConfig")
      .def(py::init<>())
      .def_readwrite("iou_thresholds", &MapConfig::iou_thresholds)
      .def_readwrite("interpolation_points", &MapConfig::interpolation_points);
  py::class_<TileConfig>(m, "TileConfig")
      .def(py::init<>())
      .def_readwrite("grid_size", &TileConfig::grid_size)
      .def_readwrite("overlap_threshold", &TileConfig::overlap_threshold)
      .def_readwrite("background_prior_weight", &TileConfig::background_prior_weight);
  py::class_<ClodConfig>(m, "ClodConfig")
      .def(py::init<>())
      .def_readwrite("linkage_cutoff", &ClodConfig::linkage_cutoff);

  m.def("per_image_map", &per_image_map, "image"_a, "config"_a = MapConfig{});
  m.def("tile_score", &tile_score, "image"_a, "num_classes"_a, "config"_a = TileConfig{},
        "params"_a = SimilarityParams{});
  m.def("clod_score", &clod_score, "image"_a, "num_classes"_a, "config"_a = ClodConfig{});
  m.def("score_images",
        [](const Dataset& ds, const std::string& method, unsigned workers) {
          RunConfig cfg;
          std::vector<std::pair<ImageId, double>> out;
          for (const auto& s : score_images(ds, method_from_string(method), cfg, workers)) {
            out.emplace_back(s.image_id, s.score);
          }
          return out;
        },
        "dataset"_a, "method"_a = "objectlab", "workers"_a = 1u);
}

void bind_benchmark(py::module_& m) {
  py::class_<InjectionSpec>(m, "InjectionSpec")
      .def(py::init<>())
      .def_readwrite("image_fraction", &InjectionSpec::image_fraction)
      .def_readwrite("p_drop", &InjectionSpec::p_drop)
      .def_readwrite("p_swap", &InjectionSpec::p_swap)
      .def_readwrite("p_shift", &InjectionSpec::p_shift)
      .def_readwrite("shift_min", &InjectionSpec::shift_min)
      .def_readwrite("shift_max", &InjectionSpec::shift_max)
      .def_readwrite("seed", &InjectionSpec::seed)
      .def_readwrite("allow_empty_images", &InjectionSpec::allow_empty_images);

  py::class_<ImageErrors>(m, "ImageErrors")
      .def_readonly("image_id", &ImageErrors::image_id)
      .def_readonly("overlooked", &ImageErrors::overlooked)
      .def_readonly("swapped", &ImageErrors::swapped)
      .def_readonly("badloc", &ImageErrors::badloc)
      .def_property_readonly("flagged", &ImageErrors::flagged);
  py::class_<ErrorManifest>(m, "ErrorManifest")
      .def_readonly("images", &ErrorManifest::images)
      .def("flagged_count", &ErrorManifest::flagged_count)
      .def("truth", [](const ErrorManifest& mf) { return truth_from_manifest(mf); });

  m.def("inject_errors",
        [](const Dataset& clean, const InjectionSpec& spec) {
          InjectionResult r = inject_errors(clean, spec);
          return py::make_tuple(std::move(r.corrupted), std::move(r.manifest));
        },
        "clean"_a, "spec"_a = InjectionSpec{});

  py::class_<SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init<>())
      .def_readwrite("num_images", &SyntheticSpec::num_images)
      .def_readwrite("num_classes", &SyntheticSpec::num_classes)
      .def_readwrite("min_boxes", &SyntheticSpec::min_boxes)
      .def_readwrite("max_boxes", &SyntheticSpec::max_boxes)
      .def_readwrite("seed", &SyntheticSpec::seed);
  py::class_<OracleSpec>(m, "OracleSpec")
      .def(py::init<>())
      .def_readwrite("confidence", &OracleSpec::confidence)
      .def_readwrite("jitter", &OracleSpec::jitter)
      .def_readwrite("seed", &OracleSpec::seed);
  m.def("make_synthetic_dataset", &make_synthetic_dataset, "spec"_a = SyntheticSpec{});
  m.def("oracle_predict", &oracle_predict, "source"_a, "spec"_a = OracleSpec{});
  m.def("transfer_predictions", &transfer_predictions, "target"_a, "source"_a, "tau_down"_a = 0.5);

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("num_images", &MetricsReport::num_images)
      .def_readonly("num_positives", &MetricsReport::num_positives)
      .def_readonly("average_precision", &MetricsReport::average_precision)
      .def_readonly("precision_at_100", &MetricsReport::precision_at_100)
      .def_readonly("precision_at_100_k", &MetricsReport::precision_at_100_k)
      .def_readonly("precision_at_T", &MetricsReport::precision_at_T)
      .def_readonly("precision_curve", &MetricsReport::precision_curve);
  m.def("average_precision", &average_precision, "scores"_a, "truth"_a);
  m.def("precision_at_k", &precision_at_k, "scores"_a, "truth"_a, "k"_a);
  m.def("evaluate", &evaluate, "scores"_a, "truth"_a);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Object-detection label quality scoring (C++ core)";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InjectionError>(m, "InjectionError", PyExc_RuntimeError);
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_ValueError);

  bind_geometry(m);
  bind_dataset(m);
  bind_scoring(m);
  bind_benchmark(m);

  m.attr("__version__") = kToolVersion;
}
