// Python surface over the core pipeline operations. Rasters cross the
// boundary as float32 numpy arrays in [0,1] (ink = 1).
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sketchrec/augment.hpp"
#include "sketchrec/corpus.hpp"
#include "sketchrec/error.hpp"
#include "sketchrec/eval.hpp"
#include "sketchrec/features.hpp"
#include "sketchrec/heatmap.hpp"
#include "sketchrec/net.hpp"
#include "sketchrec/pgm.hpp"
#include "sketchrec/svm.hpp"
#include "sketchrec/train.hpp"

namespace py = pybind11;
using namespace sketchrec;

namespace {

Raster raster_from_array(const py::array_t<float, py::array::c_style |
                                                      py::array::forcecast>& a) {
  if (a.ndim() != 2) throw ContractError("expected a 2-d array");
  Raster r(int(a.shape(0)), int(a.shape(1)));
  std::copy(a.data(), a.data() + r.size(), r.data.begin());
  return r;
}

py::array_t<float> array_from_raster(const Raster& r) {
  py::array_t<float> out({r.height, r.width});
  std::copy(r.data.begin(), r.data.end(), out.mutable_data());
  return out;
}

Tensor tensor_from_array(const py::array_t<float, py::array::c_style |
                                                     py::array::forcecast>& a) {
  std::vector<int> shape;
  for (py::ssize_t i = 0; i < a.ndim(); ++i) shape.push_back(int(a.shape(i)));
  Tensor t(shape);
  std::copy(a.data(), a.data() + t.numel(), t.data.begin());
  return t;
}

py::array_t<float> array_from_tensor(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
  py::array_t<float> out(shape);
  std::copy(t.data.begin(), t.data.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_sketchrec, m) {
  m.doc() = "freehand sketch recognition pipeline";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  // ---- sketch-io ----
  m.def("decode_pgm",
        [](py::bytes data) { return array_from_raster(decode_pgm(data)); },
        py::arg("data"));
  m.def("encode_pgm",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>&
               a,
           int maxval) { return py::bytes(encode_pgm(raster_from_array(a), maxval)); },
        py::arg("raster"), py::arg("maxval") = 255);
  m.def("preprocess",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>&
               a,
           int resolution) {
          return array_from_raster(preprocess(raster_from_array(a), resolution));
        },
        py::arg("raster"), py::arg("working_resolution") = 256);

  // ---- augment ----
  m.def("dilate",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>&
               a) { return array_from_raster(dilate(raster_from_array(a))); },
        py::arg("raster"));
  m.def("paper30_plan", [] { return plan_to_json(preset_paper30()); },
        "the documented 30-transform plan as JSON");
  m.def("augment",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>&
               a,
           const std::string& plan) {
          AugmentationPlan p = resolve_plan(plan);
          Sketch s;
          s.id = "py";
          s.raster = dilate(raster_from_array(a));
          s.provenance.kind = Provenance::Kind::dilated;
          std::vector<py::array_t<float>> out;
          for (const Sketch& v : expand(s, p))
            out.push_back(array_from_raster(v.raster));
          return out;
        },
        py::arg("raster"), py::arg("plan") = "paper30",
        "dilate a binary raster and return one array per plan transform");

  // ---- tensor-net ----
  py::class_<NetworkSpec>(m, "NetworkSpec")
      .def_static("lenet_modified", &preset_lenet_modified,
                  py::arg("num_classes"))
      .def_static("imagenet_shape", &preset_imagenet_shape,
                  py::arg("num_classes") = 1000)
      .def_static("from_json", &spec_from_json)
      .def("to_json", &spec_to_json)
      .def_property_readonly("id", [](const NetworkSpec& s) { return s.id; })
      .def_property_readonly("layer_names", [](const NetworkSpec& s) {
        std::vector<std::string> names;
        for (const auto& l : s.layers) names.push_back(l.name);
        return names;
      });

  py::class_<NetworkState>(m, "NetworkState")
      .def_property_readonly("iteration",
                             [](const NetworkState& s) { return s.iteration; });

  m.def("init_state", &init_state<float>, py::arg("spec"), py::arg("seed"));
  m.def("save_state", &save_state, py::arg("spec"), py::arg("state"),
        py::arg("path"));
  m.def("load_state", &load_state, py::arg("spec"), py::arg("path"));

  m.def("forward",
        [](const NetworkSpec& spec, const NetworkState& state,
           const py::array_t<float, py::array::c_style | py::array::forcecast>&
               input,
           const std::string& tap) {
          auto acts = forward(spec, state, tensor_from_array(input), tap);
          py::dict out;
          for (auto& [name, tensor] : acts)
            out[py::str(name)] = array_from_tensor(tensor);
          return out;
        },
        py::arg("spec"), py::arg("state"), py::arg("input"),
        py::arg("tap") = "");
  m.def("tap_features",
        [](const NetworkSpec& spec, const NetworkState& state,
           const py::array_t<float, py::array::c_style | py::array::forcecast>&
               raster,
           const std::string& layer) {
          FeatureVector fv =
              tap_features(spec, state,
                           raster_to_input(raster_from_array(raster), spec),
                           layer);
          py::array_t<float> out(py::ssize_t(fv.values.size()));
          std::copy(fv.values.begin(), fv.values.end(), out.mutable_data());
          return out;
        },
        py::arg("spec"), py::arg("state"), py::arg("raster"), py::arg("layer"),
        "resize a raster to the network input and tap one layer");

  m.def("train_sgd",
        [](const NetworkSpec& spec, const NetworkState& init,
           const py::array_t<float, py::array::c_style | py::array::forcecast>&
               images,
           const std::vector<int>& labels, long iterations, double lr,
           int batch, std::uint64_t seed) {
          if (images.ndim() != 3)
            throw ContractError("images must be (n, height, width)");
          Dataset data;
          data.height = int(images.shape(1));
          data.width = int(images.shape(2));
          data.images.assign(images.data(),
                             images.data() + images.size());
          data.labels = labels;
          SgdHyper hyper;
          hyper.iterations = iterations;
          hyper.learning_rate = lr;
          hyper.batch = batch;
          TrainResult result = train_sgd(spec, init, data, hyper, seed);
          return py::make_tuple(result.state, result.loss_trace);
        },
        py::arg("spec"), py::arg("state"), py::arg("images"), py::arg("labels"),
        py::arg("iterations") = 100, py::arg("lr") = 0.01, py::arg("batch") = 64,
        py::arg("seed") = 1);

  // ---- svm ----
  py::class_<LinearModel>(m, "LinearModel")
      .def_property_readonly("classes",
                             [](const LinearModel& m_) { return m_.classes; })
      .def_property_readonly("dim", [](const LinearModel& m_) { return m_.dim; });

  m.def("train_svm",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>&
               features,
           const std::vector<int>& labels,
           const std::vector<std::string>& class_names, double C, double tol,
           std::uint64_t seed) {
          if (features.ndim() != 2)
            throw ContractError("features must be (n, dim)");
          std::vector<FeatureVector> fvs(std::size_t(features.shape(0)));
          for (py::ssize_t i = 0; i < features.shape(0); ++i)
            fvs[std::size_t(i)].values.assign(
                features.data() + i * features.shape(1),
                features.data() + (i + 1) * features.shape(1));
          SvmParams params;
          params.C = C;
          params.tol = tol;
          return train_ovr(fvs, labels, class_names, params, seed);
        },
        py::arg("features"), py::arg("labels"), py::arg("class_names"),
        py::arg("C") = 1.0, py::arg("tol") = 1e-3, py::arg("seed") = 1);
  m.def("predict",
        [](const LinearModel& model,
           const py::array_t<float, py::array::c_style | py::array::forcecast>&
               feature) {
          FeatureVector fv;
          fv.values.assign(feature.data(), feature.data() + feature.size());
          return predict(model, fv);
        },
        py::arg("model"), py::arg("feature"));
  m.def("save_model", &save_model, py::arg("path"), py::arg("model"));
  m.def("load_model", &load_model, py::arg("path"));

  // ---- heatmap ----
  m.def("heatmap",
        [](const NetworkSpec& spec, const NetworkState& state,
           const py::array_t<float, py::array::c_style | py::array::forcecast>&
               raster,
           const std::string& layer) {
          HeatMap map =
              compute_heatmap(spec, state, raster_from_array(raster), layer);
          return py::make_tuple(array_from_raster(map.grid),
                                array_from_raster(map.upsampled));
        },
        py::arg("spec"), py::arg("state"), py::arg("raster"), py::arg("layer"),
        "returns (grid, upsampled) scalar fields in [0,1]");
  m.def("render_heatmap",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>&
               upsampled,
           const std::string& mode) {
          HeatMap map;
          map.upsampled = raster_from_array(upsampled);
          return py::bytes(render(
              map, mode == "color" ? HeatMapMode::color : HeatMapMode::gray));
        },
        py::arg("upsampled"), py::arg("mode") = "color");
}
