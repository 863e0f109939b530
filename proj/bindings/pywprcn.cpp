#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wprcn/experiment.hpp"
#include "wprcn/model.hpp"

namespace py = pybind11;
using namespace wprcn;

namespace {

Tensor tensor_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  Shape shape(a.ndim());
  for (py::ssize_t i = 0; i < a.ndim(); ++i) shape[i] = static_cast<std::size_t>(a.shape(i));
  std::vector<double> values(a.data(), a.data() + a.size());
  return Tensor::from(std::move(shape), std::move(values));
}

py::array_t<double> array_from_tensor(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  py::array_t<double> out(shape);
  std::copy(t.data(), t.data() + t.size(), out.mutable_data());
  return out;
}

py::array_t<double> dataset_sample(const TsDataset& ds, std::size_t index) {
  return array_from_tensor(ds.sample_tensor(index));
}

}  // namespace

PYBIND11_MODULE(_wprcn, m) {
  m.doc() = "Wavelet probabilistic recurrent convolutional network core";

  m.def(
      "bspline_phi",
      [](double x, int order) { return bspline_phi(x, bspline_order_from_int(order)); },
      py::arg("x"), py::arg("order"),
      "Closed-form B-spline of order 2 (linear), 3 (quadratic) or 4 (cubic)");

  m.def(
      "radial_phi",
      [](const std::vector<double>& x, int j0, const std::vector<double>& k, int order) {
        return radial_phi(x, j0, k, bspline_order_from_int(order));
      },
      py::arg("x"), py::arg("j0"), py::arg("k"), py::arg("order"));

  py::class_<DensityState>(m, "DensityState")
      .def(py::init([](int order, int j0, std::size_t dims, std::optional<std::vector<double>> alphas,
                       bool harmonic) {
             return DensityState(bspline_order_from_int(order), j0, dims,
                                 alphas ? ReceptiveFieldSet(*alphas) : ReceptiveFieldSet(),
                                 harmonic);
           }),
           py::arg("order"), py::arg("j0"), py::arg("dims"), py::arg("alphas") = std::nullopt,
           py::arg("harmonic") = false)
      .def("update", &DensityState::update, py::arg("x"))
      .def("density", &DensityState::density, py::arg("x"))
      .def("phi_vector", &DensityState::phi_vector, py::arg("x"))
      .def_property_readonly("update_count", &DensityState::update_count)
      .def_property_readonly("alphas",
                             [](const DensityState& s) { return s.receptive_fields().alphas; })
      .def_property_readonly("grid_points", [](const DensityState& s) { return s.grid().count; })
      .def("weights",
           [](const DensityState& s) {
             auto w = s.weights_dense();
             py::array_t<double> out({s.grid().count, s.receptive_fields().size()});
             std::copy(w.begin(), w.end(), out.mutable_data());
             return out;
           });

  m.def(
      "batch_estimate",
      [](const std::vector<std::vector<double>>& samples, int order, int j0) {
        return batch_estimate(samples, bspline_order_from_int(order), j0);
      },
      py::arg("samples"), py::arg("order"), py::arg("j0"));

  py::class_<TsDataset>(m, "TsDataset")
      .def_readonly("name", &TsDataset::name)
      .def_property_readonly("dims", [](const TsDataset& d) { return d.n; })
      .def_property_readonly("length", [](const TsDataset& d) { return d.length; })
      .def_readonly("labels", &TsDataset::labels)
      .def_readonly("class_names", &TsDataset::class_names)
      .def_readonly("true_lengths", &TsDataset::true_lengths)
      .def_readonly("warnings", &TsDataset::warnings)
      .def("__len__", &TsDataset::size)
      .def("sample", &dataset_sample, py::arg("index"));

  m.def("parse_ts", &parse_ts, py::arg("path"));
  m.def("parse_ts_text", &parse_ts_text, py::arg("text"), py::arg("name") = "inline");
  m.def("write_ts", &write_ts, py::arg("dataset"), py::arg("path"));
  m.def(
      "normalize_and_pad",
      [](TsDataset& train, std::optional<std::reference_wrapper<TsDataset>> test) {
        if (test)
          normalize_and_pad(train, test->get());
        else
          normalize_and_pad(train);
      },
      py::arg("train"), py::arg("test") = std::nullopt);

  m.def(
      "synthesize",
      [](const std::string& kind, std::size_t classes, std::size_t dims, std::size_t length,
         std::size_t per_class, double noise, std::uint64_t seed, double drift_shift) {
        SyntheticSpec spec;
        spec.kind = synthetic_kind_from_string(kind);
        spec.classes = classes;
        spec.n = dims;
        spec.length = length;
        spec.per_class = per_class;
        spec.noise = noise;
        spec.seed = seed;
        spec.drift_shift = drift_shift;
        return synthesize(spec);
      },
      py::arg("kind") = "sinusoid", py::arg("classes") = 3, py::arg("dims") = 2,
      py::arg("length") = 64, py::arg("per_class") = 20, py::arg("noise") = 0.05,
      py::arg("seed") = 0, py::arg("drift_shift") = 0.5);

  py::class_<GedConfig>(m, "GedConfig")
      .def(py::init<>())
      .def_readwrite("encoder_hidden", &GedConfig::encoder_hidden)
      .def_readwrite("lambda_", &GedConfig::lambda)
      .def_readwrite("batch_size", &GedConfig::batch_size)
      .def_readwrite("epochs", &GedConfig::epochs)
      .def_readwrite("lr", &GedConfig::lr)
      .def_readwrite("latent_m", &GedConfig::latent_m)
      .def_readwrite("latent_j0", &GedConfig::latent_j0)
      .def_readwrite("seed", &GedConfig::seed);

  py::class_<AwpgModel>(m, "AwpgModel")
      .def_property_readonly("beta", &AwpgModel::beta)
      .def_property_readonly("trained_class", &AwpgModel::trained_class)
      .def_property_readonly("feature_channels", &AwpgModel::feature_channels)
      .def("encode",
           [](const AwpgModel& model, const py::array_t<double>& x) {
             LatentSequence lat = model.encode(tensor_from_array(x));
             return std::make_pair(array_from_tensor(lat.y_e), array_from_tensor(lat.h_l));
           })
      .def("generate_features",
           [](const AwpgModel& model, const py::array_t<double>& x) {
             return array_from_tensor(model.generate_features(tensor_from_array(x)));
           })
      .def("save", &AwpgModel::save_file, py::arg("path"))
      .def_static("load", &AwpgModel::load_file, py::arg("path"));

  m.def("train_awpg", &train_awpg, py::arg("train"), py::arg("class_index"), py::arg("config"));

  m.def("feature_channel_layout", &feature_channel_layout);

  m.def("f1_threshold_sweep", &f1_threshold_sweep, py::arg("densities"), py::arg("is_unseen"));

  m.def(
      "evaluate_table",
      [](std::vector<std::string> datasets, std::vector<std::string> methods,
         std::vector<std::vector<double>> accuracy) {
        EvalReport rep = evaluate_table(std::move(datasets), std::move(methods),
                                        std::move(accuracy));
        py::dict out;
        out["avg_accuracy"] = rep.avg_accuracy;
        out["avg_rank"] = rep.avg_rank;
        out["win_tie"] = rep.win_tie;
        return out;
      },
      py::arg("datasets"), py::arg("methods"), py::arg("accuracy"));

  m.def(
      "run_experiment",
      [](const std::string& path, std::optional<std::string> ablation,
         std::optional<std::uint64_t> seed) {
        Experiment exp = load_experiment(path);
        if (ablation) exp.model.ablation = ablation_from_string(*ablation);
        if (seed) {
          exp.model.seed = *seed;
          exp.model.ged.seed = *seed;
          exp.synth.seed = *seed;
        }
        auto [train, test] = load_experiment_data(exp);
        TrainedWprcn trained = train_wprcn(train, test, exp.model);
        py::dict out;
        out["test_accuracy"] = trained.test_accuracy;
        out["val_accuracy"] = trained.val_accuracy;
        out["chosen_lr"] = trained.chosen_lr;
        out["epochs_run"] = trained.trained_epochs;
        out["config_digest"] = exp.digest;
        return out;
      },
      py::arg("path"), py::arg("ablation") = std::nullopt, py::arg("seed") = std::nullopt,
      "Parse an experiment file, run two-stage training, return summary metrics");
}
