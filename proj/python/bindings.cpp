#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isgd/common.hpp"
#include "isgd/dataset.hpp"
#include "isgd/experiment.hpp"
#include "isgd/network.hpp"
#include "isgd/optimizer.hpp"
#include "isgd/parallel.hpp"
#include "isgd/spc.hpp"
#include "isgd/time_model.hpp"

namespace py = pybind11;

namespace {

isgd::Batch make_batch(const isgd::Dataset& ds, std::size_t offset,
                       std::size_t count, std::size_t index) {
  if (offset + count > ds.size()) {
    throw std::out_of_range("batch range outside the dataset");
  }
  return isgd::Batch{&ds, offset, count, index};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "inconsistent stochastic gradient descent training core";

  py::register_exception<isgd::DivergenceError>(m, "DivergenceError",
                                                PyExc_RuntimeError);

  py::enum_<isgd::Activation>(m, "Activation")
      .value("relu", isgd::Activation::relu)
      .value("tanh", isgd::Activation::tanh);

  py::enum_<isgd::Variant>(m, "Variant")
      .value("plain", isgd::Variant::plain)
      .value("momentum", isgd::Variant::momentum)
      .value("nesterov", isgd::Variant::nesterov);

  py::enum_<isgd::BatchScenario>(m, "BatchScenario")
      .value("iid", isgd::BatchScenario::iid)
      .value("single_class", isgd::BatchScenario::single_class);

  py::class_<isgd::NetworkSpec>(m, "NetworkSpec")
      .def(py::init<>())
      .def_readwrite("layer_sizes", &isgd::NetworkSpec::layer_sizes)
      .def_readwrite("activation", &isgd::NetworkSpec::activation)
      .def_readwrite("weight_decay", &isgd::NetworkSpec::weight_decay)
      .def("parameter_count", &isgd::NetworkSpec::parameter_count)
      .def("validate", &isgd::NetworkSpec::validate);

  py::class_<isgd::Dataset>(m, "Dataset")
      .def(py::init<>())
      .def_readwrite("features", &isgd::Dataset::features)
      .def_readwrite("labels", &isgd::Dataset::labels)
      .def_readwrite("dim", &isgd::Dataset::dim)
      .def_readwrite("num_classes", &isgd::Dataset::num_classes)
      .def("__len__", &isgd::Dataset::size)
      .def("validate", &isgd::Dataset::validate);

  py::class_<isgd::ParameterVector>(m, "ParameterVector")
      .def(py::init<std::size_t>())
      .def_readwrite("values", &isgd::ParameterVector::values)
      .def("__len__", &isgd::ParameterVector::size)
      .def("squared_norm", &isgd::ParameterVector::squared_norm)
      .def("all_finite", &isgd::ParameterVector::all_finite);

  py::class_<isgd::LossAndGrad>(m, "LossAndGrad")
      .def_readonly("loss", &isgd::LossAndGrad::loss)
      .def_readonly("loss_sum", &isgd::LossAndGrad::loss_sum)
      .def_readonly("grad", &isgd::LossAndGrad::grad);

  py::class_<isgd::SpcWindow>(m, "SpcWindow")
      .def(py::init<std::size_t, double>(), py::arg("capacity"),
           py::arg("sigma_multiplier") = 3.0)
      .def("push", &isgd::SpcWindow::push)
      .def("is_undertrained", &isgd::SpcWindow::is_undertrained)
      .def_property_readonly("mean", &isgd::SpcWindow::mean)
      .def_property_readonly("stddev", &isgd::SpcWindow::stddev)
      .def_property_readonly("limit", &isgd::SpcWindow::limit)
      .def_property_readonly("warm", &isgd::SpcWindow::warm)
      .def("__len__", &isgd::SpcWindow::size);

  py::class_<isgd::LrTier>(m, "LrTier")
      .def(py::init<double, double>(), py::arg("threshold"), py::arg("lr"))
      .def_readwrite("threshold", &isgd::LrTier::threshold)
      .def_readwrite("lr", &isgd::LrTier::lr);

  py::class_<isgd::OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init<>())
      .def_readwrite("base_lr", &isgd::OptimizerConfig::base_lr)
      .def_readwrite("subproblem_lr", &isgd::OptimizerConfig::subproblem_lr)
      .def_readwrite("momentum", &isgd::OptimizerConfig::momentum)
      .def_readwrite("weight_decay", &isgd::OptimizerConfig::weight_decay)
      .def_readwrite("epsilon", &isgd::OptimizerConfig::epsilon)
      .def_readwrite("stop", &isgd::OptimizerConfig::stop)
      .def_readwrite("sigma_multiplier",
                     &isgd::OptimizerConfig::sigma_multiplier)
      .def_readwrite("variant", &isgd::OptimizerConfig::variant)
      .def_readwrite("lr_schedule", &isgd::OptimizerConfig::lr_schedule)
      .def("validate", &isgd::OptimizerConfig::validate);

  py::class_<isgd::IterationRecord>(m, "IterationRecord")
      .def_readonly("iteration", &isgd::IterationRecord::iteration)
      .def_readonly("epoch", &isgd::IterationRecord::epoch)
      .def_readonly("batch_index", &isgd::IterationRecord::batch_index)
      .def_readonly("loss", &isgd::IterationRecord::loss)
      .def_readonly("avg_loss", &isgd::IterationRecord::avg_loss)
      .def_readonly("loss_std", &isgd::IterationRecord::loss_std)
      .def_readonly("limit", &isgd::IterationRecord::limit)
      .def_readonly("undertrained", &isgd::IterationRecord::undertrained)
      .def_readonly("subproblem_iterations",
                    &isgd::IterationRecord::subproblem_iterations)
      .def_readonly("cumulative_passes",
                    &isgd::IterationRecord::cumulative_passes);

  py::class_<isgd::EvalRecord>(m, "EvalRecord")
      .def_readonly("iteration", &isgd::EvalRecord::iteration)
      .def_readonly("passes", &isgd::EvalRecord::passes)
      .def_readonly("train_error", &isgd::EvalRecord::train_error)
      .def_readonly("holdout_accuracy", &isgd::EvalRecord::holdout_accuracy);

  py::class_<isgd::TrainingReport>(m, "TrainingReport")
      .def_readonly("iterations", &isgd::TrainingReport::iterations)
      .def_readonly("evals", &isgd::TrainingReport::evals)
      .def_readonly("main_iterations", &isgd::TrainingReport::main_iterations)
      .def_readonly("subproblem_passes",
                    &isgd::TrainingReport::subproblem_passes)
      .def_readonly("total_passes", &isgd::TrainingReport::total_passes)
      .def_readonly("final_avg_loss", &isgd::TrainingReport::final_avg_loss)
      .def_readonly("final_weights", &isgd::TrainingReport::final_weights)
      .def("losses_by_epoch", &isgd::TrainingReport::losses_by_epoch);

  py::class_<isgd::SystemModel>(m, "SystemModel")
      .def(py::init<double, double>(), py::arg("throughput"),
           py::arg("sync_cost"))
      .def_readwrite("throughput", &isgd::SystemModel::throughput)
      .def_readwrite("sync_cost", &isgd::SystemModel::sync_cost);

  py::class_<isgd::LossPrediction>(m, "LossPrediction")
      .def_readonly("loss", &isgd::LossPrediction::loss)
      .def_readonly("updates", &isgd::LossPrediction::updates)
      .def_readonly("valid", &isgd::LossPrediction::valid);

  py::class_<isgd::BatchSearchResult>(m, "BatchSearchResult")
      .def_readonly("batch", &isgd::BatchSearchResult::batch)
      .def_readonly("seconds", &isgd::BatchSearchResult::seconds);

  // dataset pipeline
  m.def("synth_gaussian", &isgd::synth_gaussian, py::arg("classes"),
        py::arg("per_class"), py::arg("dim"), py::arg("spread"),
        py::arg("seed"));
  m.def("load_mnist_idx", &isgd::load_mnist_idx, py::arg("images_path"),
        py::arg("labels_path"));
  m.def("permute_dataset", &isgd::permute_dataset, py::arg("dataset"),
        py::arg("seed"));
  m.def("fcpr_index", &isgd::fcpr_index, py::arg("iteration"), py::arg("n_d"),
        py::arg("n_b"));
  m.def("batch_count", &isgd::batch_count, py::arg("n_d"), py::arg("n_b"));
  m.def("split_holdout", &isgd::split_holdout, py::arg("dataset"),
        py::arg("fraction"));
  m.def("arrange_scenario", &isgd::arrange_scenario, py::arg("dataset"),
        py::arg("scenario"), py::arg("n_b"), py::arg("seed"));

  // network
  m.def("init_network", &isgd::init_network, py::arg("spec"), py::arg("seed"));
  m.def(
      "forward_backward",
      [](const isgd::ParameterVector& w, const isgd::Dataset& ds,
         std::size_t offset, std::size_t count, const isgd::NetworkSpec& spec,
         int workers) {
        const isgd::Batch b = make_batch(ds, offset, count, 0);
        return workers == 1 ? isgd::forward_backward(w, b, spec)
                            : isgd::parallel_forward_backward(w, b, spec,
                                                              workers);
      },
      py::arg("w"), py::arg("dataset"), py::arg("offset"), py::arg("count"),
      py::arg("spec"), py::arg("workers") = 1);
  m.def(
      "batch_loss",
      [](const isgd::ParameterVector& w, const isgd::Dataset& ds,
         std::size_t offset, std::size_t count, const isgd::NetworkSpec& spec) {
        return isgd::batch_loss(w, make_batch(ds, offset, count, 0), spec);
      },
      py::arg("w"), py::arg("dataset"), py::arg("offset"), py::arg("count"),
      py::arg("spec"));
  m.def("accuracy", &isgd::accuracy, py::arg("w"), py::arg("dataset"),
        py::arg("spec"));

  // optimizer pieces
  m.def("lr_from_schedule", &isgd::lr_from_schedule, py::arg("avg_loss"),
        py::arg("schedule"));
  m.def(
      "subproblem_gradient",
      [](const isgd::ParameterVector& w, const isgd::ParameterVector& w_prev,
         double loss, const isgd::ParameterVector& grad, double limit,
         double epsilon) {
        return isgd::subproblem_gradient(w, w_prev, loss, grad, limit, epsilon,
                                         w.size());
      },
      py::arg("w"), py::arg("w_prev"), py::arg("loss"), py::arg("grad"),
      py::arg("limit"), py::arg("epsilon"));

  m.def(
      "train",
      [](const isgd::Dataset& ds, const isgd::NetworkSpec& spec,
         const isgd::OptimizerConfig& cfg, std::size_t batch_size, int epochs,
         int workers, std::uint64_t seed, bool accelerate, bool permute,
         const isgd::Dataset* holdout, std::uint64_t eval_every) {
        isgd::TrainOptions opts;
        opts.batch_size = batch_size;
        opts.epochs = epochs;
        opts.workers = workers;
        opts.seed = seed;
        opts.accelerate = accelerate;
        opts.permute = permute;
        opts.holdout = holdout;
        opts.eval_every = eval_every;
        return isgd::train(ds, spec, cfg, opts);
      },
      py::arg("dataset"), py::arg("spec"), py::arg("config"),
      py::arg("batch_size"), py::arg("epochs"), py::arg("workers") = 1,
      py::arg("seed") = 0, py::arg("accelerate") = true,
      py::arg("permute") = true, py::arg("holdout") = nullptr,
      py::arg("eval_every") = 0,
      py::call_guard<py::gil_scoped_release>());

  // time-domain batch-size model
  m.def("iter_time", &isgd::iter_time, py::arg("n_b"), py::arg("system"));
  m.def("loss_after_time", &isgd::loss_after_time, py::arg("t"),
        py::arg("n_b"), py::arg("system"));
  m.def("time_for_loss", &isgd::time_for_loss, py::arg("target_loss"),
        py::arg("n_b"), py::arg("system"));
  m.def("optimal_batch", &isgd::optimal_batch, py::arg("target_loss"),
        py::arg("system"), py::arg("lo"), py::arg("hi"));
}
