#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swarmforecast/config.hpp"
#include "swarmforecast/errors.hpp"
#include "swarmforecast/experiments.hpp"

namespace py = pybind11;
using namespace swarmforecast;

PYBIND11_MODULE(_swarmforecast, m) {
    m.doc() = "Monthly load forecasting with BP, PSO-BP and MPSO-BP trainers";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    // --- time series ---
    py::class_<YearMonth>(m, "YearMonth")
        .def(py::init<int, int>(), py::arg("year"), py::arg("month"))
        .def_readonly("year", &YearMonth::year)
        .def_readonly("month", &YearMonth::month)
        .def("next", &YearMonth::next)
        .def("__str__", &YearMonth::str)
        .def("__repr__", [](const YearMonth& ym) { return "YearMonth(" + ym.str() + ")"; })
        .def("__eq__", [](const YearMonth& a, const YearMonth& b) { return a == b; })
        .def_static("parse", &YearMonth::parse);

    py::class_<TimeSeries::Point>(m, "Point")
        .def_readonly("month", &TimeSeries::Point::month)
        .def_readonly("value", &TimeSeries::Point::value);

    py::class_<TimeSeries>(m, "TimeSeries")
        .def(py::init([](const std::vector<std::pair<std::string, double>>& rows) {
                 std::vector<TimeSeries::Point> pts;
                 pts.reserve(rows.size());
                 for (const auto& [month, value] : rows)
                     pts.push_back({YearMonth::parse(month), value});
                 return TimeSeries(std::move(pts));
             }),
             py::arg("rows"), "Build from [(\"YYYY-MM\", value), ...]")
        .def("__len__", &TimeSeries::size)
        .def_property_readonly("points", &TimeSeries::points)
        .def_property_readonly("values", &TimeSeries::values)
        .def_property_readonly("first_month", &TimeSeries::first_month)
        .def_property_readonly("last_month", &TimeSeries::last_month);

    py::class_<NormalizationParams>(m, "NormalizationParams")
        .def(py::init<double, double>(), py::arg("min"), py::arg("max"))
        .def_readonly("min", &NormalizationParams::min)
        .def_readonly("max", &NormalizationParams::max);

    py::class_<Sample>(m, "Sample")
        .def_readonly("inputs", &Sample::inputs)
        .def_readonly("targets", &Sample::targets);

    py::class_<WindowedDataset>(m, "WindowedDataset")
        .def_readonly("window_len", &WindowedDataset::window_len)
        .def_readonly("samples", &WindowedDataset::samples)
        .def_readonly("norm", &WindowedDataset::norm);

    m.def("parse_series_csv", &parse_series_csv, py::arg("text"));
    m.def("serialize_series_csv", &serialize_series_csv, py::arg("series"));
    m.def("fit_normalization", &fit_normalization, py::arg("series"));
    m.def("normalize", &normalize, py::arg("value"), py::arg("params"));
    m.def("denormalize", &denormalize, py::arg("value"), py::arg("params"));
    m.def("make_windows", &make_windows, py::arg("series"), py::arg("window_len"),
          py::arg("params"));
    m.def(
        "split_train_test",
        [](const TimeSeries& series, const std::string& boundary) {
            return split_train_test(series, YearMonth::parse(boundary));
        },
        py::arg("series"), py::arg("boundary"));

    // --- network ---
    py::class_<Topology>(m, "Topology")
        .def(py::init<std::size_t, std::size_t, std::size_t>(), py::arg("input_len"),
             py::arg("hidden_len"), py::arg("output_len"))
        .def_readonly("input_len", &Topology::input_len)
        .def_readonly("hidden_len", &Topology::hidden_len)
        .def_readonly("output_len", &Topology::output_len)
        .def("param_count", &Topology::param_count);

    py::class_<NetworkParams>(m, "NetworkParams")
        .def_readonly("w1", &NetworkParams::w1)
        .def_readonly("b1", &NetworkParams::b1)
        .def_readonly("w2", &NetworkParams::w2)
        .def_readonly("b2", &NetworkParams::b2);

    py::class_<BPConfig>(m, "BPConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &BPConfig::learning_rate)
        .def_readwrite("momentum", &BPConfig::momentum)
        .def_readwrite("max_epochs", &BPConfig::max_epochs)
        .def_readwrite("target_loss", &BPConfig::target_loss);

    m.def("init_params", &init_params, py::arg("topology"), py::arg("seed"), py::arg("range"));
    m.def(
        "forward",
        [](const Topology& t, const NetworkParams& p, const std::vector<double>& input) {
            return forward(t, p, input);
        },
        py::arg("topology"), py::arg("params"), py::arg("input"));
    m.def(
        "mse_loss",
        [](const Topology& t, const NetworkParams& p, const std::vector<Sample>& samples) {
            return mse_loss(t, p, samples);
        },
        py::arg("topology"), py::arg("params"), py::arg("samples"));
    m.def(
        "backprop",
        [](const Topology& t, const NetworkParams& p, const std::vector<Sample>& samples) {
            return backprop(t, p, samples);
        },
        py::arg("topology"), py::arg("params"), py::arg("samples"));
    m.def("flatten", &flatten, py::arg("params"));
    m.def(
        "unflatten",
        [](const Topology& t, const std::vector<double>& flat) { return unflatten(t, flat); },
        py::arg("topology"), py::arg("flat"));

    // --- swarm optimizer ---
    py::enum_<Variant>(m, "Variant")
        .value("vanilla", Variant::vanilla)
        .value("inertia", Variant::inertia)
        .value("mpso", Variant::mpso);

    py::enum_<InertiaMode>(m, "InertiaMode")
        .value("scheduled", InertiaMode::scheduled)
        .value("constant", InertiaMode::constant);

    py::class_<PSOConfig>(m, "PSOConfig")
        .def(py::init<>())
        .def_readwrite("swarm_size", &PSOConfig::swarm_size)
        .def_readwrite("c1", &PSOConfig::c1)
        .def_readwrite("c2", &PSOConfig::c2)
        .def_readwrite("z_min", &PSOConfig::z_min)
        .def_readwrite("z_max", &PSOConfig::z_max)
        .def_readwrite("n_i1", &PSOConfig::n_i1)
        .def_readwrite("n_i2", &PSOConfig::n_i2)
        .def_readwrite("sigma", &PSOConfig::sigma)
        .def_readwrite("omega0", &PSOConfig::omega0)
        .def_readwrite("omega_const", &PSOConfig::omega_const)
        .def_readwrite("inertia_mode", &PSOConfig::inertia_mode)
        .def_readwrite("sub_steps", &PSOConfig::sub_steps)
        .def_readwrite("k_max", &PSOConfig::k_max)
        .def_readwrite("target_fitness", &PSOConfig::target_fitness)
        .def_readwrite("seed", &PSOConfig::seed);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("best_position", &RunResult::best_position)
        .def_readonly("best_fitness", &RunResult::best_fitness)
        .def_readonly("trace", &RunResult::trace)
        .def_readonly("iterations_used", &RunResult::iterations_used);

    m.def("inertia_weight", &inertia_weight, py::arg("k"), py::arg("config"));
    m.def("speed_coefficient", &speed_coefficient, py::arg("v_base_d"), py::arg("n"),
          py::arg("config"), py::arg("sign"));
    m.def(
        "run_optimizer",
        [](std::size_t dim, const std::function<double(std::vector<double>)>& fn,
           const PSOConfig& config, Variant variant) {
            Objective objective;
            objective.dim = dim;
            objective.fn = [fn](std::span<const double> z) {
                return fn(std::vector<double>(z.begin(), z.end()));
            };
            return run_optimizer(objective, config, variant);
        },
        py::arg("dim"), py::arg("objective"), py::arg("config"), py::arg("variant"),
        "Minimize a python callable over flat position vectors");
    m.def("trace_to_csv",
          [](const std::vector<double>& trace) { return trace_to_csv(trace); });

    // --- experiments ---
    py::class_<HybridConfig>(m, "HybridConfig")
        .def(py::init<>())
        .def_readwrite("swarm", &HybridConfig::swarm)
        .def_readwrite("bp", &HybridConfig::bp)
        .def_readwrite("bp_refine", &HybridConfig::bp_refine);

    py::class_<TrainedModel>(m, "TrainedModel")
        .def_readonly("topology", &TrainedModel::topology)
        .def_readonly("params", &TrainedModel::params)
        .def_readonly("normalization", &TrainedModel::normalization)
        .def_readonly("window_len", &TrainedModel::window_len)
        .def_readonly("trainer", &TrainedModel::trainer)
        .def_readonly("iterations_used", &TrainedModel::iterations_used)
        .def_readonly("final_fitness", &TrainedModel::final_fitness)
        .def_readonly("seed", &TrainedModel::seed);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("model", &TrainResult::model)
        .def_readonly("trace", &TrainResult::trace)
        .def_readonly("bp_refine_epochs", &TrainResult::bp_refine_epochs);

    py::class_<MetricsReport::Row>(m, "MetricsRow")
        .def_readonly("month", &MetricsReport::Row::month)
        .def_readonly("true_value", &MetricsReport::Row::true_value)
        .def_readonly("predicted", &MetricsReport::Row::predicted)
        .def_readonly("relative_error_pct", &MetricsReport::Row::relative_error_pct);

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("rows", &MetricsReport::rows)
        .def_readonly("mse", &MetricsReport::mse)
        .def_readonly("average_relative_error_pct", &MetricsReport::average_relative_error_pct)
        .def_readonly("max_relative_error_pct", &MetricsReport::max_relative_error_pct)
        .def_readonly("clamp_flag", &MetricsReport::clamp_flag);

    py::class_<ComparisonReport::Row>(m, "ComparisonRow")
        .def_readonly("model", &ComparisonReport::Row::model)
        .def_readonly("target_accuracy", &ComparisonReport::Row::target_accuracy)
        .def_readonly("iterations", &ComparisonReport::Row::iterations)
        .def_readonly("average_relative_error_pct",
                      &ComparisonReport::Row::average_relative_error_pct)
        .def_readonly("max_relative_error_pct", &ComparisonReport::Row::max_relative_error_pct);

    py::class_<ComparisonReport::SeedRow>(m, "ComparisonSeedRow")
        .def_readonly("seed", &ComparisonReport::SeedRow::seed)
        .def_readonly("row", &ComparisonReport::SeedRow::row);

    py::class_<ComparisonReport>(m, "ComparisonReport")
        .def_readonly("per_seed", &ComparisonReport::per_seed)
        .def_readonly("aggregate", &ComparisonReport::aggregate);

    py::class_<ForecastPoint>(m, "ForecastPoint")
        .def_readonly("month", &ForecastPoint::month)
        .def_readonly("predicted", &ForecastPoint::predicted)
        .def_readonly("clamped", &ForecastPoint::clamped)
        .def_readonly("was_clamped", &ForecastPoint::was_clamped);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("hybrid", &ExperimentConfig::hybrid)
        .def_readwrite("window_len", &ExperimentConfig::window_len)
        .def_readwrite("hidden_len", &ExperimentConfig::hidden_len)
        .def_readwrite("init_range", &ExperimentConfig::init_range);

    py::class_<ForecastConfig>(m, "ForecastConfig")
        .def(py::init<>())
        .def_readwrite("hybrid", &ForecastConfig::hybrid)
        .def_readwrite("window_len", &ForecastConfig::window_len)
        .def_readwrite("hidden_len", &ForecastConfig::hidden_len)
        .def_readwrite("init_range", &ForecastConfig::init_range)
        .def("topology", &ForecastConfig::topology)
        .def("experiment", &ForecastConfig::experiment);

    m.def("default_config", &default_config);
    m.def("train_bp", &train_bp, py::arg("dataset"), py::arg("topology"), py::arg("config"),
          py::arg("seed"), py::arg("init_range") = 0.5);
    m.def("train_swarm_hybrid", &train_swarm_hybrid, py::arg("dataset"), py::arg("topology"),
          py::arg("config"), py::arg("variant"), py::arg("seed"));
    m.def("relative_error", &relative_error, py::arg("true_value"), py::arg("predicted"));
    m.def("accuracy_percent", &accuracy_percent, py::arg("true_value"), py::arg("predicted"));
    m.def("evaluate", &evaluate, py::arg("model"), py::arg("test"), py::arg("history"));
    m.def(
        "compare_models",
        [](const TimeSeries& train, const TimeSeries& test, const ExperimentConfig& config,
           const std::vector<std::uint64_t>& seeds) {
            return compare_models(train, test, config, seeds);
        },
        py::arg("train"), py::arg("test"), py::arg("config"), py::arg("seeds"));
    m.def("predict_horizon", &predict_horizon, py::arg("model"), py::arg("history"),
          py::arg("horizon"));

    m.def("model_to_json", &model_to_json);
    m.def("model_from_json", &model_from_json);
    m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &load_model, py::arg("path"));
    m.def("metrics_to_json", &metrics_to_json);
    m.def("metrics_to_csv", &metrics_to_csv);
    m.def("metrics_to_table", &metrics_to_table);
    m.def("comparison_to_json", &comparison_to_json);
    m.def("comparison_to_table", &comparison_to_table);
    m.def("forecast_to_csv", [](const std::vector<ForecastPoint>& points) {
        return forecast_to_csv(points);
    });
}
