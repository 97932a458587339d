#include "swarmforecast/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "swarmforecast/errors.hpp"
#include "format_util.hpp"

namespace swarmforecast {

using nlohmann::json;

Objective build_objective(const Topology& topology, const WindowedDataset& dataset) {
    if (dataset.samples.empty()) throw ValidationError("dataset is empty");
    if (dataset.window_len != topology.input_len)
        throw ValidationError("dataset window " + std::to_string(dataset.window_len) +
                              " does not match topology input " +
                              std::to_string(topology.input_len));
    if (topology.output_len != 1)
        throw ValidationError("windowed datasets carry one target per sample");
    Objective objective;
    objective.dim = topology.param_count();
    objective.fn = [topology, samples = dataset.samples](std::span<const double> position) {
        return mse_loss(topology, unflatten(topology, position), samples);
    };
    return objective;
}

namespace {

struct BpLoopResult {
    NetworkParams params;
    std::vector<double> trace;
    std::size_t epochs = 0;
    double final_loss = 0.0;
};

// Full-batch momentum descent; stops when the loss reaches target_loss or the
// epoch budget runs out.
BpLoopResult bp_descend(NetworkParams start, const Topology& topology,
                        std::span<const Sample> samples, const BPConfig& config) {
    BpLoopResult out;
    out.params = std::move(start);
    NetworkParams update = zeros_like(topology);
    out.final_loss = mse_loss(topology, out.params, samples);
    while (out.epochs < config.max_epochs && out.final_loss > config.target_loss) {
        const Gradient grad = backprop(topology, out.params, samples);
        std::tie(out.params, update) = momentum_step(out.params, grad, update, config);
        out.final_loss = mse_loss(topology, out.params, samples);
        ++out.epochs;
        if (!std::isfinite(out.final_loss))
            throw NumericError("training diverged to non-finite loss at epoch " +
                               std::to_string(out.epochs));
        out.trace.push_back(out.final_loss);
    }
    return out;
}

void validate_bp_config(const BPConfig& c) {
    if (!(c.learning_rate > 0.0)) throw ValidationError("learning rate alpha must be > 0");
    if (!(c.momentum >= 0.0 && c.momentum < 1.0))
        throw ValidationError("momentum eta must lie in [0, 1)");
    if (c.max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
    if (!(c.target_loss > 0.0)) throw ValidationError("target loss must be > 0");
}

} // namespace

TrainResult train_bp(const WindowedDataset& dataset, const Topology& topology,
                     const BPConfig& config, std::uint64_t seed, double init_range) {
    validate_bp_config(config);
    if (dataset.window_len != topology.input_len)
        throw ValidationError("dataset window does not match topology input");
    BpLoopResult loop =
        bp_descend(init_params(topology, seed, init_range), topology, dataset.samples, config);
    TrainResult result;
    result.model = TrainedModel{topology,
                                std::move(loop.params),
                                dataset.norm,
                                dataset.window_len,
                                "bp",
                                loop.epochs,
                                loop.final_loss,
                                seed};
    result.trace = std::move(loop.trace);
    return result;
}

TrainResult train_swarm_hybrid(const WindowedDataset& dataset, const Topology& topology,
                               const HybridConfig& config, Variant variant, std::uint64_t seed) {
    if (variant == Variant::vanilla)
        throw ValidationError("hybrid training uses the inertia or mpso variant");
    validate_bp_config(config.bp);
    const Objective objective = build_objective(topology, dataset);
    PSOConfig swarm_config = config.swarm;
    swarm_config.seed = seed;
    RunResult run = run_optimizer(objective, swarm_config, variant);

    NetworkParams params = unflatten(topology, run.best_position);
    TrainResult result;
    if (config.bp_refine) {
        BpLoopResult loop = bp_descend(std::move(params), topology, dataset.samples, config.bp);
        params = std::move(loop.params);
        result.bp_refine_epochs = loop.epochs;
    }
    const double final_fitness = mse_loss(topology, params, dataset.samples);
    result.model = TrainedModel{topology,
                                std::move(params),
                                dataset.norm,
                                dataset.window_len,
                                variant == Variant::mpso ? "mpso-bp" : "pso-bp",
                                run.iterations_used,
                                final_fitness,
                                seed};
    result.trace = std::move(run.trace);
    return result;
}

double relative_error(double true_value, double predicted) {
    if (!(true_value > 0.0) || !std::isfinite(true_value))
        throw ValidationError("relative error requires a positive true value");
    return 100.0 * (true_value - predicted) / true_value;
}

double accuracy_percent(double true_value, double predicted) {
    if (!(true_value > 0.0) || !std::isfinite(true_value))
        throw ValidationError("accuracy requires a positive true value");
    return 100.0 * (1.0 - std::abs(true_value - predicted) / true_value);
}

MetricsReport evaluate(const TrainedModel& model, const TimeSeries& test,
                       const TimeSeries& history) {
    validate_shape(model.topology, model.params);
    if (model.topology.input_len != model.window_len)
        throw ValidationError("model window_len does not match its topology input");
    if (history.size() < model.window_len)
        throw ValidationError("insufficient history: need at least " +
                              std::to_string(model.window_len) + " months, have " +
                              std::to_string(history.size()));
    if (history.last_month().next() != test.first_month())
        throw ValidationError("history must end immediately before the test range");

    std::vector<double> merged = history.values();
    const std::size_t offset = merged.size();
    for (const auto& p : test.points()) merged.push_back(p.value);

    MetricsReport report;
    std::vector<double> window(model.window_len);
    double sq_sum = 0.0, abs_sum = 0.0, abs_max = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        for (std::size_t k = 0; k < model.window_len; ++k)
            window[k] = normalize(merged[offset + i - model.window_len + k], model.normalization);
        const double predicted =
            denormalize(forward(model.topology, model.params, window)[0], model.normalization);
        const double truth = test.at(i).value;
        const double rel = relative_error(truth, predicted);
        report.rows.push_back({test.at(i).month, truth, predicted, rel});
        if (predicted < model.normalization.min || predicted > model.normalization.max)
            report.clamp_flag = true;
        sq_sum += (truth - predicted) * (truth - predicted);
        abs_sum += std::abs(rel);
        abs_max = std::max(abs_max, std::abs(rel));
    }
    const double n = static_cast<double>(test.size());
    report.mse = sq_sum / n;
    report.average_relative_error_pct = abs_sum / n;
    report.max_relative_error_pct = abs_max;
    return report;
}

namespace {

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

ComparisonReport compare_models(const TimeSeries& train, const TimeSeries& test,
                                const ExperimentConfig& config,
                                std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw ValidationError("need at least one seed");
    const NormalizationParams norm = fit_normalization(train);
    const WindowedDataset windows = make_windows(train, config.window_len, norm);
    const Topology topology{config.window_len, config.hidden_len, 1};

    struct TrainerSpec {
        const char* display;
        double target;
    };
    const TrainerSpec specs[3] = {
        {"BP", config.hybrid.bp.target_loss},
        {"PSO-BP", config.hybrid.swarm.target_fitness},
        {"MPSO-BP", config.hybrid.swarm.target_fitness},
    };

    ComparisonReport report;
    std::vector<double> iterations[3], avg_errs[3], max_errs[3];
    for (std::uint64_t seed : seeds) {
        for (int t = 0; t < 3; ++t) {
            TrainResult tr;
            switch (t) {
                case 0:
                    tr = train_bp(windows, topology, config.hybrid.bp, seed, config.init_range);
                    break;
                case 1:
                    tr = train_swarm_hybrid(windows, topology, config.hybrid, Variant::inertia,
                                            seed);
                    break;
                default:
                    tr = train_swarm_hybrid(windows, topology, config.hybrid, Variant::mpso, seed);
            }
            const MetricsReport metrics = evaluate(tr.model, test, train);
            ComparisonReport::Row row{specs[t].display, specs[t].target,
                                      static_cast<double>(tr.model.iterations_used),
                                      metrics.average_relative_error_pct,
                                      metrics.max_relative_error_pct};
            iterations[t].push_back(row.iterations);
            avg_errs[t].push_back(row.average_relative_error_pct);
            max_errs[t].push_back(row.max_relative_error_pct);
            report.per_seed.push_back({seed, std::move(row)});
        }
    }
    for (int t = 0; t < 3; ++t)
        report.aggregate.push_back({specs[t].display, specs[t].target, median(iterations[t]),
                                    median(avg_errs[t]), median(max_errs[t])});
    return report;
}

std::vector<ForecastPoint> predict_horizon(const TrainedModel& model, const TimeSeries& history,
                                           std::size_t horizon) {
    validate_shape(model.topology, model.params);
    if (model.topology.input_len != model.window_len)
        throw ValidationError("model window_len does not match its topology input");
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    if (history.size() < model.window_len)
        throw ValidationError("insufficient history: need at least " +
                              std::to_string(model.window_len) + " months, have " +
                              std::to_string(history.size()));

    std::vector<double> window(model.window_len);
    for (std::size_t k = 0; k < model.window_len; ++k)
        window[k] =
            normalize(history.at(history.size() - model.window_len + k).value,
                      model.normalization);

    std::vector<ForecastPoint> points;
    points.reserve(horizon);
    YearMonth month = history.last_month();
    for (std::size_t h = 0; h < horizon; ++h) {
        const double raw =
            denormalize(forward(model.topology, model.params, window)[0], model.normalization);
        month = month.next();
        ForecastPoint point;
        point.month = month;
        point.predicted = raw;
        point.clamped = std::clamp(raw, model.normalization.min, model.normalization.max);
        point.was_clamped = point.clamped != raw;
        points.push_back(point);
        // feed back through the same denormalize/normalize pair the caller
        // would apply when extending the history with reported values
        window.erase(window.begin());
        window.push_back(normalize(raw, model.normalization));
    }
    return points;
}

// --- persistence and report serialization ---

std::string model_to_json(const TrainedModel& model) {
    validate_shape(model.topology, model.params);
    json j;
    j["topology"] = {{"input", model.topology.input_len},
                     {"hidden", model.topology.hidden_len},
                     {"output", model.topology.output_len}};
    j["flat_params"] = flatten(model.params);
    j["normalization"] = {{"min", model.normalization.min}, {"max", model.normalization.max}};
    j["window_len"] = model.window_len;
    j["seed"] = model.seed;
    j["trainer"] = model.trainer;
    return j.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad model file: ") + e.what());
    }
    try {
        TrainedModel model;
        model.topology = Topology{j.at("topology").at("input").get<std::size_t>(),
                                  j.at("topology").at("hidden").get<std::size_t>(),
                                  j.at("topology").at("output").get<std::size_t>()};
        const auto flat = j.at("flat_params").get<std::vector<double>>();
        model.params = unflatten(model.topology, flat);
        model.normalization = NormalizationParams{j.at("normalization").at("min").get<double>(),
                                                  j.at("normalization").at("max").get<double>()};
        if (!(model.normalization.min < model.normalization.max))
            throw ValidationError("bad model file: normalization requires min < max");
        model.window_len = j.at("window_len").get<std::size_t>();
        model.seed = j.at("seed").get<std::uint64_t>();
        model.trainer = j.at("trainer").get<std::string>();
        return model;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad model file: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write model file '" + path + "'");
    out << model_to_json(model);
    if (!out) throw ValidationError("failed writing model file '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open model file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

namespace {

json metrics_rows_json(const MetricsReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"month", r.month.str()},
                        {"true", r.true_value},
                        {"predicted", r.predicted},
                        {"relative_error_pct", r.relative_error_pct}});
    return rows;
}

json comparison_row_json(const ComparisonReport::Row& row) {
    return {{"model", row.model},
            {"target_accuracy", row.target_accuracy},
            {"iterations", row.iterations},
            {"average_relative_error_pct", row.average_relative_error_pct},
            {"max_relative_error_pct", row.max_relative_error_pct}};
}

} // namespace

std::string metrics_to_json(const MetricsReport& report) {
    json j;
    j["rows"] = metrics_rows_json(report);
    j["mse"] = report.mse;
    j["average_relative_error_pct"] = report.average_relative_error_pct;
    j["max_relative_error_pct"] = report.max_relative_error_pct;
    j["clamp_flag"] = report.clamp_flag;
    return j.dump(2) + "\n";
}

std::string metrics_to_csv(const MetricsReport& report) {
    std::string out = "month,true,predicted,relative_error_pct\n";
    for (const auto& r : report.rows) {
        out += r.month.str();
        out += ',';
        out += detail::format_double(r.true_value);
        out += ',';
        out += detail::format_double(r.predicted);
        out += ',';
        out += detail::format_double(r.relative_error_pct);
        out += '\n';
    }
    return out;
}

std::string metrics_to_table(const MetricsReport& report) {
    char line[160];
    std::string out;
    std::snprintf(line, sizeof(line), "%-8s  %18s  %18s  %16s\n", "Month", "True value (kWh/t)",
                  "Predicted (kWh/t)", "Relative error %");
    out += line;
    for (const auto& r : report.rows) {
        std::snprintf(line, sizeof(line), "%-8s  %18.2f  %18.2f  %16.4f\n",
                      r.month.str().c_str(), r.true_value, r.predicted, r.relative_error_pct);
        out += line;
    }
    std::snprintf(line, sizeof(line), "MSE: %.6f\n", report.mse);
    out += line;
    std::snprintf(line, sizeof(line), "Average relative error %%: %.4f\n",
                  report.average_relative_error_pct);
    out += line;
    std::snprintf(line, sizeof(line), "Maximum relative error %%: %.4f\n",
                  report.max_relative_error_pct);
    out += line;
    if (report.clamp_flag)
        out += "Note: some predictions left the training value range.\n";
    return out;
}

std::string comparison_to_json(const ComparisonReport& report) {
    json j;
    j["per_seed"] = json::array();
    for (const auto& sr : report.per_seed) {
        json row = comparison_row_json(sr.row);
        row["seed"] = sr.seed;
        j["per_seed"].push_back(std::move(row));
    }
    j["aggregate"] = json::array();
    for (const auto& row : report.aggregate) j["aggregate"].push_back(comparison_row_json(row));
    return j.dump(2) + "\n";
}

std::string comparison_to_table(const ComparisonReport& report) {
    char line[160];
    std::string out;
    auto print_row = [&](const char* label, const ComparisonReport::Row& r) {
        std::snprintf(line, sizeof(line), "%-10s  %-8s  %8.3f  %10.0f  %24.4f  %24.4f\n", label,
                      r.model.c_str(), r.target_accuracy, r.iterations,
                      r.average_relative_error_pct, r.max_relative_error_pct);
        out += line;
    };
    std::snprintf(line, sizeof(line), "%-10s  %-8s  %8s  %10s  %24s  %24s\n", "Seed", "Model",
                  "Accuracy", "Iterations", "Average relative error %", "Maximum relative error %");
    out += line;
    for (const auto& sr : report.per_seed)
        print_row(std::to_string(sr.seed).c_str(), sr.row);
    for (const auto& row : report.aggregate) print_row("median", row);
    return out;
}

std::string forecast_to_csv(std::span<const ForecastPoint> points) {
    std::string out = "month,predicted_kwh_per_t,clamped\n";
    for (const auto& p : points) {
        out += p.month.str();
        out += ',';
        out += detail::format_double(p.predicted);
        out += ',';
        out += detail::format_double(p.clamped);
        out += '\n';
    }
    return out;
}

} // namespace swarmforecast
