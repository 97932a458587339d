#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarmforecast/config.hpp"
#include "swarmforecast/errors.hpp"
#include "swarmforecast/experiments.hpp"

namespace fs = std::filesystem;
using namespace swarmforecast;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file '" + path.string() + "'");
    out << content;
    if (!out) throw ValidationError("failed writing file '" + path.string() + "'");
}

// Options shared by the training-style commands. Precedence: CLI flag over
// config file over SWARM_FORECAST_SEED over built-in defaults.
struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed_flag;

    ForecastConfig resolve() const {
        ForecastConfig cfg = default_config();
        if (const char* env = std::getenv("SWARM_FORECAST_SEED")) {
            unsigned long long parsed = 0;
            std::string value(env);
            try {
                std::size_t used = 0;
                parsed = std::stoull(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ValidationError("SWARM_FORECAST_SEED: bad seed '" + value + "'");
            }
            cfg.hybrid.swarm.seed = parsed;
        }
        if (!config_path.empty())
            apply_key_values(parse_key_values(read_file(config_path)), cfg);
        if (seed_flag) cfg.hybrid.swarm.seed = *seed_flag;
        return cfg;
    }
};

TimeSeries load_series(const std::string& path) { return parse_series_csv(read_file(path)); }

YearMonth parse_month_flag(const std::string& text) { return YearMonth::parse(text); }

TrainResult run_trainer(const std::string& algorithm, const WindowedDataset& windows,
                        const ForecastConfig& cfg) {
    if (algorithm == "bp")
        return train_bp(windows, cfg.topology(), cfg.hybrid.bp, cfg.hybrid.swarm.seed,
                        cfg.init_range);
    if (algorithm == "pso-bp")
        return train_swarm_hybrid(windows, cfg.topology(), cfg.hybrid, Variant::inertia,
                                  cfg.hybrid.swarm.seed);
    if (algorithm == "mpso-bp")
        return train_swarm_hybrid(windows, cfg.topology(), cfg.hybrid, Variant::mpso,
                                  cfg.hybrid.swarm.seed);
    throw ValidationError("unknown algorithm '" + algorithm + "'");
}

int cmd_train(const std::string& data_path, const std::string& algorithm,
              const std::string& out_dir, const std::string& split, const CommonOpts& common) {
    const ForecastConfig cfg = common.resolve();
    TimeSeries series = load_series(data_path);
    if (!split.empty())
        series = split_train_test(series, parse_month_flag(split)).first;
    const NormalizationParams norm = fit_normalization(series);
    const WindowedDataset windows = make_windows(series, cfg.window_len, norm);

    const TrainResult result = run_trainer(algorithm, windows, cfg);

    fs::create_directories(out_dir);
    save_model(result.model, (fs::path(out_dir) / "model.json").string());
    write_file(fs::path(out_dir) / "trace.csv", trace_to_csv(result.trace));

    std::cout << "trainer: " << result.model.trainer << "\n"
              << "iterations: " << result.model.iterations_used << "\n";
    if (result.bp_refine_epochs > 0)
        std::cout << "refine epochs: " << result.bp_refine_epochs << "\n";
    std::cout << "final fitness: " << result.model.final_fitness << "\n"
              << "model: " << (fs::path(out_dir) / "model.json").string() << "\n";
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& split, const std::string& out_dir) {
    const TrainedModel model = load_model(model_path);
    const TimeSeries series = load_series(data_path);
    const auto [history, test] = split_train_test(series, parse_month_flag(split));
    const MetricsReport report = evaluate(model, test, history);

    std::cout << metrics_to_table(report);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "metrics.json", metrics_to_json(report));
        write_file(fs::path(out_dir) / "metrics.csv", metrics_to_csv(report));
        write_file(fs::path(out_dir) / "metrics.txt", metrics_to_table(report));
    }
    return 0;
}

int cmd_compare(const std::string& data_path, const std::string& split,
                const std::string& seeds_arg, const std::string& out_dir,
                const CommonOpts& common) {
    const ForecastConfig cfg = common.resolve();
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(seeds_arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            seeds.push_back(std::stoull(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("--seeds: bad seed '" + item + "'");
        }
    }
    if (seeds.empty()) throw ValidationError("--seeds: need at least one seed");

    const TimeSeries series = load_series(data_path);
    const auto [train, test] = split_train_test(series, parse_month_flag(split));
    const ComparisonReport report = compare_models(train, test, cfg.experiment(), seeds);

    std::cout << comparison_to_table(report);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "comparison.json", comparison_to_json(report));
        write_file(fs::path(out_dir) / "comparison.txt", comparison_to_table(report));
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                long long horizon, const std::string& out_path) {
    if (horizon < 1) throw ValidationError("--horizon must be >= 1");
    const TrainedModel model = load_model(model_path);
    const TimeSeries series = load_series(data_path);
    const auto points = predict_horizon(model, series, static_cast<std::size_t>(horizon));
    const std::string csv = forecast_to_csv(points);
    if (out_path.empty())
        std::cout << csv;
    else
        write_file(out_path, csv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feedforward load forecasting with BP, PSO-BP and MPSO-BP trainers"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string data_path, model_path, algorithm, out_dir, out_path, split, seeds_arg;
    long long horizon = 0;

    auto* train = app.add_subcommand("train", "Train a model and write model.json + trace.csv");
    train->add_option("--data", data_path, "input CSV")->required();
    train->add_option("--algorithm", algorithm, "bp | pso-bp | mpso-bp")->required();
    train->add_option("--out", out_dir, "output directory")->required();
    train->add_option("--config", common.config_path, "key=value config file");
    train->add_option("--seed", common.seed_flag, "RNG seed");
    train->add_option("--split", split, "train on months before YYYY-MM");

    auto* eval = app.add_subcommand("eval", "Evaluate a model on the held-out range");
    eval->add_option("--model", model_path, "model JSON")->required();
    eval->add_option("--data", data_path, "input CSV")->required();
    eval->add_option("--split", split, "test on months from YYYY-MM")->required();
    eval->add_option("--out", out_dir, "directory for metrics.{json,csv,txt}");

    auto* compare = app.add_subcommand("compare", "Train and compare the three trainers");
    compare->add_option("--data", data_path, "input CSV")->required();
    compare->add_option("--split", split, "train/test boundary YYYY-MM")->required();
    compare->add_option("--seeds", seeds_arg, "comma-separated seed list")->required();
    compare->add_option("--config", common.config_path, "key=value config file");
    compare->add_option("--out", out_dir, "directory for comparison.{json,txt}");

    auto* predict = app.add_subcommand("predict", "Recursive multi-month forecast CSV");
    predict->add_option("--model", model_path, "model JSON")->required();
    predict->add_option("--data", data_path, "input CSV")->required();
    predict->add_option("--horizon", horizon, "months ahead")->required();
    predict->add_option("--out", out_path, "output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
        if (train->parsed()) return cmd_train(data_path, algorithm, out_dir, split, common);
        if (eval->parsed()) return cmd_eval(model_path, data_path, split, out_dir);
        if (compare->parsed()) return cmd_compare(data_path, split, seeds_arg, out_dir, common);
        if (predict->parsed()) return cmd_predict(model_path, data_path, horizon, out_path);
        return kExitValidation;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitValidation;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
