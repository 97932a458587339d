#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swarmforecast/network.hpp"
#include "swarmforecast/pso.hpp"
#include "swarmforecast/timeseries.hpp"

namespace swarmforecast {

/// Swarm global search followed by optional gradient fine-tuning from the
/// best particle.
struct HybridConfig {
    PSOConfig swarm;
    BPConfig bp;
    bool bp_refine = true;
};

struct TrainedModel {
    Topology topology;
    NetworkParams params;
    NormalizationParams normalization;
    std::size_t window_len = 0;
    std::string trainer;
    std::size_t iterations_used = 0; // swarm iterations, or BP epochs for "bp"
    double final_fitness = 0.0;      // mse_loss on the training windows
    std::uint64_t seed = 0;
};

struct TrainResult {
    TrainedModel model;
    std::vector<double> trace; // per-iteration global best fitness / per-epoch loss
    std::size_t bp_refine_epochs = 0;
};

struct MetricsReport {
    struct Row {
        YearMonth month;
        double true_value = 0.0;
        double predicted = 0.0;
        double relative_error_pct = 0.0;
    };
    std::vector<Row> rows;
    double mse = 0.0;                        // kWh/t units
    double average_relative_error_pct = 0.0; // mean of |relative error|
    double max_relative_error_pct = 0.0;
    bool clamp_flag = false; // some prediction left the training value range
};

struct ComparisonReport {
    struct Row {
        std::string model;
        double target_accuracy = 0.0;
        double iterations = 0.0; // per-seed: integer count; aggregate: median
        double average_relative_error_pct = 0.0;
        double max_relative_error_pct = 0.0;
    };
    struct SeedRow {
        std::uint64_t seed = 0;
        Row row;
    };
    std::vector<SeedRow> per_seed;
    std::vector<Row> aggregate; // one row per trainer, medians over seeds
};

struct ForecastPoint {
    YearMonth month;
    double predicted = 0.0; // raw denormalized value
    double clamped = 0.0;   // predicted clamped into [norm.min, norm.max]
    bool was_clamped = false;
};

/// Wraps the network loss as a flat-vector fitness of dimension
/// topology.param_count(). The dataset is captured by value; the objective is
/// pure.
Objective build_objective(const Topology& topology, const WindowedDataset& dataset);

/// Full-batch momentum gradient descent from a seeded random init. Stops as
/// soon as the loss is at or below target_loss (checked before each epoch) or
/// after max_epochs. Throws NumericError naming the epoch on divergence.
TrainResult train_bp(const WindowedDataset& dataset, const Topology& topology,
                     const BPConfig& config, std::uint64_t seed,
                     double init_range = 0.5);

/// Runs the swarm optimizer on the network objective, then BP fine-tuning
/// from the best position when bp_refine is set. The returned trace is the
/// swarm trace; refine epochs are reported separately.
TrainResult train_swarm_hybrid(const WindowedDataset& dataset, const Topology& topology,
                               const HybridConfig& config, Variant variant,
                               std::uint64_t seed);

/// 100 * (true - pred) / true. Requires true > 0.
double relative_error(double true_value, double predicted);

/// 100 * (1 - |true - pred| / true). Requires true > 0.
double accuracy_percent(double true_value, double predicted);

/// One-step-ahead predictions over the test range using true history: the
/// window for each test month holds the actual preceding values. The history
/// must end immediately before the test range and span at least window_len
/// months.
MetricsReport evaluate(const TrainedModel& model, const TimeSeries& test,
                       const TimeSeries& history);

struct ExperimentConfig {
    HybridConfig hybrid;
    std::size_t window_len = 12;
    std::size_t hidden_len = 6;
    double init_range = 0.5;
};

/// Trains BP, PSO-BP (inertia) and MPSO-BP per seed on identical data and
/// topology, evaluates each on the test range, and aggregates rows per
/// trainer with medians over seeds.
ComparisonReport compare_models(const TimeSeries& train, const TimeSeries& test,
                                const ExperimentConfig& config,
                                std::span<const std::uint64_t> seeds);

/// Recursive multi-step forecast: each prediction is fed back into the
/// working window (through the denormalize/normalize pair, so extending the
/// history with reported values reproduces the same windows exactly).
std::vector<ForecastPoint> predict_horizon(const TrainedModel& model,
                                           const TimeSeries& history,
                                           std::size_t horizon);

// --- persistence and report serialization ---

/// Model file: JSON with topology, flat_params in canonical layout,
/// normalization, window_len, seed and trainer name. Numbers round-trip
/// exactly.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

std::string metrics_to_json(const MetricsReport& report);
std::string metrics_to_csv(const MetricsReport& report); // month,true,predicted,relative_error_pct
std::string metrics_to_table(const MetricsReport& report);

std::string comparison_to_json(const ComparisonReport& report);
std::string comparison_to_table(const ComparisonReport& report);

std::string forecast_to_csv(std::span<const ForecastPoint> points); // month,predicted_kwh_per_t,clamped

} // namespace swarmforecast
