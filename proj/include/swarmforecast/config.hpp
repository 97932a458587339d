#pragma once

#include <map>
#include <string>
#include <string_view>

#include "swarmforecast/experiments.hpp"

namespace swarmforecast {

/// Everything a training run needs besides the data itself.
struct ForecastConfig {
    HybridConfig hybrid;
    std::size_t window_len = 12;
    std::size_t hidden_len = 6;
    double init_range = 0.5;

    Topology topology() const { return Topology{window_len, hidden_len, 1}; }
    ExperimentConfig experiment() const {
        return ExperimentConfig{hybrid, window_len, hidden_len, init_range};
    }
};

ForecastConfig default_config();

/// Parses flat `key=value` lines. '#' starts a comment, blank lines are
/// skipped. Throws ValidationError with the line number on malformed lines
/// or duplicate keys.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Applies parsed keys onto a config. Unknown keys and unparseable values are
/// validation errors. Accepted keys: swarm_size, c1, c2, sigma, omega0,
/// omega_const, inertia_mode, j, k_max, target_fitness, z_min, z_max, n_i1,
/// n_i2, seed, alpha, eta, max_epochs, bp_target_loss, bp_refine, window_len,
/// hidden_len, init_range.
void apply_key_values(const std::map<std::string, std::string>& keys, ForecastConfig& config);

} // namespace swarmforecast
