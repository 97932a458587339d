#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "swarmforecast/timeseries.hpp"

namespace swarmforecast {

/// Shape of the fixed two-layer network: sigmoid hidden layer, linear output.
struct Topology {
    std::size_t input_len = 1;
    std::size_t hidden_len = 1;
    std::size_t output_len = 1;

    /// Flattened parameter dimension.
    std::size_t param_count() const {
        return input_len * hidden_len + hidden_len + hidden_len * output_len + output_len;
    }

    bool operator==(const Topology&) const = default;
};

/// Weights and biases of one network. w1 is hidden_len x input_len row-major,
/// w2 is output_len x hidden_len row-major.
struct NetworkParams {
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    std::vector<double> b2;

    bool operator==(const NetworkParams&) const = default;
};

/// Partial derivatives of the loss, shaped like the parameters.
using Gradient = NetworkParams;

/// Momentum gradient-descent settings.
struct BPConfig {
    double learning_rate = 0.07;
    double momentum = 0.80;
    std::size_t max_epochs = 2000;
    double target_loss = 0.005;
};

/// Uniform init in [-range, +range]; the same seed reproduces the same
/// parameters bit for bit.
NetworkParams init_params(const Topology& topology, std::uint64_t seed, double range);

/// hidden = sigmoid(w1*x + b1); output = w2*hidden + b2.
std::vector<double> forward(const Topology& topology, const NetworkParams& params,
                            std::span<const double> input);

/// Mean over samples of the summed squared output errors.
double mse_loss(const Topology& topology, const NetworkParams& params,
                std::span<const Sample> samples);

/// Exact analytic gradient of mse_loss at params.
Gradient backprop(const Topology& topology, const NetworkParams& params,
                  std::span<const Sample> samples);

/// update = -learning_rate*gradient + momentum*previous_update;
/// returns (params + update, update).
std::pair<NetworkParams, NetworkParams> momentum_step(const NetworkParams& params,
                                                      const Gradient& gradient,
                                                      const NetworkParams& previous_update,
                                                      const BPConfig& config);

/// Canonical layout: w1 row-major, b1, w2 row-major, b2.
std::vector<double> flatten(const NetworkParams& params);
NetworkParams unflatten(const Topology& topology, std::span<const double> position);

NetworkParams zeros_like(const Topology& topology);

void validate_shape(const Topology& topology, const NetworkParams& params);

} // namespace swarmforecast
