#include "swarmforecast/network.hpp"

#include <cmath>
#include <random>
#include <string>

#include "swarmforecast/errors.hpp"

namespace swarmforecast {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_topology(const Topology& t) {
    if (t.input_len < 1 || t.hidden_len < 1 || t.output_len < 1)
        throw ValidationError("topology layer sizes must be >= 1");
}

// hidden and output are preallocated scratch of hidden_len / output_len.
void forward_into(const Topology& t, const NetworkParams& p, std::span<const double> input,
                  std::vector<double>& hidden, std::vector<double>& output) {
    for (std::size_t j = 0; j < t.hidden_len; ++j) {
        double acc = p.b1[j];
        const double* row = &p.w1[j * t.input_len];
        for (std::size_t i = 0; i < t.input_len; ++i) acc += row[i] * input[i];
        hidden[j] = sigmoid(acc);
    }
    for (std::size_t k = 0; k < t.output_len; ++k) {
        double acc = p.b2[k];
        const double* row = &p.w2[k * t.hidden_len];
        for (std::size_t j = 0; j < t.hidden_len; ++j) acc += row[j] * hidden[j];
        output[k] = acc;
    }
}

void check_samples(const Topology& t, std::span<const Sample> samples) {
    if (samples.empty()) throw ValidationError("dataset is empty");
    for (const Sample& s : samples) {
        if (s.inputs.size() != t.input_len)
            throw ValidationError("sample input width " + std::to_string(s.inputs.size()) +
                                  " does not match topology input " +
                                  std::to_string(t.input_len));
        if (s.targets.size() != t.output_len)
            throw ValidationError("sample target width " + std::to_string(s.targets.size()) +
                                  " does not match topology output " +
                                  std::to_string(t.output_len));
    }
}

} // namespace

void validate_shape(const Topology& t, const NetworkParams& p) {
    check_topology(t);
    if (p.w1.size() != t.hidden_len * t.input_len || p.b1.size() != t.hidden_len ||
        p.w2.size() != t.output_len * t.hidden_len || p.b2.size() != t.output_len)
        throw ValidationError("parameter shapes do not match topology");
}

NetworkParams zeros_like(const Topology& t) {
    check_topology(t);
    NetworkParams p;
    p.w1.assign(t.hidden_len * t.input_len, 0.0);
    p.b1.assign(t.hidden_len, 0.0);
    p.w2.assign(t.output_len * t.hidden_len, 0.0);
    p.b2.assign(t.output_len, 0.0);
    return p;
}

NetworkParams init_params(const Topology& t, std::uint64_t seed, double range) {
    check_topology(t);
    if (!(range > 0.0)) throw ValidationError("init range must be > 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-range, range);
    NetworkParams p = zeros_like(t);
    for (double& v : p.w1) v = dist(rng);
    for (double& v : p.b1) v = dist(rng);
    for (double& v : p.w2) v = dist(rng);
    for (double& v : p.b2) v = dist(rng);
    return p;
}

std::vector<double> forward(const Topology& t, const NetworkParams& p,
                            std::span<const double> input) {
    validate_shape(t, p);
    if (input.size() != t.input_len)
        throw ValidationError("input length " + std::to_string(input.size()) +
                              " does not match topology input " + std::to_string(t.input_len));
    std::vector<double> hidden(t.hidden_len), output(t.output_len);
    forward_into(t, p, input, hidden, output);
    return output;
}

double mse_loss(const Topology& t, const NetworkParams& p, std::span<const Sample> samples) {
    validate_shape(t, p);
    check_samples(t, samples);
    std::vector<double> hidden(t.hidden_len), output(t.output_len);
    double total = 0.0;
    for (const Sample& s : samples) {
        forward_into(t, p, s.inputs, hidden, output);
        for (std::size_t k = 0; k < t.output_len; ++k) {
            const double d = output[k] - s.targets[k];
            total += d * d;
        }
    }
    return total / static_cast<double>(samples.size());
}

Gradient backprop(const Topology& t, const NetworkParams& p, std::span<const Sample> samples) {
    validate_shape(t, p);
    check_samples(t, samples);
    Gradient g = zeros_like(t);
    std::vector<double> hidden(t.hidden_len), output(t.output_len), delta_hidden(t.hidden_len);
    const double scale = 2.0 / static_cast<double>(samples.size());
    for (const Sample& s : samples) {
        forward_into(t, p, s.inputs, hidden, output);
        for (std::size_t j = 0; j < t.hidden_len; ++j) delta_hidden[j] = 0.0;
        for (std::size_t k = 0; k < t.output_len; ++k) {
            const double delta_out = scale * (output[k] - s.targets[k]);
            g.b2[k] += delta_out;
            double* w2_row = &g.w2[k * t.hidden_len];
            const double* p2_row = &p.w2[k * t.hidden_len];
            for (std::size_t j = 0; j < t.hidden_len; ++j) {
                w2_row[j] += delta_out * hidden[j];
                delta_hidden[j] += delta_out * p2_row[j];
            }
        }
        for (std::size_t j = 0; j < t.hidden_len; ++j) {
            const double delta = delta_hidden[j] * hidden[j] * (1.0 - hidden[j]);
            g.b1[j] += delta;
            double* w1_row = &g.w1[j * t.input_len];
            for (std::size_t i = 0; i < t.input_len; ++i) w1_row[i] += delta * s.inputs[i];
        }
    }
    return g;
}

std::pair<NetworkParams, NetworkParams> momentum_step(const NetworkParams& params,
                                                      const Gradient& gradient,
                                                      const NetworkParams& previous_update,
                                                      const BPConfig& config) {
    auto combine = [&](const std::vector<double>& p, const std::vector<double>& g,
                       const std::vector<double>& u, std::vector<double>& new_p,
                       std::vector<double>& new_u) {
        if (g.size() != p.size() || u.size() != p.size())
            throw ValidationError("momentum_step shape mismatch");
        new_p.resize(p.size());
        new_u.resize(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            new_u[i] = -config.learning_rate * g[i] + config.momentum * u[i];
            new_p[i] = p[i] + new_u[i];
        }
    };
    NetworkParams next, update;
    combine(params.w1, gradient.w1, previous_update.w1, next.w1, update.w1);
    combine(params.b1, gradient.b1, previous_update.b1, next.b1, update.b1);
    combine(params.w2, gradient.w2, previous_update.w2, next.w2, update.w2);
    combine(params.b2, gradient.b2, previous_update.b2, next.b2, update.b2);
    return {std::move(next), std::move(update)};
}

std::vector<double> flatten(const NetworkParams& p) {
    std::vector<double> flat;
    flat.reserve(p.w1.size() + p.b1.size() + p.w2.size() + p.b2.size());
    flat.insert(flat.end(), p.w1.begin(), p.w1.end());
    flat.insert(flat.end(), p.b1.begin(), p.b1.end());
    flat.insert(flat.end(), p.w2.begin(), p.w2.end());
    flat.insert(flat.end(), p.b2.begin(), p.b2.end());
    return flat;
}

NetworkParams unflatten(const Topology& t, std::span<const double> position) {
    check_topology(t);
    if (position.size() != t.param_count())
        throw ValidationError("position length " + std::to_string(position.size()) +
                              " does not match parameter dimension " +
                              std::to_string(t.param_count()));
    NetworkParams p;
    auto it = position.begin();
    p.w1.assign(it, it + static_cast<std::ptrdiff_t>(t.hidden_len * t.input_len));
    it += static_cast<std::ptrdiff_t>(t.hidden_len * t.input_len);
    p.b1.assign(it, it + static_cast<std::ptrdiff_t>(t.hidden_len));
    it += static_cast<std::ptrdiff_t>(t.hidden_len);
    p.w2.assign(it, it + static_cast<std::ptrdiff_t>(t.output_len * t.hidden_len));
    it += static_cast<std::ptrdiff_t>(t.output_len * t.hidden_len);
    p.b2.assign(it, it + static_cast<std::ptrdiff_t>(t.output_len));
    return p;
}

} // namespace swarmforecast
