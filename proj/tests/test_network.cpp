#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "swarmforecast/errors.hpp"
#include "swarmforecast/network.hpp"

using namespace swarmforecast;

namespace {

std::vector<Sample> random_samples(std::mt19937_64& rng, const Topology& t, std::size_t count) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<Sample> samples(count);
    for (Sample& s : samples) {
        s.inputs.resize(t.input_len);
        s.targets.resize(t.output_len);
        for (double& x : s.inputs) x = dist(rng);
        for (double& x : s.targets) x = dist(rng);
    }
    return samples;
}

NetworkParams random_params(std::mt19937_64& rng, const Topology& t, double range = 1.0) {
    return init_params(t, rng(), range);
}

// Central finite differences of mse_loss, the independent gradient oracle.
Gradient finite_difference_gradient(const Topology& t, const NetworkParams& params,
                                    std::span<const Sample> samples, double step = 1e-5) {
    Gradient fd = zeros_like(t);
    auto probe = [&](std::vector<double> NetworkParams::* field, std::size_t i) {
        NetworkParams plus = params, minus = params;
        (plus.*field)[i] += step;
        (minus.*field)[i] -= step;
        return (mse_loss(t, plus, samples) - mse_loss(t, minus, samples)) / (2.0 * step);
    };
    for (std::size_t i = 0; i < params.w1.size(); ++i) fd.w1[i] = probe(&NetworkParams::w1, i);
    for (std::size_t i = 0; i < params.b1.size(); ++i) fd.b1[i] = probe(&NetworkParams::b1, i);
    for (std::size_t i = 0; i < params.w2.size(); ++i) fd.w2[i] = probe(&NetworkParams::w2, i);
    for (std::size_t i = 0; i < params.b2.size(); ++i) fd.b2[i] = probe(&NetworkParams::b2, i);
    return fd;
}

double max_relative_deviation(const Gradient& a, const Gradient& b) {
    double worst = 0.0;
    auto scan = [&](const std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double denom = std::max({0.01, std::abs(x[i]), std::abs(y[i])});
            worst = std::max(worst, std::abs(x[i] - y[i]) / denom);
        }
    };
    scan(a.w1, b.w1);
    scan(a.b1, b.b1);
    scan(a.w2, b.w2);
    scan(a.b2, b.b2);
    return worst;
}

} // namespace

TEST_CASE("init_params is seed-deterministic and bounded") {
    const Topology t{12, 6, 1};
    const NetworkParams a = init_params(t, 42, 0.5);
    const NetworkParams b = init_params(t, 42, 0.5);
    CHECK(a == b);
    CHECK(init_params(t, 43, 0.5) != a);
    for (double v : flatten(a)) CHECK(std::abs(v) <= 0.5);
    CHECK(flatten(a).size() == 85); // 12*6 + 6 + 6*1 + 1
}

TEST_CASE("forward on hand-built parameters") {
    const Topology t{1, 1, 1};
    SUBCASE("all-zero parameters give zero output") {
        const std::vector<double> input = {0.7};
        CHECK(forward(t, zeros_like(t), input)[0] == doctest::Approx(0.0));
    }
    SUBCASE("w2=2, b2=-1 cancels the sigmoid midpoint for any input") {
        NetworkParams p = zeros_like(t);
        p.w2[0] = 2.0;
        p.b2[0] = -1.0;
        for (double x : {-3.0, 0.0, 0.25, 8.0}) {
            const std::vector<double> input = {x};
            CHECK(forward(t, p, input)[0] == doctest::Approx(0.0)); // 2*sigmoid(0) - 1
        }
    }
    SUBCASE("shapes and finiteness") {
        const Topology big{12, 6, 1};
        std::mt19937_64 rng(1);
        const NetworkParams p = random_params(rng, big);
        std::vector<double> input(12, 0.3);
        const auto out = forward(big, p, input);
        REQUIRE(out.size() == 1);
        CHECK(std::isfinite(out[0]));
        std::vector<double> wrong(11, 0.3);
        CHECK_THROWS_AS(forward(big, p, wrong), ValidationError);
    }
}

TEST_CASE("forward is deterministic") {
    const Topology t{4, 3, 2};
    std::mt19937_64 rng(5);
    const NetworkParams p = random_params(rng, t);
    const std::vector<double> input = {0.1, 0.9, 0.4, 0.6};
    const auto a = forward(t, p, input);
    const auto b = forward(t, p, input);
    CHECK(a == b);
}

TEST_CASE("mse_loss matches hand-computed values") {
    const Topology t{1, 1, 1};
    SUBCASE("zero when predictions equal targets") {
        NetworkParams p = zeros_like(t); // constant output 0
        std::vector<Sample> samples = {{{0.2}, {0.0}}, {{0.8}, {0.0}}};
        CHECK(mse_loss(t, p, samples) == doctest::Approx(0.0));
    }
    SUBCASE("one sample, error 0.2 -> 0.04") {
        NetworkParams p = zeros_like(t);
        p.b2[0] = 0.5; // constant output 0.5
        std::vector<Sample> samples = {{{0.1}, {0.3}}};
        CHECK(mse_loss(t, p, samples) == doctest::Approx(0.04));
    }
    SUBCASE("two samples with errors +1 and -1 -> 1.0") {
        NetworkParams p = zeros_like(t); // constant output 0
        std::vector<Sample> samples = {{{0.1}, {1.0}}, {{0.2}, {-1.0}}};
        CHECK(mse_loss(t, p, samples) == doctest::Approx(1.0));
    }
    SUBCASE("empty dataset is an error") {
        CHECK_THROWS_AS(mse_loss(t, zeros_like(t), {}), ValidationError);
    }
}

TEST_CASE("backprop is zero at a perfect fit") {
    const Topology t{2, 2, 1};
    NetworkParams p = zeros_like(t);
    p.b2[0] = 0.4;
    std::vector<Sample> samples = {{{0.2, 0.3}, {0.4}}, {{0.9, 0.1}, {0.4}}};
    REQUIRE(mse_loss(t, p, samples) == doctest::Approx(0.0));
    const Gradient g = backprop(t, p, samples);
    for (double v : flatten(g)) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("backprop matches central finite differences on 100 random instances") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> in_len(1, 6), hid_len(1, 4), out_len(1, 2);
    double worst = 0.0;
    for (int round = 0; round < 100; ++round) {
        const Topology t{in_len(rng), hid_len(rng), out_len(rng)};
        const NetworkParams params = random_params(rng, t);
        const auto samples = random_samples(rng, t, 5);
        const Gradient analytic = backprop(t, params, samples);
        const Gradient numeric = finite_difference_gradient(t, params, samples);
        worst = std::max(worst, max_relative_deviation(analytic, numeric));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("target scaling shifts output-bias gradients linearly, per the oracle") {
    // with a linear output unit and fixed hidden activations,
    // d(loss)/d(b2) = (2/n) * sum(output - target); doubling the targets must
    // shift it by exactly -(2/n) * sum(target)
    std::mt19937_64 rng(77);
    const Topology t{3, 2, 1};
    const NetworkParams params = random_params(rng, t);
    auto samples = random_samples(rng, t, 4);
    auto scaled = samples;
    double target_sum = 0.0;
    for (Sample& s : scaled) {
        target_sum += s.targets[0];
        s.targets[0] *= 2.0;
    }
    const Gradient g1 = backprop(t, params, samples);
    const Gradient g2 = backprop(t, params, scaled);
    const double expected_shift = -2.0 / 4.0 * target_sum;
    CHECK(g2.b2[0] - g1.b2[0] == doctest::Approx(expected_shift).epsilon(1e-12));
    CHECK(max_relative_deviation(g1, finite_difference_gradient(t, params, samples)) < 1e-6);
    CHECK(max_relative_deviation(g2, finite_difference_gradient(t, params, scaled)) < 1e-6);
}

TEST_CASE("momentum_step arithmetic") {
    const Topology t{1, 1, 1};
    const NetworkParams p = init_params(t, 9, 1.0);
    SUBCASE("zero gradient and zero previous update leave params unchanged") {
        const BPConfig cfg{0.07, 0.8, 100, 1e-9};
        auto [next, update] = momentum_step(p, zeros_like(t), zeros_like(t), cfg);
        CHECK(next == p);
        for (double v : flatten(update)) CHECK(v == 0.0);
    }
    SUBCASE("eta=0 gives the plain gradient-descent step") {
        const BPConfig cfg{0.1, 0.0, 100, 1e-9};
        Gradient g = zeros_like(t);
        g.b2[0] = 2.0;
        auto [next, update] = momentum_step(p, g, zeros_like(t), cfg);
        CHECK(update.b2[0] == doctest::Approx(-0.2));
        CHECK(next.b2[0] == doctest::Approx(p.b2[0] - 0.2));
    }
    SUBCASE("alpha=0.07, eta=0.8, g=1, prev=0.5 -> update 0.33") {
        const BPConfig cfg{0.07, 0.8, 100, 1e-9};
        Gradient g = zeros_like(t);
        g.w1[0] = 1.0;
        NetworkParams prev = zeros_like(t);
        prev.w1[0] = 0.5;
        auto [next, update] = momentum_step(p, g, prev, cfg);
        CHECK(update.w1[0] == doctest::Approx(0.33));
        CHECK(next.w1[0] == doctest::Approx(p.w1[0] + 0.33));
    }
    SUBCASE("shape mismatch is rejected") {
        const BPConfig cfg{0.07, 0.8, 100, 1e-9};
        CHECK_THROWS_AS(momentum_step(p, zeros_like(Topology{2, 1, 1}), zeros_like(t), cfg),
                        ValidationError);
    }
}

TEST_CASE("one small momentum step decreases the loss (descent direction)") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 20; ++round) {
        const Topology t{3, 3, 1};
        const NetworkParams params = random_params(rng, t);
        const auto samples = random_samples(rng, t, 6);
        const double before = mse_loss(t, params, samples);
        const Gradient g = backprop(t, params, samples);
        double gnorm = 0.0;
        for (double v : flatten(g)) gnorm += v * v;
        if (gnorm < 1e-16) continue; // stationary point, nothing to descend
        double alpha = 0.1;
        bool decreased = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            const BPConfig cfg{alpha, 0.0, 1, 1e-12};
            auto [next, update] = momentum_step(params, g, zeros_like(t), cfg);
            if (mse_loss(t, next, samples) < before) {
                decreased = true;
                break;
            }
            alpha *= 0.5;
        }
        CHECK(decreased);
    }
}

TEST_CASE("flatten/unflatten is a bijection with the documented layout") {
    SUBCASE("layout on the smallest topology") {
        const Topology t{1, 1, 1};
        NetworkParams p;
        p.w1 = {1.5};
        p.b1 = {-2.0};
        p.w2 = {3.25};
        p.b2 = {0.125};
        const std::vector<double> flat = flatten(p);
        CHECK(flat == std::vector<double>{1.5, -2.0, 3.25, 0.125});
        CHECK(unflatten(t, flat) == p);
    }
    SUBCASE("round-trip on random params, both orders") {
        std::mt19937_64 rng(13);
        for (int round = 0; round < 30; ++round) {
            std::uniform_int_distribution<std::size_t> len(1, 7);
            const Topology t{len(rng), len(rng), len(rng)};
            const NetworkParams p = random_params(rng, t);
            const std::vector<double> flat = flatten(p);
            REQUIRE(flat.size() == t.param_count());
            CHECK(unflatten(t, flat) == p);           // exact, bit for bit
            CHECK(flatten(unflatten(t, flat)) == flat);
        }
    }
    SUBCASE("dimension formula for (12,6,1) is 85") {
        CHECK(Topology{12, 6, 1}.param_count() == 85);
    }
    SUBCASE("length mismatch is rejected") {
        CHECK_THROWS_AS(unflatten(Topology{12, 6, 1}, std::vector<double>(84, 0.0)),
                        ValidationError);
    }
}
