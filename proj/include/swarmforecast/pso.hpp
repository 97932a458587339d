#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace swarmforecast {

/// Fitness function over flat position vectors. Must be pure and return a
/// finite value everywhere inside the search box.
struct Objective {
    std::size_t dim = 0;
    std::function<double(std::span<const double>)> fn;

    double operator()(std::span<const double> position) const { return fn(position); }
};

enum class Variant { vanilla, inertia, mpso };

enum class InertiaMode { scheduled, constant };

struct PSOConfig {
    std::size_t swarm_size = 50;
    double c1 = 2.0;
    double c2 = 2.4;
    double z_min = -5.0;
    double z_max = 5.0;
    double n_i1 = 2.0;  // velocity cap, default 0.2*(z_max - z_min)
    double n_i2 = 0.1;  // velocity floor, default 0.01*(z_max - z_min)
    double sigma = 0.8;
    double omega0 = 0.9;
    double omega_const = 0.7; // used only in InertiaMode::constant
    InertiaMode inertia_mode = InertiaMode::scheduled;
    std::size_t sub_steps = 3; // j
    std::size_t k_max = 1000;
    double target_fitness = 0.005;
    std::uint64_t seed = 1;

    /// Throws ValidationError when any invariant is violated.
    void validate() const;
};

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> base_velocity; // pre-refinement velocity of the last step
    std::vector<double> personal_best;
    double personal_best_fitness = 0.0;
};

struct Swarm {
    std::vector<Particle> particles;
    std::vector<double> global_best;
    double global_best_fitness = 0.0;
    std::size_t iteration = 0;
};

struct RunResult {
    std::vector<double> best_position;
    double best_fitness = 0.0;
    std::vector<double> trace; // global best fitness after each iteration
    std::size_t iterations_used = 0;
};

using Rng = std::mt19937_64;

/// Inertia schedule w(k) = 2*w0 / (1 + exp(sigma*k/k_max)); w(0) == w0.
/// In constant mode returns omega_const for every k.
double inertia_weight(std::size_t k, const PSOConfig& config);

/// v' = v + c1*r1*(p_i - z) + c2*r2*(p_g - z), per dimension.
std::vector<double> velocity_update_vanilla(std::span<const double> v,
                                            std::span<const double> z,
                                            std::span<const double> p_i,
                                            std::span<const double> p_g,
                                            double c1, double c2, double r1, double r2);

/// v' = w*v + c1*r1*(p_i - z) + c2*r2*(p_g - z), clamped to [-n_i1, +n_i1].
std::vector<double> velocity_update_inertia(std::span<const double> v,
                                            std::span<const double> z,
                                            std::span<const double> p_i,
                                            std::span<const double> p_g,
                                            double omega, double c1, double c2,
                                            double r1, double r2, double n_i1);

/// z' = z + v, clamped into [z_min, z_max] per dimension.
std::vector<double> position_update(std::span<const double> z, std::span<const double> v,
                                    double z_min, double z_max);

/// Speed-band coefficient for sub-step n:
///   |v| <  n_i2 -> n        (slow: stretch the step)
///   |v| >= n_i1 -> n/j      (fast: shrink the step)
///   otherwise   -> 1 + sign*n/j
double speed_coefficient(double v_base_d, std::size_t n, const PSOConfig& config, int sign);

/// Line search along the base velocity: candidates z0 + a(n)*v0 for
/// n = 1..j plus the plain z0 + v0, clamped to bounds; the particle moves to
/// the best candidate. Expects particle.position == z0 and
/// particle.base_velocity == v0. Returns the fitness at the new position.
double refine_substeps(Particle& particle, const Objective& objective,
                       const PSOConfig& config, Rng& rng, std::size_t particle_index = 0);

/// M particles with positions uniform in the box and velocities uniform in
/// [-n_i1, +n_i1]; personal bests start at the initial positions.
Swarm swarm_init(const Objective& objective, const PSOConfig& config, Rng& rng);

/// Updates one particle with explicit random draws r1, r2 (the rng is only
/// consumed by mpso sub-step signs). Moves the particle, refreshes its
/// personal best and returns the fitness at the new position.
double step_particle(Particle& particle, std::span<const double> global_best,
                     const Objective& objective, const PSOConfig& config, Variant variant,
                     double omega, double r1, double r2, Rng& rng,
                     std::size_t particle_index = 0);

/// One full sweep over the swarm. Draws r1, r2 per particle, applies the
/// variant's velocity and position updates (plus sub-step refinement for
/// mpso), and updates personal and global bests in particle-index order.
void pso_iteration(Swarm& swarm, const Objective& objective, const PSOConfig& config,
                   Variant variant, Rng& rng);

/// Iterates until global best fitness <= target_fitness or k_max iterations.
/// At least one iteration is performed; the trace holds the global best
/// fitness after each completed iteration.
RunResult run_optimizer(const Objective& objective, const PSOConfig& config,
                        Variant variant);

/// CSV with header `iteration,global_best_fitness`, shortest round-trip
/// numbers.
std::string trace_to_csv(std::span<const double> trace);

std::string variant_name(Variant variant);
Variant variant_from_name(std::string_view name);

} // namespace swarmforecast
