#include "swarmforecast/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "swarmforecast/errors.hpp"
#include "format_util.hpp"

namespace swarmforecast {

void PSOConfig::validate() const {
    if (swarm_size < 2) throw ValidationError("swarm_size must be >= 2");
    if (c1 < 0.0 || c2 < 0.0) throw ValidationError("c1 and c2 must be >= 0");
    if (!(z_min < z_max)) throw ValidationError("position bounds require z_min < z_max");
    if (!(0.0 < n_i2 && n_i2 < n_i1))
        throw ValidationError("velocity bounds require 0 < n_i2 < n_i1");
    if (sub_steps < 1) throw ValidationError("sub_steps (j) must be >= 1");
    if (k_max < 1) throw ValidationError("k_max must be >= 1");
    if (inertia_mode == InertiaMode::scheduled && !(sigma > 0.0))
        throw ValidationError("sigma must be > 0");
    if (!(omega0 > 0.0)) throw ValidationError("omega0 must be > 0");
    if (!(target_fitness >= 0.0)) throw ValidationError("target_fitness must be >= 0");
}

double inertia_weight(std::size_t k, const PSOConfig& config) {
    if (config.inertia_mode == InertiaMode::constant) return config.omega_const;
    const double ratio = static_cast<double>(k) / static_cast<double>(config.k_max);
    return 2.0 * config.omega0 / (1.0 + std::exp(config.sigma * ratio));
}

namespace {

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) throw ValidationError("vector length mismatch in swarm update");
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double checked_fitness(const Objective& objective, std::span<const double> position,
                       std::size_t particle_index, long sub_step) {
    const double f = objective(position);
    if (!std::isfinite(f)) {
        std::string msg = "objective returned non-finite fitness for particle " +
                          std::to_string(particle_index);
        if (sub_step >= 0) msg += ", sub-step " + std::to_string(sub_step);
        throw NumericError(msg);
    }
    return f;
}

} // namespace

std::vector<double> velocity_update_vanilla(std::span<const double> v, std::span<const double> z,
                                            std::span<const double> p_i,
                                            std::span<const double> p_g, double c1, double c2,
                                            double r1, double r2) {
    check_lengths(v.size(), z.size());
    check_lengths(v.size(), p_i.size());
    check_lengths(v.size(), p_g.size());
    std::vector<double> out(v.size());
    for (std::size_t d = 0; d < v.size(); ++d)
        out[d] = v[d] + c1 * r1 * (p_i[d] - z[d]) + c2 * r2 * (p_g[d] - z[d]);
    return out;
}

std::vector<double> velocity_update_inertia(std::span<const double> v, std::span<const double> z,
                                            std::span<const double> p_i,
                                            std::span<const double> p_g, double omega, double c1,
                                            double c2, double r1, double r2, double n_i1) {
    check_lengths(v.size(), z.size());
    check_lengths(v.size(), p_i.size());
    check_lengths(v.size(), p_g.size());
    std::vector<double> out(v.size());
    for (std::size_t d = 0; d < v.size(); ++d) {
        const double raw = omega * v[d] + c1 * r1 * (p_i[d] - z[d]) + c2 * r2 * (p_g[d] - z[d]);
        out[d] = clamp(raw, -n_i1, n_i1);
    }
    return out;
}

std::vector<double> position_update(std::span<const double> z, std::span<const double> v,
                                    double z_min, double z_max) {
    check_lengths(z.size(), v.size());
    std::vector<double> out(z.size());
    for (std::size_t d = 0; d < z.size(); ++d) out[d] = clamp(z[d] + v[d], z_min, z_max);
    return out;
}

double speed_coefficient(double v_base_d, std::size_t n, const PSOConfig& config, int sign) {
    const double speed = std::abs(v_base_d);
    const double nd = static_cast<double>(n);
    const double jd = static_cast<double>(config.sub_steps);
    if (speed < config.n_i2) return nd;
    if (speed >= config.n_i1) return nd / jd;
    return 1.0 + static_cast<double>(sign) * (nd / jd);
}

double refine_substeps(Particle& particle, const Objective& objective, const PSOConfig& config,
                       Rng& rng, std::size_t particle_index) {
    const std::vector<double> z0 = particle.position;
    const std::vector<double>& v0 = particle.base_velocity;
    check_lengths(z0.size(), v0.size());

    // the plain update z0 + v0 is always in the candidate set
    std::vector<double> best_pos = position_update(z0, v0, config.z_min, config.z_max);
    double best_fit = checked_fitness(objective, best_pos, particle_index, -1);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> candidate(z0.size());
    for (std::size_t n = 1; n <= config.sub_steps; ++n) {
        const int sign = unit(rng) < 0.5 ? 1 : -1; // one draw per sub-step
        for (std::size_t d = 0; d < z0.size(); ++d) {
            const double a = speed_coefficient(v0[d], n, config, sign);
            candidate[d] = clamp(z0[d] + a * v0[d], config.z_min, config.z_max);
        }
        const double fit =
            checked_fitness(objective, candidate, particle_index, static_cast<long>(n));
        if (fit < best_fit) {
            best_fit = fit;
            best_pos = candidate;
        }
    }
    particle.position = std::move(best_pos);
    if (best_fit < particle.personal_best_fitness) {
        particle.personal_best = particle.position;
        particle.personal_best_fitness = best_fit;
    }
    return best_fit;
}

Swarm swarm_init(const Objective& objective, const PSOConfig& config, Rng& rng) {
    config.validate();
    std::uniform_real_distribution<double> pos_dist(config.z_min, config.z_max);
    std::uniform_real_distribution<double> vel_dist(-config.n_i1, config.n_i1);
    Swarm swarm;
    swarm.particles.resize(config.swarm_size);
    swarm.global_best_fitness = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < config.swarm_size; ++i) {
        Particle& p = swarm.particles[i];
        p.position.resize(objective.dim);
        p.velocity.resize(objective.dim);
        for (double& x : p.position) x = pos_dist(rng);
        for (double& x : p.velocity) x = vel_dist(rng);
        p.base_velocity = p.velocity;
        p.personal_best = p.position;
        p.personal_best_fitness = checked_fitness(objective, p.position, i, -1);
        if (p.personal_best_fitness < swarm.global_best_fitness) {
            swarm.global_best_fitness = p.personal_best_fitness;
            swarm.global_best = p.personal_best;
        }
    }
    return swarm;
}

double step_particle(Particle& particle, std::span<const double> global_best,
                     const Objective& objective, const PSOConfig& config, Variant variant,
                     double omega, double r1, double r2, Rng& rng, std::size_t particle_index) {
    std::vector<double> velocity;
    if (variant == Variant::vanilla) {
        velocity = velocity_update_vanilla(particle.velocity, particle.position,
                                           particle.personal_best, global_best, config.c1,
                                           config.c2, r1, r2);
        for (double& v : velocity) v = clamp(v, -config.n_i1, config.n_i1);
    } else {
        velocity = velocity_update_inertia(particle.velocity, particle.position,
                                           particle.personal_best, global_best, omega, config.c1,
                                           config.c2, r1, r2, config.n_i1);
    }
    particle.velocity = velocity;
    particle.base_velocity = std::move(velocity);

    if (variant == Variant::mpso) {
        // position still holds z0; refinement moves it and refreshes the best
        return refine_substeps(particle, objective, config, rng, particle_index);
    }
    particle.position =
        position_update(particle.position, particle.velocity, config.z_min, config.z_max);
    const double fitness = checked_fitness(objective, particle.position, particle_index, -1);
    if (fitness < particle.personal_best_fitness) {
        particle.personal_best = particle.position;
        particle.personal_best_fitness = fitness;
    }
    return fitness;
}

void pso_iteration(Swarm& swarm, const Objective& objective, const PSOConfig& config,
                   Variant variant, Rng& rng) {
    const std::size_t k = swarm.iteration + 1; // 1-based index of this iteration
    const double omega = inertia_weight(k, config);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
        Particle& p = swarm.particles[i];
        const double r1 = unit(rng);
        const double r2 = unit(rng);
        step_particle(p, swarm.global_best, objective, config, variant, omega, r1, r2, rng, i);
        if (p.personal_best_fitness < swarm.global_best_fitness) {
            swarm.global_best_fitness = p.personal_best_fitness;
            swarm.global_best = p.personal_best;
        }
    }
    swarm.iteration = k;
}

RunResult run_optimizer(const Objective& objective, const PSOConfig& config, Variant variant) {
    config.validate();
    if (objective.dim == 0 || !objective.fn) throw ValidationError("objective is empty");
    Rng rng(config.seed);
    Swarm swarm = swarm_init(objective, config, rng);
    RunResult result;
    do {
        pso_iteration(swarm, objective, config, variant, rng);
        result.trace.push_back(swarm.global_best_fitness);
    } while (swarm.global_best_fitness > config.target_fitness && swarm.iteration < config.k_max);
    result.best_position = swarm.global_best;
    result.best_fitness = swarm.global_best_fitness;
    result.iterations_used = swarm.iteration;
    return result;
}

std::string trace_to_csv(std::span<const double> trace) {
    std::string out = "iteration,global_best_fitness\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += detail::format_double(trace[i]);
        out += '\n';
    }
    return out;
}

std::string variant_name(Variant variant) {
    switch (variant) {
        case Variant::vanilla: return "vanilla";
        case Variant::inertia: return "inertia";
        case Variant::mpso: return "mpso";
    }
    return "unknown";
}

Variant variant_from_name(std::string_view name) {
    if (name == "vanilla") return Variant::vanilla;
    if (name == "inertia") return Variant::inertia;
    if (name == "mpso") return Variant::mpso;
    throw ValidationError("unknown swarm variant '" + std::string(name) + "'");
}

} // namespace swarmforecast
