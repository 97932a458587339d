#include "swarmforecast/config.hpp"

#include <string>

#include "swarmforecast/errors.hpp"
#include "format_util.hpp"

namespace swarmforecast {

ForecastConfig default_config() {
    return ForecastConfig{}; // struct defaults carry the standard parameters
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double need_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    if (!detail::parse_double(value, out))
        throw ValidationError("config key '" + key + "': bad number '" + value + "'");
    return out;
}

std::size_t need_count(const std::string& key, const std::string& value) {
    unsigned long long out = 0;
    if (!detail::parse_unsigned(value, out))
        throw ValidationError("config key '" + key + "': bad count '" + value + "'");
    return static_cast<std::size_t>(out);
}

bool need_flag(const std::string& key, const std::string& value) {
    if (value == "0" || value == "false") return false;
    if (value == "1" || value == "true") return true;
    throw ValidationError("config key '" + key + "': expected 0/1, got '" + value + "'");
}

} // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line = (nl == std::string_view::npos) ? text.substr(start)
                                                               : text.substr(start, nl - start);
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) {
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ValidationError("config line " + std::to_string(line_no) +
                                      ": expected key=value");
            std::string key(trim(line.substr(0, eq)));
            std::string value(trim(line.substr(eq + 1)));
            if (key.empty() || value.empty())
                throw ValidationError("config line " + std::to_string(line_no) +
                                      ": empty key or value");
            if (!out.emplace(key, value).second)
                throw ValidationError("config line " + std::to_string(line_no) +
                                      ": duplicate key '" + key + "'");
        }
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return out;
}

void apply_key_values(const std::map<std::string, std::string>& keys, ForecastConfig& config) {
    PSOConfig& swarm = config.hybrid.swarm;
    BPConfig& bp = config.hybrid.bp;
    for (const auto& [key, value] : keys) {
        if (key == "swarm_size") swarm.swarm_size = need_count(key, value);
        else if (key == "c1") swarm.c1 = need_double(key, value);
        else if (key == "c2") swarm.c2 = need_double(key, value);
        else if (key == "sigma") swarm.sigma = need_double(key, value);
        else if (key == "omega0") swarm.omega0 = need_double(key, value);
        else if (key == "omega_const") swarm.omega_const = need_double(key, value);
        else if (key == "inertia_mode") {
            if (value == "scheduled") swarm.inertia_mode = InertiaMode::scheduled;
            else if (value == "constant") swarm.inertia_mode = InertiaMode::constant;
            else
                throw ValidationError("config key 'inertia_mode': expected scheduled|constant, "
                                      "got '" + value + "'");
        }
        else if (key == "j") swarm.sub_steps = need_count(key, value);
        else if (key == "k_max") swarm.k_max = need_count(key, value);
        else if (key == "target_fitness") swarm.target_fitness = need_double(key, value);
        else if (key == "z_min") swarm.z_min = need_double(key, value);
        else if (key == "z_max") swarm.z_max = need_double(key, value);
        else if (key == "n_i1") swarm.n_i1 = need_double(key, value);
        else if (key == "n_i2") swarm.n_i2 = need_double(key, value);
        else if (key == "seed") swarm.seed = need_count(key, value);
        else if (key == "alpha") bp.learning_rate = need_double(key, value);
        else if (key == "eta") bp.momentum = need_double(key, value);
        else if (key == "max_epochs") bp.max_epochs = need_count(key, value);
        else if (key == "bp_target_loss") bp.target_loss = need_double(key, value);
        else if (key == "bp_refine") config.hybrid.bp_refine = need_flag(key, value);
        else if (key == "window_len") config.window_len = need_count(key, value);
        else if (key == "hidden_len") config.hidden_len = need_count(key, value);
        else if (key == "init_range") config.init_range = need_double(key, value);
        else
            throw ValidationError("unknown config key '" + key + "'");
    }
    // velocity bounds default to fractions of the box when only the box moves
    const bool box_changed = keys.contains("z_min") || keys.contains("z_max");
    if (box_changed && !keys.contains("n_i1")) swarm.n_i1 = 0.2 * (swarm.z_max - swarm.z_min);
    if (box_changed && !keys.contains("n_i2")) swarm.n_i2 = 0.01 * (swarm.z_max - swarm.z_min);
}

} // namespace swarmforecast
