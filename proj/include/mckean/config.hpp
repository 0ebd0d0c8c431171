/*
   Copyright 2026 The mckean-lab authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mckean/measures.hpp"
#include "mckean/pde.hpp"
#include "mckean/potentials.hpp"
#include "mckean/stationary.hpp"

namespace mckean {

struct ParseError : std::runtime_error {
    ParseError(int line_, const std::string& message_)
        : std::runtime_error("parse error (line " + std::to_string(line_) + "): " + message_),
          line(line_),
          message(message_) {}
    int line;
    std::string message;
};

struct ValidationError : std::runtime_error {
    ValidationError(const std::string& field_, const std::string& message_)
        : std::runtime_error("invalid " + field_ + ": " + message_), field(field_), message(message_) {}
    std::string field;
    std::string message;
};

/// One fully validated run description: flat `key = value` text with typed
/// arrays, no sections, unknown keys rejected. The config file is the
/// complete record of a run apart from --out/--seed overrides.
struct RunConfig {
    ConfiningPotential V;
    InteractionPotential F;

    std::optional<double> eps;
    std::vector<double> eps_list;

    int grid_n = 801;
    double grid_half_width = 0.0;  // 0 -> truncation rule

    Scheme scheme = Scheme::semi_implicit;
    double dt = 0.0;  // 0 -> CFL rule
    double t_end = 10.0;
    int record_every = 20;

    std::uint64_t seed = 0;

    std::string u0_kind = "gaussian";  // gaussian | mixture | uniform
    double u0_mean = 0.5;
    double u0_std = 0.2;
    std::vector<double> u0_means, u0_stds, u0_weights;
    double u0_lo = -0.5, u0_hi = 0.5;

    int particles_n = 10000;
    double particles_dt = 1e-3;
    double particles_t_end = 5.0;
    int particles_record_every = 50;
    double kde_bandwidth = 0.0;
    double blowup_guard = 1e6;
    bool emit_cloud = false;

    double fp_damping = 0.5;
    double fp_tol = 1e-12;
    int fp_max_iter = 2000;
    double fp_seed_std = 0.2;
    double dedup_tol = 1e-6;
    double eta_tol = 1e-7;
    double energy_cap = std::numeric_limits<double>::infinity();
    std::vector<double> extra_seeds;

    std::string expect;  // sym | plus | minus (basin)
    std::string name = "run";
    std::string out_dir;

    double require_eps() const {
        if (!eps) throw ParseError(0, "missing required key: eps");
        return *eps;
    }

    Grid make_grid(double eps_value) const {
        const double hw = grid_half_width > 0.0 ? grid_half_width : choose_half_width(V, eps_value);
        return Grid(hw, grid_n);
    }

    GridDensity make_u0(const Grid& grid) const {
        if (u0_kind == "gaussian") return gaussian_density(grid, u0_mean, u0_std);
        if (u0_kind == "uniform") return uniform_density(grid, u0_lo, u0_hi);
        if (u0_kind == "mixture") {
            std::vector<double> w = u0_weights;
            if (w.empty()) w.assign(u0_means.size(), 1.0);
            return mixture_density(grid, u0_means, u0_stds, w);
        }
        throw ValidationError("u0", "unknown initial density kind '" + u0_kind + "'");
    }

    SolverConfig make_solver(const Grid& grid, double eps_value, const GridDensity& u0) const {
        const double step = dt > 0.0 ? dt : cfl_dt(grid, eps_value, max_drift(u0, V, F));
        SolverConfig cfg(eps_value, step, t_end, scheme, record_every);
        cfg.eta_tol = eta_tol;
        cfg.moment_count = default_moment_count(V, F);
        return cfg;
    }

    EnumerateConfig make_enumerate() const {
        EnumerateConfig cfg;
        cfg.fp.damping = fp_damping;
        cfg.fp.tol = fp_tol;
        cfg.fp.max_iter = fp_max_iter;
        cfg.fp.eta_tol = eta_tol;
        cfg.seed_std = fp_seed_std;
        cfg.dedup_tol = dedup_tol;
        cfg.energy_cap = energy_cap;
        cfg.extra_seed_means = extra_seeds;
        return cfg;
    }
};

namespace config_detail {

inline std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& tok, int line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(line, "expected a number, got '" + tok + "'");
    }
    if (used != tok.size()) throw ParseError(line, "trailing characters after number in '" + tok + "'");
    return v;
}

inline std::vector<double> parse_array(const std::string& tok, int line) {
    if (tok.size() < 2 || tok.front() != '[' || tok.back() != ']')
        throw ParseError(line, "expected an array like [1, 2, 3], got '" + tok + "'");
    std::vector<double> out;
    std::string inner = tok.substr(1, tok.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = strip(item);
        if (item.empty()) throw ParseError(line, "empty array element");
        out.push_back(parse_number(item, line));
    }
    return out;
}

inline int parse_int(const std::string& tok, int line) {
    const double v = parse_number(tok, line);
    const int k = static_cast<int>(v);
    if (static_cast<double>(k) != v) throw ParseError(line, "expected an integer, got '" + tok + "'");
    return k;
}

inline bool parse_bool(const std::string& tok, int line) {
    if (tok == "true") return true;
    if (tok == "false") return false;
    throw ParseError(line, "expected true/false, got '" + tok + "'");
}

}  // namespace config_detail

/// Parses and fully validates a config. Unknown keys, malformed values and
/// duplicate keys are ParseErrors with the offending line; potentials that
/// violate the standing assumptions are ValidationErrors naming the
/// assumption.
inline RunConfig parse_config(const std::string& text) {
    using namespace config_detail;
    std::map<std::string, std::pair<std::string, int>> kv;
    {
        std::stringstream ss(text);
        std::string raw;
        int lineno = 0;
        while (std::getline(ss, raw)) {
            ++lineno;
            const std::size_t hash = raw.find('#');
            if (hash != std::string::npos) raw = raw.substr(0, hash);
            const std::string line = strip(raw);
            if (line.empty()) continue;
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
            const std::string key = strip(line.substr(0, eq));
            const std::string value = strip(line.substr(eq + 1));
            if (key.empty()) throw ParseError(lineno, "empty key");
            if (value.empty()) throw ParseError(lineno, "empty value for key '" + key + "'");
            if (kv.count(key)) throw ParseError(lineno, "duplicate key '" + key + "'");
            kv[key] = {value, lineno};
        }
    }

    auto take = [&](const char* key) -> std::optional<std::pair<std::string, int>> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        auto out = it->second;
        kv.erase(it);
        return out;
    };

    RunConfig cfg;

    const auto vspec = take("V");
    if (!vspec) throw ParseError(0, "missing required key: V");
    {
        auto result = validate_confining(parse_array(vspec->first, vspec->second));
        if (std::holds_alternative<PotentialRejection>(result)) {
            const auto& rej = std::get<PotentialRejection>(result);
            throw ValidationError("V", rej.assumption + " " + to_string(rej.violation) + ": " + rej.detail);
        }
        cfg.V = std::get<ConfiningPotential>(result);
    }
    const auto fspec = take("F");
    if (!fspec) throw ParseError(0, "missing required key: F");
    {
        auto result = validate_interaction(parse_array(fspec->first, fspec->second));
        if (std::holds_alternative<PotentialRejection>(result)) {
            const auto& rej = std::get<PotentialRejection>(result);
            throw ValidationError("F", rej.assumption + " " + to_string(rej.violation) + ": " + rej.detail);
        }
        cfg.F = std::get<InteractionPotential>(result);
    }

    if (auto t = take("eps")) {
        cfg.eps = parse_number(t->first, t->second);
        if (!(*cfg.eps > 0.0)) throw ValidationError("eps", "must be positive");
    }
    if (auto t = take("eps_list")) {
        cfg.eps_list = parse_array(t->first, t->second);
        for (double e : cfg.eps_list)
            if (!(e > 0.0)) throw ValidationError("eps_list", "entries must be positive");
    }
    if (auto t = take("grid_n")) {
        cfg.grid_n = parse_int(t->first, t->second);
        if (cfg.grid_n < 16) throw ValidationError("grid_n", "need at least 16 nodes");
    }
    if (auto t = take("grid_half_width")) {
        cfg.grid_half_width = parse_number(t->first, t->second);
        if (cfg.grid_half_width < 0.0) throw ValidationError("grid_half_width", "must be nonnegative");
    }
    if (auto t = take("scheme")) {
        if (t->first == "semi_implicit")
            cfg.scheme = Scheme::semi_implicit;
        else if (t->first == "explicit_upwind")
            cfg.scheme = Scheme::explicit_upwind;
        else
            throw ValidationError("scheme", "expected semi_implicit or explicit_upwind");
    }
    if (auto t = take("dt")) {
        cfg.dt = parse_number(t->first, t->second);
        if (cfg.dt < 0.0) throw ValidationError("dt", "must be nonnegative (0 selects the CFL rule)");
    }
    if (auto t = take("t_end")) {
        cfg.t_end = parse_number(t->first, t->second);
        if (!(cfg.t_end >= 0.0)) throw ValidationError("t_end", "must be nonnegative");
    }
    if (auto t = take("record_every")) {
        cfg.record_every = parse_int(t->first, t->second);
        if (cfg.record_every < 1) throw ValidationError("record_every", "must be >= 1");
    }
    if (auto t = take("seed")) {
        const double v = parse_number(t->first, t->second);
        if (v < 0.0 || static_cast<double>(static_cast<std::uint64_t>(v)) != v)
            throw ValidationError("seed", "must be a nonnegative integer");
        cfg.seed = static_cast<std::uint64_t>(v);
    }

    if (auto t = take("u0")) cfg.u0_kind = t->first;
    if (auto t = take("u0_mean")) cfg.u0_mean = parse_number(t->first, t->second);
    if (auto t = take("u0_std")) {
        cfg.u0_std = parse_number(t->first, t->second);
        if (!(cfg.u0_std > 0.0)) throw ValidationError("u0_std", "must be positive");
    }
    if (auto t = take("u0_means")) cfg.u0_means = parse_array(t->first, t->second);
    if (auto t = take("u0_stds")) cfg.u0_stds = parse_array(t->first, t->second);
    if (auto t = take("u0_weights")) cfg.u0_weights = parse_array(t->first, t->second);
    if (auto t = take("u0_lo")) cfg.u0_lo = parse_number(t->first, t->second);
    if (auto t = take("u0_hi")) cfg.u0_hi = parse_number(t->first, t->second);

    if (auto t = take("particles_n")) {
        cfg.particles_n = parse_int(t->first, t->second);
        if (cfg.particles_n < 2) throw ValidationError("particles_n", "need at least 2 particles");
    }
    if (auto t = take("particles_dt")) {
        cfg.particles_dt = parse_number(t->first, t->second);
        if (!(cfg.particles_dt > 0.0)) throw ValidationError("particles_dt", "must be positive");
    }
    if (auto t = take("particles_t_end")) {
        cfg.particles_t_end = parse_number(t->first, t->second);
        if (!(cfg.particles_t_end >= 0.0)) throw ValidationError("particles_t_end", "must be nonnegative");
    }
    if (auto t = take("particles_record_every")) {
        cfg.particles_record_every = parse_int(t->first, t->second);
        if (cfg.particles_record_every < 1) throw ValidationError("particles_record_every", "must be >= 1");
    }
    if (auto t = take("kde_bandwidth")) cfg.kde_bandwidth = parse_number(t->first, t->second);
    if (auto t = take("blowup_guard")) {
        cfg.blowup_guard = parse_number(t->first, t->second);
        if (!(cfg.blowup_guard > 0.0)) throw ValidationError("blowup_guard", "must be positive");
    }
    if (auto t = take("emit_cloud")) cfg.emit_cloud = parse_bool(t->first, t->second);

    if (auto t = take("fp_damping")) {
        cfg.fp_damping = parse_number(t->first, t->second);
        if (!(cfg.fp_damping > 0.0 && cfg.fp_damping <= 1.0))
            throw ValidationError("fp_damping", "must lie in (0, 1]");
    }
    if (auto t = take("fp_tol")) cfg.fp_tol = parse_number(t->first, t->second);
    if (auto t = take("fp_max_iter")) cfg.fp_max_iter = parse_int(t->first, t->second);
    if (auto t = take("fp_seed_std")) cfg.fp_seed_std = parse_number(t->first, t->second);
    if (auto t = take("dedup_tol")) cfg.dedup_tol = parse_number(t->first, t->second);
    if (auto t = take("eta_tol")) cfg.eta_tol = parse_number(t->first, t->second);
    if (auto t = take("energy_cap")) cfg.energy_cap = parse_number(t->first, t->second);
    if (auto t = take("extra_seeds")) cfg.extra_seeds = parse_array(t->first, t->second);

    if (auto t = take("expect")) {
        if (t->first != "sym" && t->first != "plus" && t->first != "minus")
            throw ValidationError("expect", "expected sym, plus or minus");
        cfg.expect = t->first;
    }
    if (auto t = take("name")) cfg.name = t->first;
    if (auto t = take("out_dir")) cfg.out_dir = t->first;

    if (!kv.empty()) {
        const auto& [key, entry] = *kv.begin();
        throw ParseError(entry.second, "unknown key '" + key + "'");
    }
    if (cfg.u0_kind == "mixture") {
        if (cfg.u0_means.empty() || cfg.u0_means.size() != cfg.u0_stds.size())
            throw ValidationError("u0_means", "mixture needs matching u0_means and u0_stds");
        if (!cfg.u0_weights.empty() && cfg.u0_weights.size() != cfg.u0_means.size())
            throw ValidationError("u0_weights", "must match u0_means in length");
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace mckean
