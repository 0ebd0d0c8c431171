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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mckean/asymptotics.hpp"
#include "mckean/config.hpp"
#include "mckean/experiments.hpp"
#include "mckean/io.hpp"
#include "mckean/particles.hpp"
#include "mckean/svg.hpp"

namespace fs = std::filesystem;
using namespace mckean;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool strict = false;
};

fs::path resolve_out_dir(const CommonOptions& opt, const RunConfig& cfg) {
    std::string dir = opt.out_dir;
    if (dir.empty()) dir = cfg.out_dir;
    if (dir.empty())
        if (const char* env = std::getenv("MCKEAN_LAB_OUT")) dir = env;
    if (dir.empty()) dir = "out";
    fs::create_directories(dir);
    return dir;
}

RunConfig load(const CommonOptions& opt) {
    RunConfig cfg = load_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    return cfg;
}

SymmetryClass expect_from_string(const std::string& s) {
    if (s == "sym") return SymmetryClass::symmetric;
    if (s == "plus") return SymmetryClass::asymmetric_plus;
    return SymmetryClass::asymmetric_minus;
}

void write_verdict_jsonl(const fs::path& path, const std::string& name, const ConvergenceVerdict& verdict) {
    nlohmann::json j;
    j["name"] = name;
    j["hypothesis_ok"] = verdict.hypothesis_ok;
    if (verdict.matched_branch)
        j["matched_branch"] = to_string(*verdict.matched_branch);
    else
        j["matched_branch"] = nullptr;
    j["final_distance"] = verdict.final_distance;
    j["fe_limit"] = verdict.fe_limit;
    j["passed"] = verdict.passed;
    if (!verdict.note.empty()) j["note"] = verdict.note;
    if (!verdict.failed_hypotheses.empty()) j["failed_hypotheses"] = verdict.failed_hypotheses;
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot open '" + path.string() + "'");
    out << j.dump() << '\n';
}

int run_validate(const CommonOptions& opt) {
    const RunConfig cfg = load(opt);
    std::printf("V: ok, degree %d (m = %d), well a = %.12g\n", cfg.V.poly.degree(), cfg.V.m, cfg.V.a);
    std::printf("V growth witness: C4 = %.6g, C2 = %.6g\n", cfg.V.growth_c4, cfg.V.growth_c2);
    std::printf("F: ok, degree %d (n = %d), F''(0) = %.12g\n", cfg.F.poly.degree(), cfg.F.n, cfg.F.fpp0);
    std::printf("LIN (linear force): %s\n", cfg.F.linear_force ? "yes" : "no");
    const double syn = cfg.V.ddV(0.0) + cfg.F.fpp0;
    std::printf("SYN (V''(0)+F''(0) > 0): %s (value %.6g)\n", syn > 0.0 ? "yes" : "no", syn);
    try {
        std::printf("x0 = %.12g\n", find_x0(cfg.V, cfg.F));
    } catch (const NoAdmissibleRoot& e) {
        std::printf("x0: %s\n", e.what());
    }
    return 0;
}

int run_stationary(const CommonOptions& opt) {
    const RunConfig cfg = load(opt);
    const double eps = cfg.require_eps();
    const Grid grid = cfg.make_grid(eps);
    const EnumerationReport rep = enumerate_stationary(cfg.V, cfg.F, eps, grid, cfg.make_enumerate());
    const fs::path dir = resolve_out_dir(opt, cfg);
    io::write_stationary_csv((dir / "stationary_report.csv").string(), rep);
    for (const StationaryMeasure& m : rep.measures)
        io::write_density_csv((dir / ("stationary_" + std::string(to_string(m.symmetry)) + ".csv")).string(),
                              m.density);
    std::printf("seed-battery count: %zu stationary measures (status %s, ordering_ok %d)\n",
                rep.measures.size(), to_string(rep.m3_status), static_cast<int>(rep.ordering_ok));
    for (const auto& note : rep.seed_notes) std::printf("note: %s\n", note.c_str());
    return 0;
}

int run_evolve(const CommonOptions& opt) {
    const RunConfig cfg = load(opt);
    const double eps = cfg.require_eps();
    const Grid grid = cfg.make_grid(eps);
    const GridDensity u0 = cfg.make_u0(grid);
    SolverConfig solver = cfg.make_solver(grid, eps, u0);
    solver.store_snapshots = true;
    const TrajectoryRecord rec = evolve(u0, solver, cfg.V, cfg.F);

    const fs::path dir = resolve_out_dir(opt, cfg);
    io::write_trajectory_csv((dir / "trajectory.csv").string(), rec);
    io::write_density_csv((dir / "final_density.csv").string(), rec.final_density);

    svg::emit_svg((dir / "free_energy.svg").string(), "free energy along the run",
                  {{"free energy", rec.times, rec.free_energy}});
    {
        std::vector<double> xs(static_cast<std::size_t>(grid.n()));
        for (int i = 0; i < grid.n(); ++i) xs[static_cast<std::size_t>(i)] = grid.x(i);
        std::vector<svg::Series> overlay{{"u0", xs, u0.values()}};
        if (rec.snapshots.size() > 2)
            overlay.push_back({"u mid", xs, rec.snapshots[rec.snapshots.size() / 2].values()});
        overlay.push_back({"u final", xs, rec.final_density.values()});
        svg::emit_svg((dir / "density_overlay.svg").string(), "density snapshots", overlay);
    }
    std::printf("evolved to t = %.6g (%s), free energy %.12g\n", rec.times.back(),
                rec.status == RunStatus::converged ? "converged" : "t_end reached", rec.free_energy.back());
    return 0;
}

int run_particles_cmd(const CommonOptions& opt) {
    const RunConfig cfg = load(opt);
    const double eps = cfg.require_eps();
    const Grid grid = cfg.make_grid(eps);
    const GridDensity u0 = cfg.make_u0(grid);

    ParticleConfig pc(cfg.particles_n, eps, cfg.particles_dt, cfg.particles_t_end);
    pc.seed = cfg.seed;
    pc.record_every = cfg.particles_record_every;
    pc.blowup_guard = cfg.blowup_guard;
    pc.kde_bandwidth = cfg.kde_bandwidth;
    const ParticleRecord rec = run_particles(pc, u0, cfg.V, cfg.F, &grid);

    const fs::path dir = resolve_out_dir(opt, cfg);
    io::write_particle_csv((dir / "particles.csv").string(), rec);
    if (!rec.kde_snapshots.empty())
        io::write_density_csv((dir / "kde_final.csv").string(), rec.kde_snapshots.back());
    if (cfg.emit_cloud) io::write_cloud_csv((dir / "cloud_final.csv").string(), rec.final_state.positions);
    std::printf("ran %d particles to t = %.6g; final m1 = %.6g, m2 = %.6g\n", cfg.particles_n, rec.times.back(),
                rec.moment_history.back()[0], rec.moment_history.back()[1]);
    return 0;
}

int run_asymptotics(const CommonOptions& opt) {
    const RunConfig cfg = load(opt);
    if (cfg.eps_list.size() < 2) throw ParseError(0, "asymptotics needs eps_list with at least two entries");
    // one grid serves the whole sweep: size it for the largest eps
    const Grid grid = cfg.make_grid(cfg.eps_list.front());
    const SweepReport rep = free_energy_sweep(cfg.V, cfg.F, cfg.eps_list, grid, cfg.make_enumerate());

    const fs::path dir = resolve_out_dir(opt, cfg);
    {
        io::CsvWriter csv((dir / "sweep.csv").string(),
                          {"eps", "fe_sym", "fe_plus", "fe_minus", "predicted_sym_limit", "predicted_asym_limit"});
        for (std::size_t k = 0; k < rep.eps_values.size(); ++k)
            csv.row({rep.eps_values[k], rep.fe_sym[k], rep.fe_plus[k], rep.fe_minus[k], rep.predicted_sym_limit,
                     rep.predicted_asym_limit});
    }
    svg::emit_svg((dir / "sweep.svg").string(), "stationary free energies vs eps",
                  {{"sym", rep.eps_values, rep.fe_sym},
                   {"plus", rep.eps_values, rep.fe_plus},
                   {"minus", rep.eps_values, rep.fe_minus}},
                  {{"sym limit", rep.predicted_sym_limit}, {"asym limit", rep.predicted_asym_limit}});
    std::printf("sweep over %zu eps values; monotone approach: sym %d, asym %d\n", rep.eps_values.size(),
                static_cast<int>(rep.sym_monotone), static_cast<int>(rep.asym_monotone));
    return 0;
}

int run_basin(const CommonOptions& opt, bool with_expectation) {
    const RunConfig cfg = load(opt);
    const double eps = cfg.require_eps();
    const Grid grid = cfg.make_grid(eps);
    const GridDensity u0 = cfg.make_u0(grid);
    const SolverConfig solver = cfg.make_solver(grid, eps, u0);
    const EnumerationReport stationary_set = enumerate_stationary(cfg.V, cfg.F, eps, grid, cfg.make_enumerate());

    ConvergenceVerdict verdict;
    if (with_expectation) {
        if (cfg.expect.empty()) throw ParseError(0, "basin needs the key: expect = sym | plus | minus");
        BasinSpec spec{u0, expect_from_string(cfg.expect), {}};
        if (spec.expected_limit == SymmetryClass::symmetric) {
            spec.hypotheses = {BasinHypothesis::symmetric_initial};
        } else {
            spec.hypotheses = {spec.expected_limit == SymmetryClass::asymmetric_plus
                                   ? BasinHypothesis::mean_positive
                                   : BasinHypothesis::mean_negative,
                               BasinHypothesis::potential_below_sym_limit};
        }
        verdict = verify_basin(spec, cfg.V, cfg.F, eps, solver, stationary_set);
    } else {
        verdict = verify_global_convergence(u0, cfg.V, cfg.F, eps, solver, stationary_set);
    }

    const fs::path dir = resolve_out_dir(opt, cfg);
    write_verdict_jsonl(dir / "verdicts.jsonl", cfg.name, verdict);
    std::printf("%s: hypothesis_ok %d, matched %s, final distance %.3g, passed %d\n", cfg.name.c_str(),
                static_cast<int>(verdict.hypothesis_ok),
                verdict.matched_branch ? to_string(*verdict.matched_branch) : "none", verdict.final_distance,
                static_cast<int>(verdict.passed));
    if (!verdict.passed) return 1;
    if (opt.strict && !verdict.hypothesis_ok) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for self-stabilizing diffusions in a double-well landscape"};
    app.require_subcommand(1);

    CommonOptions opt;
    const char* names[] = {"validate", "stationary", "evolve", "particles", "asymptotics", "basin", "converge"};
    const char* descriptions[] = {"validate the potentials and report derived quantities",
                                  "enumerate stationary measures by self-consistent fixed point",
                                  "evolve the nonlinear Fokker-Planck equation",
                                  "simulate the mean-field particle system",
                                  "free-energy sweep over a decreasing eps list",
                                  "basin-of-attraction experiment with an expected limit",
                                  "global convergence experiment without an expectation"};
    for (int i = 0; i < 7; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
        sub->add_option("--config", opt.config_path, "path to the run config")->required();
        sub->add_option("--out", opt.out_dir, "output directory (overrides config and MCKEAN_LAB_OUT)");
        sub->add_option("--seed", opt.seed, "seed override");
        sub->add_flag("--strict", opt.strict, "fail (exit 1) on out-of-hypothesis runs");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        if (sub == "validate") return run_validate(opt);
        if (sub == "stationary") return run_stationary(opt);
        if (sub == "evolve") return run_evolve(opt);
        if (sub == "particles") return run_particles_cmd(opt);
        if (sub == "asymptotics") return run_asymptotics(opt);
        if (sub == "basin") return run_basin(opt, true);
        if (sub == "converge") return run_basin(opt, false);
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
