#include "hsfem/assembly.hpp"
#include "hsfem/config.hpp"
#include "hsfem/errors.hpp"
#include "hsfem/harness.hpp"
#include "hsfem/io.hpp"
#include "hsfem/simulation.hpp"
#include "hsfem/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace hsfem;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kSolver = 3, kInvariant = 4 };

std::vector<double> parse_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw ConfigError(what + ": not a number: '" + item + "'");
        }
    }
    if (out.empty()) {
        throw ConfigError(what + ": empty list");
    }
    return out;
}

std::string extension(FieldFormat f) { return f == FieldFormat::Vtk ? ".vtk" : ".csv"; }

std::string step_name(std::size_t step)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "state_%08zu", step);
    return buf;
}

void dump(const SimState& s, const RunConfig& c, const fs::path& dir, const std::string& stem)
{
    for (FieldFormat f : c.formats) {
        write_field(s, dir / (stem + extension(f)), f);
    }
}

void print_summary(const RunSummary& s, const RunConfig& c)
{
    std::printf("steps %zu  t %.6g  scheme %s  mesh %dx%d\n", s.steps, s.t, to_string(c.scheme), c.nx, c.ny);
    std::printf("density range [%.6g, %.15g]  N_max %.15g\n", s.min_value, s.max_value,
                n_max(c.model.k, c.model.p_max));
    std::printf("H4 residual min %.3e (%s)  clamped nodes %zu  snaps %zu  CG iterations %zu\n", s.h4_min,
                s.h4_holds ? "holds" : "fails", s.clamped_nodes, s.snaps, s.solver_iterations);
    std::printf("violations: range %zu  pressure %zu  monotonicity %zu  mass balance %zu (max ratio %.3e)  energy %zu\n",
                s.dmp_violations, s.pressure_violations, s.monotonicity_violations, s.mass_balance_violations,
                s.max_mass_balance_ratio, s.energy_flags);
    for (const std::string& m : s.messages) {
        std::printf("  %s\n", m.c_str());
    }
}

int cmd_run(const std::string& config_path, const std::string& out_override, bool strict)
{
    RunConfig c = parse_config(config_path);
    if (!out_override.empty()) {
        c.out_dir = out_override;
    }
    const fs::path dir = c.out_dir;
    write_file_atomic(dir / "run.cfg", to_config_text(c));

    std::set<std::size_t> dump_steps;
    for (double t : c.output_times) {
        dump_steps.insert(steps_to(t, c.model.tau));
    }

    Simulation sim(c);
    if (!c.formats.empty()) {
        write_mesh_vtk(*sim.mesh(), dir / "mesh.vtk");
    }
    auto observe = [&](const SimState& s) {
        if (s.step % c.output_every == 0 || dump_steps.contains(s.step) || sim.finished()) {
            dump(s, c, dir, step_name(s.step));
        }
    };
    try {
        sim.run(observe);
    } catch (const SolverError& e) {
        // Keep the last state that was solved successfully.
        write_series(sim.series(), dir / "series.csv");
        dump(sim.state(), c, dir, "last_good");
        std::fprintf(stderr, "solver failure at step %zu: %s (iterations %zu, residual %.3e)\n",
                     sim.state().step + 1, e.what(), e.report().iterations, e.report().final_relative_residual);
        return kSolver;
    } catch (const Error&) {
        write_series(sim.series(), dir / "series.csv");
        dump(sim.state(), c, dir, "last_good");
        throw;
    }
    write_series(sim.series(), dir / "series.csv");
    print_summary(sim.summary(), c);
    if (strict && !sim.summary().ok()) {
        std::fprintf(stderr, "invariant violation (strict mode)\n");
        return kInvariant;
    }
    return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& param, const std::string& values,
              const std::string& out_override, const std::string& nx_schedule, const std::string& tau_schedule,
              double eval_time, const std::string& times, bool strict)
{
    SweepSpec s;
    s.base = parse_config(config_path);
    s.param = param;
    s.values = parse_list(values, "--values");
    s.out_dir = out_override.empty() ? s.base.out_dir : out_override;
    if (!nx_schedule.empty()) {
        for (double v : parse_list(nx_schedule, "--nx-schedule")) {
            if (v != std::floor(v) || v < 1) {
                throw ConfigError("--nx-schedule: cell counts must be positive integers");
            }
            s.nx_schedule.push_back(static_cast<int>(v));
        }
    }
    if (!tau_schedule.empty()) {
        s.tau_schedule = parse_list(tau_schedule, "--tau-schedule");
    }
    s.eval_time = eval_time;
    if (!times.empty()) {
        s.output_times = parse_list(times, "--times");
    }
    s.validate();

    std::vector<RunSummary> summaries;
    if (param == "k") {
        const std::vector<KSweepRow> rows = k_sweep(s);
        std::printf("%8s %10s %14s %12s %12s %12s\n", "k", "h", "complement.", "grad_p", "max_dn", "max_dp");
        for (const KSweepRow& r : rows) {
            std::printf("%8d %10.4g %14.6g %12.6g %12.4g %12.4g\n", r.k, r.h, r.complementarity, r.grad_p, r.max_dn,
                        r.max_dp);
            summaries.push_back(r.summary);
        }
    } else {
        const ParamStudyResult r = param_study(s);
        std::printf("%10s %8s %14s %12s\n", param.c_str(), "t", "front_radius", "max_n");
        for (const FrontSample& f : r.samples) {
            std::printf("%10.4g %8.4g %14.6g %12.8g\n", f.value, f.t, f.front_radius, f.max_n);
        }
        summaries = r.summaries;
    }
    const bool ok = std::all_of(summaries.begin(), summaries.end(), [](const RunSummary& r) { return r.ok(); });
    if (!ok) {
        std::fprintf(stderr, "some members reported invariant violations\n");
    }
    return strict && !ok ? kInvariant : kOk;
}

int cmd_check_mesh(const std::string& config_path, const std::string& matrix_out)
{
    const RunConfig c = parse_config(config_path);
    Simulation sim(c);
    const Mesh& mesh = *sim.mesh();
    const AngleReport angles = classify_angles(mesh);
    std::printf("mesh %dx%d on [%g, %g] x [%g, %g]: %zu nodes, %zu triangles, h = %.6g\n", c.nx, c.ny, c.box.x0,
                c.box.x1, c.box.y0, c.box.y1, mesh.num_nodes(), mesh.num_elements(), mesh.diameter());
    std::printf("right-angled: %s  nonobtuse: %s  axis-aligned legs: %s  max angle %.6f deg\n",
                angles.all_right_angled ? "yes" : "no", angles.all_nonobtuse ? "yes" : "no",
                has_axis_right_angles(mesh) ? "yes" : "no", angles.max_angle * 180.0 / 3.14159265358979323846);

    const SparseOperator A = diffusion_operator(sim.assembler(), c.scheme, sim.state().n.values(), c.model,
                                                c.quadrature);
    const SparseOperator S = system_matrix(sim.mass(), c.model.tau, A, c.model.nu, sim.stiffness());
    const OffDiagReport ks = offdiag_sign_check(sim.stiffness());
    const OffDiagReport as = offdiag_sign_check(A);
    const OffDiagReport ss = offdiag_sign_check(S);
    const double min_m = *std::min_element(sim.mass().diag.begin(), sim.mass().diag.end());
    const double margin = diagonal_dominance_margin(S);
    std::printf("max off-diagonal: stiffness %.3e  diffusion (%s, initial datum) %.3e  system %.3e\n",
                ks.max_offdiag, to_string(c.scheme), as.max_offdiag, ss.max_offdiag);
    std::printf("system dominance margin %.6g (min mass / tau = %.6g)\n", margin, min_m / c.model.tau);
    if (!matrix_out.empty()) {
        write_matrix_coo(S, matrix_out);
    }
    const bool certified = ss.violations.empty() && margin >= min_m / c.model.tau - 1e-12;
    std::printf("M-matrix certificate: %s\n", certified ? "passed" : "failed");
    for (std::size_t i = 0; i < std::min<std::size_t>(ss.violations.size(), 10); ++i) {
        const OffDiagEntry& e = ss.violations[i];
        std::printf("  positive entry (%zu, %zu) = %.3e\n", e.row, e.col, e.value);
    }
    return certified ? kOk : kInvariant;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite element solver for a pressure-driven tumour growth model"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool strict = false;

    CLI::App* run = app.add_subcommand("run", "Run one simulation");
    run->add_option("--config", config_path, "key = value config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides out_dir)");
    run->add_flag("--strict", strict, "exit with status 4 when a monitored invariant is violated");

    std::string param, values, nx_schedule, tau_schedule, times;
    double eval_time = 0.1;
    CLI::App* sweep = app.add_subcommand("sweep", "Run a family of simulations varying one parameter");
    sweep->add_option("--config", config_path, "base config file")->required();
    sweep->add_option("--param", param, "alpha, nu, k or P_max")->required();
    sweep->add_option("--values", values, "comma separated values")->required();
    sweep->add_option("--out", out_dir, "output directory (overrides out_dir)");
    sweep->add_option("--nx-schedule", nx_schedule, "per-value cell counts, comma separated");
    sweep->add_option("--tau-schedule", tau_schedule, "per-value time steps, comma separated");
    sweep->add_option("--eval-time", eval_time, "k sweeps: evaluation time")->capture_default_str();
    sweep->add_option("--times", times, "other sweeps: output times (default 0.1,0.2,0.3,0.4)");
    sweep->add_flag("--strict", strict, "exit with status 4 when a member reports a violation");

    std::string matrix_out;
    CLI::App* check = app.add_subcommand("check-mesh", "Classify angles and certify the system matrix");
    check->add_option("--config", config_path, "config file")->required();
    check->add_option("--matrix-out", matrix_out, "write the system matrix in coordinate form");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run) {
            return cmd_run(config_path, out_dir, strict);
        }
        if (*sweep) {
            return cmd_sweep(config_path, param, values, out_dir, nx_schedule, tau_schedule, eval_time, times, strict);
        }
        return cmd_check_mesh(config_path, matrix_out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kConfig;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
}
