#include "hsfem/harness.hpp"

#include "hsfem/errors.hpp"
#include "hsfem/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

namespace hsfem {

namespace fs = std::filesystem;

void SweepSpec::validate() const
{
    static const std::set<std::string> known{"alpha", "nu", "k", "P_max"};
    if (!known.contains(param)) {
        throw ConfigError("sweep: unknown parameter '" + param + "' (expected alpha, nu, k or P_max)");
    }
    if (values.empty()) {
        throw ConfigError("sweep: empty value list");
    }
    if (param == "k") {
        for (double v : values) {
            if (v != std::floor(v) || v < 2.0) {
                throw ConfigError("sweep: k values must be integers >= 2");
            }
        }
        if (!std::is_sorted(values.begin(), values.end())) {
            throw ConfigError("sweep: k values must be ascending");
        }
    }
    if (!nx_schedule.empty() && nx_schedule.size() != values.size()) {
        throw ConfigError("sweep: nx schedule length differs from the value list");
    }
    if (!tau_schedule.empty() && tau_schedule.size() != values.size()) {
        throw ConfigError("sweep: tau schedule length differs from the value list");
    }
    if (!(eval_time >= 0.0)) {
        throw ConfigError("sweep: evaluation time must be nonnegative");
    }
}

RunConfig member_config(const SweepSpec& spec, std::size_t i)
{
    RunConfig c = spec.base;
    const double v = spec.values.at(i);
    if (spec.param == "k") {
        c.model.k = static_cast<int>(v);
    } else if (spec.param == "alpha") {
        c.model.alpha = v;
    } else if (spec.param == "nu") {
        c.model.nu = v;
    } else if (spec.param == "P_max") {
        c.model.p_max = v;
    } else {
        throw ConfigError("sweep: unknown parameter '" + spec.param + "'");
    }
    if (!spec.nx_schedule.empty()) {
        c.nx = c.ny = spec.nx_schedule[i];
    }
    if (!spec.tau_schedule.empty()) {
        c.model.tau = spec.tau_schedule[i];
    }
    c.validate();
    return c;
}

std::string member_dir_name(const std::string& param, double value)
{
    return param + "_" + format_double(value);
}

double front_threshold(const ModelParams& params) { return 0.5 * n_max(params.k, params.p_max); }

double front_radius(const Field& n, double threshold)
{
    const Mesh& mesh = *n.mesh();
    const BBox& b = mesh.bbox();
    if (b.y0 > 0.0 || b.y1 < 0.0 || b.x1 < 0.0) {
        return 0.0;
    }
    std::vector<double> xs;
    const double start = std::max(0.0, b.x0);
    if (mesh.structured()) {
        for (const Point& p : mesh.nodes()) {
            if (p.y == mesh.node(0).y && p.x >= start) {
                xs.push_back(p.x);
            }
        }
        xs.insert(xs.begin(), start);
    } else {
        constexpr int samples = 1000;
        for (int i = 0; i <= samples; ++i) {
            xs.push_back(start + (b.x1 - start) * i / samples);
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> vals(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        vals[i] = evaluate_p1(mesh, n.values(), Point{xs[i], 0.0}).value_or(0.0);
    }
    for (std::size_t i = xs.size(); i-- > 0;) {
        if (vals[i] >= threshold) {
            if (i + 1 == xs.size()) {
                return xs[i];
            }
            const double w = (vals[i] - threshold) / (vals[i] - vals[i + 1]);
            return xs[i] + w * (xs[i + 1] - xs[i]);
        }
    }
    return 0.0;
}

std::vector<KSweepRow> k_sweep(const SweepSpec& spec)
{
    spec.validate();
    if (spec.param != "k") {
        throw ConfigError("k_sweep: the swept parameter must be k");
    }

    struct Member {
        MeshPtr mesh;
        Field n;
        Field nk;
    };
    std::vector<Member> members;
    std::vector<KSweepRow> rows;

    const fs::path out = spec.out_dir;
    auto persist = [&] {
        if (spec.out_dir.empty()) {
            return;
        }
        std::vector<std::vector<double>> table;
        for (const KSweepRow& r : rows) {
            table.push_back({static_cast<double>(r.k), r.h, r.complementarity, r.grad_p, r.max_dn, r.max_dp});
        }
        write_table(out / "k_sweep.csv", {"k", "h", "complementarity", "grad_p", "max_dn", "max_dp"}, table);
    };

    try {
        for (std::size_t i = 0; i < spec.values.size(); ++i) {
            RunConfig c = member_config(spec, i);
            c.model.t_final = spec.eval_time;
            Simulation sim(c);
            sim.run();
            const SimState& s = sim.state();
            std::vector<double> nk(s.n.size());
            for (Index a = 0; a < nk.size(); ++a) {
                nk[a] = power_k(std::max(s.n[a], 0.0), c.model.k);
            }
            KSweepRow row;
            row.k = c.model.k;
            row.h = sim.mesh()->diameter();
            row.complementarity = complementarity_residual(s.n, c.model, sim.mass(), sim.stiffness());
            row.grad_p = gradient_bound_metrics(s.n, c.model.k, sim.stiffness()).grad_nk;
            row.summary = sim.summary();
            members.push_back(Member{sim.mesh(), s.n, Field(sim.mesh(), std::move(nk))});
            rows.push_back(row);
            if (!spec.out_dir.empty()) {
                const fs::path dir = out / member_dir_name("k", spec.values[i]);
                write_series(sim.series(), dir / "series.csv");
                if (spec.write_fields) {
                    write_field(s, dir / "field.vtk", FieldFormat::Vtk);
                }
            }
            persist();
        }
    } catch (...) {
        persist();
        throw;
    }

    // Probe on the coarsest member's nodes; the reference is the largest k.
    const auto coarsest = std::min_element(members.begin(), members.end(), [](const Member& a, const Member& b) {
        return a.mesh->num_nodes() < b.mesh->num_nodes();
    });
    const std::vector<Point>& probes = coarsest->mesh->nodes();
    const Member& ref = members.back();
    auto sample = [&](const Member& m, const Field& f) {
        std::vector<double> out(probes.size());
        for (std::size_t i = 0; i < probes.size(); ++i) {
            out[i] = evaluate_p1(*m.mesh, f.values(), probes[i]).value_or(0.0);
        }
        return out;
    };
    const std::vector<double> ref_n = sample(ref, ref.n);
    const std::vector<double> ref_p = sample(ref, ref.nk);
    for (std::size_t i = 0; i < members.size(); ++i) {
        const std::vector<double> n = sample(members[i], members[i].n);
        const std::vector<double> p = sample(members[i], members[i].nk);
        for (std::size_t j = 0; j < probes.size(); ++j) {
            rows[i].max_dn = std::max(rows[i].max_dn, std::abs(n[j] - ref_n[j]));
            rows[i].max_dp = std::max(rows[i].max_dp, std::abs(p[j] - ref_p[j]));
        }
    }
    persist();
    return rows;
}

ParamStudyResult param_study(const SweepSpec& spec)
{
    spec.validate();
    if (spec.output_times.empty()) {
        throw ConfigError("param_study: no output times");
    }
    ParamStudyResult result;
    const fs::path out = spec.out_dir;
    auto persist = [&] {
        if (spec.out_dir.empty()) {
            return;
        }
        std::vector<std::vector<double>> table;
        for (const FrontSample& s : result.samples) {
            table.push_back({s.value, s.t, s.front_radius, s.max_n});
        }
        write_table(out / "param_study.csv", {spec.param, "t", "front_radius", "max_n"}, table);
    };

    try {
        for (std::size_t i = 0; i < spec.values.size(); ++i) {
            RunConfig c = member_config(spec, i);
            c.model.t_final = *std::max_element(spec.output_times.begin(), spec.output_times.end());
            std::vector<std::size_t> dump_steps;
            for (double t : spec.output_times) {
                dump_steps.push_back(steps_to(t, c.model.tau));
            }
            const double threshold = front_threshold(c.model);
            const fs::path dir = out / member_dir_name(spec.param, spec.values[i]);

            Simulation sim(c);
            sim.run([&](const SimState& s) {
                const auto it = std::find(dump_steps.begin(), dump_steps.end(), s.step);
                if (it == dump_steps.end()) {
                    return;
                }
                FrontSample sample;
                sample.value = spec.values[i];
                sample.t = s.t;
                sample.front_radius = front_radius(s.n, threshold);
                sample.max_n = s.diag.max_n;
                result.samples.push_back(sample);
                if (!spec.out_dir.empty() && spec.write_fields) {
                    for (FieldFormat f : c.formats) {
                        const std::string ext = f == FieldFormat::Vtk ? ".vtk" : ".csv";
                        write_field(s, dir / ("field_t" + format_double(s.t) + ext), f);
                    }
                }
            });
            result.summaries.push_back(sim.summary());
            if (!spec.out_dir.empty()) {
                write_series(sim.series(), dir / "series.csv");
                write_file_atomic(dir / "run.cfg", to_config_text(c) + "# front threshold = 0.5 N_max(k) = " +
                                                       format_double(threshold) + "\n");
            }
            persist();
        }
    } catch (...) {
        persist();
        throw;
    }
    return result;
}

} // namespace hsfem
