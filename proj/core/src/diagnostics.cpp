#include "hsfem/diagnostics.hpp"

#include "hsfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsfem {

namespace {

std::vector<double> nodal_power_k(std::span<const double> n, int k)
{
    std::vector<double> out(n.size());
    for (std::size_t a = 0; a < n.size(); ++a) {
        out[a] = power_k(n[a], k);
    }
    return out;
}

void require_sizes(std::size_t n, const LumpedMass& mass, const SparseOperator& stiffness)
{
    if (mass.size() != n || stiffness.size() != n) {
        throw InvalidArgument("diagnostics: operator sizes do not match the field");
    }
}

} // namespace

H4Residual h4_residual(const Field& n0, const ModelParams& params, const LumpedMass& mass,
                       const SparseOperator& stiffness)
{
    require_sizes(n0.size(), mass, stiffness);
    const std::vector<double> nk = nodal_power_k(n0.values(), params.k);
    const std::vector<double> k_nk = stiffness * nk;
    const std::vector<double> k_n = stiffness * n0.values();

    H4Residual out;
    out.residual.resize(n0.size());
    out.min = std::numeric_limits<double>::infinity();
    for (Index a = 0; a < n0.size(); ++a) {
        const double g = growth(pressure(n0[a], params.k), params.growth, params.p_max);
        const double diffusion = params.nonlinear_diffusion ? k_nk[a] : 0.0;
        out.residual[a] = -diffusion - params.nu * k_n[a] + mass.diag[a] * g * n0[a];
        out.min = std::min(out.min, out.residual[a]);
    }
    return out;
}

double complementarity_residual(const Field& n, const ModelParams& params, const LumpedMass& mass,
                                const SparseOperator& stiffness)
{
    require_sizes(n.size(), mass, stiffness);
    const std::vector<double> p = nodal_power_k(n.values(), params.k);
    const std::vector<double> kp = stiffness * p;
    double sum = 0.0;
    for (Index a = 0; a < n.size(); ++a) {
        const double lap = -kp[a] / mass.diag[a];
        const double r = p[a] * (lap + growth(p[a], params.growth, params.p_max));
        sum += mass.diag[a] * r * r;
    }
    return std::sqrt(sum);
}

GradientMetrics gradient_bound_metrics(const Field& n, int k, const SparseOperator& stiffness)
{
    if (stiffness.size() != n.size()) {
        throw InvalidArgument("gradient_bound_metrics: dimension mismatch");
    }
    const std::vector<double> nk = nodal_power_k(n.values(), k);
    return GradientMetrics{dirichlet_seminorm(stiffness, n.values()), dirichlet_seminorm(stiffness, nk)};
}

DmpReport dmp_check(const Field& n, int k, double p_max, double tol)
{
    DmpReport report;
    report.upper_bound = n_max(k, p_max);
    report.min = std::numeric_limits<double>::infinity();
    report.max = -std::numeric_limits<double>::infinity();
    for (Index a = 0; a < n.size(); ++a) {
        const double v = n[a];
        report.min = std::min(report.min, v);
        report.max = std::max(report.max, v);
        if (v < -tol) {
            report.below.push_back({a, -v});
        } else if (v > report.upper_bound + tol) {
            report.above.push_back({a, v - report.upper_bound});
        }
    }
    return report;
}

MonotonicityReport monotonicity_check(const Field& prev, const Field& cur, double tau, double slack)
{
    if (prev.size() != cur.size() || prev.mesh() != cur.mesh()) {
        throw InvalidArgument("monotonicity_check: fields live on different meshes");
    }
    if (!(tau > 0.0)) {
        throw InvalidArgument("monotonicity_check: tau must be positive");
    }
    MonotonicityReport report;
    report.min_dtn = std::numeric_limits<double>::infinity();
    for (Index a = 0; a < cur.size(); ++a) {
        const double dtn = (cur[a] - prev[a]) / tau;
        report.min_dtn = std::min(report.min_dtn, dtn);
        if (dtn < -slack) {
            report.violations.push_back({a, -dtn});
        }
    }
    return report;
}

double monotonicity_slack(int k, double p_max, double tau) { return 1e-10 * n_max(k, p_max) / tau; }

double mass_balance_residual(const Field& prev, const Field& cur, const ModelParams& params,
                             const LumpedMass& mass)
{
    if (prev.size() != cur.size() || mass.size() != cur.size()) {
        throw InvalidArgument("mass_balance_residual: dimension mismatch");
    }
    double change = 0.0;
    double source = 0.0;
    for (Index a = 0; a < cur.size(); ++a) {
        change += mass.diag[a] * (cur[a] - prev[a]);
        source += mass.diag[a] * growth(pressure(prev[a], params.k), params.growth, params.p_max) * prev[a];
    }
    return std::abs(change / params.tau - source);
}

double max_pressure(const Field& n, int k)
{
    double m = 0.0;
    for (Index a = 0; a < n.size(); ++a) {
        m = std::max(m, pressure(std::max(n[a], 0.0), k));
    }
    return m;
}

double dissipation_increment(const SparseOperator& diffusion_at_j, const SparseOperator& stiffness,
                             std::span<const double> next, const ModelParams& params)
{
    const std::vector<double> an = diffusion_at_j * next;
    const std::vector<double> kn = stiffness * next;
    return params.tau * (dot(an, next) + params.nu * dot(kn, next));
}

EnergyTracker::EnergyTracker(const Field& n0, const ModelParams& params, const LumpedMass& mass)
    : params_(params), mass_(&mass)
{
    half_norm0_ = 0.5 * inner_h(n0, n0, mass);
    current_ = EnergyStep{0, 0.0, half_norm0_, half_norm0_, false};
}

const EnergyStep& EnergyTracker::record(const Field& next, double dissipation)
{
    accumulated_ += dissipation;
    const std::size_t step = current_.step + 1;
    const double t = static_cast<double>(step) * params_.tau;
    const double g0 = growth(0.0, params_.growth, params_.p_max);
    current_.step = step;
    current_.t = t;
    current_.lhs = 0.5 * inner_h(next, next, *mass_) + accumulated_;
    current_.rhs = std::exp(2.0 * g0 * t) * half_norm0_;
    current_.flagged = current_.lhs > (1.0 + kEnergySlack) * current_.rhs;
    return current_;
}

std::vector<EnergyStep> energy_check(std::span<const Field> trajectory, const ModelParams& params,
                                     Scheme scheme, const Assembler& assembler, const LumpedMass& mass,
                                     const SparseOperator& stiffness, WeightQuadrature quad)
{
    std::vector<EnergyStep> out;
    if (trajectory.empty()) {
        return out;
    }
    EnergyTracker tracker(trajectory.front(), params, mass);
    out.push_back(tracker.current());
    for (std::size_t j = 0; j + 1 < trajectory.size(); ++j) {
        const SparseOperator A = diffusion_operator(assembler, scheme, trajectory[j].values(), params, quad);
        const double d = dissipation_increment(A, stiffness, trajectory[j + 1].values(), params);
        out.push_back(tracker.record(trajectory[j + 1], d));
    }
    return out;
}

} // namespace hsfem
