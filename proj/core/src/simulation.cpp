#include "hsfem/simulation.hpp"

#include "hsfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hsfem {

namespace {

constexpr std::size_t kMaxMessages = 20;
constexpr double kDmpTol = 1e-12;
constexpr double kPressureTol = 1e-10;
constexpr double kMassBalanceRel = 1e-9;

MeshPtr make_mesh(const RunConfig& c)
{
    c.validate();
    return std::make_shared<const Mesh>(build_rect_mesh(c.box, c.nx, c.ny));
}

ScalarFunction configured_datum(const RunConfig& c)
{
    if (c.initial == InitialDatum::Constant) {
        const double v = c.model.alpha;
        return [v](double, double) { return v; };
    }
    return initial_gaussian(c.model.alpha);
}

} // namespace

std::size_t steps_to(double t, double tau)
{
    if (!(tau > 0.0) || !(t >= 0.0)) {
        throw InvalidArgument("steps_to: need t >= 0 and tau > 0");
    }
    return static_cast<std::size_t>(std::llround(t / tau));
}

Simulation::Simulation(const RunConfig& config) : Simulation(config, configured_datum(config)) {}

Simulation::Simulation(const RunConfig& config, const ScalarFunction& initial)
    : config_(config),
      mesh_(make_mesh(config)),
      assembler_(*mesh_),
      mass_(lumped_mass(*mesh_)),
      stiffness_(assembler_.stiffness())
{
    step_options_.solve = config_.solve;
    step_options_.quadrature = config_.quadrature;
    initialise(initial);
}

void Simulation::initialise(const ScalarFunction& initial)
{
    const ModelParams& m = config_.model;
    n_upper_ = n_max(m.k, m.p_max);
    Field n0 = nodal_interpolate(mesh_, initial);
    for (Index a = 0; a < n0.size(); ++a) {
        const double clamped = std::clamp(n0[a], 0.0, n_upper_);
        if (clamped != n0[a]) {
            ++summary_.clamped_nodes;
            n0[a] = clamped;
        }
    }
    total_steps_ = steps_to(m.t_final, m.tau);
    state_ = make_state(std::move(n0), m.k, 0, m.tau);

    const H4Residual h4 = h4_residual(state_.n, m, mass_, stiffness_);
    summary_.h4_min = h4.min;
    summary_.h4_holds = h4.min >= -1e-12;
    summary_.min_value = std::numeric_limits<double>::infinity();
    summary_.max_value = -std::numeric_limits<double>::infinity();
    summary_.min_dtn = std::numeric_limits<double>::infinity();

    energy_.emplace(state_.n, m, mass_);
    DiagnosticsRecord rec = base_record(state_);
    rec.min_dtn = 0.0;
    rec.mass_balance_residual = 0.0;
    rec.energy_lhs = energy_->current().lhs;
    rec.energy_rhs = energy_->current().rhs;
    rec.complementarity = complementarity_residual(state_.n, m, mass_, stiffness_);
    rec.h4_min = h4.min;
    last_complementarity_ = rec.complementarity;
    state_.diag = rec;
    summary_.min_value = rec.min_n;
    summary_.max_value = rec.max_n;
    series_.push_back(rec);
}

DiagnosticsRecord Simulation::base_record(const SimState& s) const
{
    DiagnosticsRecord r;
    r.t = s.t;
    r.step = s.step;
    const auto v = s.n.values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    r.min_n = *lo;
    r.max_n = *hi;
    r.mass = inner_h(s.n, Field(s.n.mesh(), 1.0), mass_);
    r.grad_p_norm = gradient_bound_metrics(s.n, config_.model.k, stiffness_).grad_nk;
    return r;
}

void Simulation::note(const std::string& message)
{
    if (summary_.messages.size() < kMaxMessages) {
        summary_.messages.push_back(message);
    }
}

const SimState& Simulation::advance()
{
    if (finished()) {
        return state_;
    }
    const ModelParams& m = config_.model;
    const StepContext ctx{assembler_, mass_, stiffness_};
    StepOutcome out = step(config_.scheme, state_, m, ctx, step_options_);

    DiagnosticsRecord rec = base_record(out.state);
    const MonotonicityReport mono = monotonicity_check(state_.n, out.state.n, m.tau,
                                                       monotonicity_slack(m.k, m.p_max, m.tau));
    rec.min_dtn = mono.min_dtn;
    rec.mass_balance_residual = mass_balance_residual(state_.n, out.state.n, m, mass_);
    rec.snaps = out.snaps;
    if (config_.energy_check) {
        const EnergyStep& e = energy_->record(out.state.n, out.dissipation);
        rec.energy_lhs = e.lhs;
        rec.energy_rhs = e.rhs;
        if (e.flagged) {
            ++summary_.energy_flags;
            note("energy bound exceeded at step " + std::to_string(rec.step));
        }
    }
    if (out.state.step % config_.complementarity_every == 0) {
        last_complementarity_ = complementarity_residual(out.state.n, m, mass_, stiffness_);
    }
    rec.complementarity = last_complementarity_;

    const DmpReport dmp = dmp_check(out.state.n, m.k, m.p_max, kDmpTol);
    if (!dmp.ok()) {
        ++summary_.dmp_violations;
        std::ostringstream os;
        os << "maximum principle violated at step " << rec.step << " (min " << dmp.min << ", max " << dmp.max
           << ", N_max " << dmp.upper_bound << ")";
        note(os.str());
    }
    if (max_pressure(out.state.n, m.k) > m.p_max + kPressureTol) {
        ++summary_.pressure_violations;
        note("pressure above P_max at step " + std::to_string(rec.step));
    }
    if (summary_.h4_holds && !mono.violations.empty()) {
        ++summary_.monotonicity_violations;
        note("nodal density decreased at step " + std::to_string(rec.step));
    }
    const double prev_mass = state_.diag.mass;
    const double ratio = prev_mass > 0.0 ? rec.mass_balance_residual / prev_mass : rec.mass_balance_residual;
    summary_.max_mass_balance_ratio = std::max(summary_.max_mass_balance_ratio, ratio);
    if (rec.mass_balance_residual > kMassBalanceRel * prev_mass) {
        ++summary_.mass_balance_violations;
        note("mass balance residual " + std::to_string(rec.mass_balance_residual) + " at step " +
             std::to_string(rec.step));
    }

    summary_.min_value = std::min(summary_.min_value, rec.min_n);
    summary_.max_value = std::max(summary_.max_value, rec.max_n);
    summary_.min_dtn = std::min(summary_.min_dtn, rec.min_dtn);
    summary_.snaps += out.snaps;
    summary_.solver_iterations += out.solve.iterations;
    summary_.steps = out.state.step;
    summary_.t = out.state.t;

    out.state.diag = rec;
    state_ = std::move(out.state);
    if (state_.step % config_.series_every == 0 || finished()) {
        series_.push_back(rec);
    }
    return state_;
}

const RunSummary& Simulation::run(const StepObserver& observer)
{
    if (observer && state_.step == 0) {
        observer(state_);
    }
    while (!finished()) {
        advance();
        if (observer) {
            observer(state_);
        }
    }
    if (summary_.min_dtn == std::numeric_limits<double>::infinity()) {
        summary_.min_dtn = 0.0;
    }
    return summary_;
}

} // namespace hsfem
