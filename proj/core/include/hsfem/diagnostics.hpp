#pragma once

#include "hsfem/assembly.hpp"
#include "hsfem/fespace.hpp"
#include "hsfem/model.hpp"
#include "hsfem/sparse.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hsfem {

/// Monitor values for one time level.
struct DiagnosticsRecord {
    double t = 0.0;
    std::size_t step = 0;
    double min_n = 0.0;
    double max_n = 0.0;
    double min_dtn = 0.0;
    double mass = 0.0;
    double mass_balance_residual = 0.0;
    double energy_lhs = 0.0;
    double energy_rhs = 0.0;
    double grad_p_norm = 0.0;
    double complementarity = 0.0;
    std::optional<double> h4_min; // first record only
    std::size_t snaps = 0;
};

struct H4Residual {
    std::vector<double> residual;
    double min = 0.0;
};

/// Nodal residual R[a] = -(K I_h(n0^k))[a] - nu (K n0)[a] + M[a] G(p(n0[a])) n0[a].
/// With lumped products the initial-monotonicity hypothesis holds iff R >= 0.
H4Residual h4_residual(const Field& n0, const ModelParams& params, const LumpedMass& mass,
                       const SparseOperator& stiffness);

/// sqrt(sum_a M[a] (p[a] (Lap_h p)[a] + G(p[a]))^2) with p = I_h(n^k).
double complementarity_residual(const Field& n, const ModelParams& params, const LumpedMass& mass,
                                const SparseOperator& stiffness);

struct GradientMetrics {
    double grad_n = 0.0;  ///< ||grad n_h||
    double grad_nk = 0.0; ///< ||grad I_h(n_h^k)||
};

GradientMetrics gradient_bound_metrics(const Field& n, int k, const SparseOperator& stiffness);

struct NodeViolation {
    Index node = 0;
    double magnitude = 0.0;
};

struct DmpReport {
    double min = 0.0;
    double max = 0.0;
    double upper_bound = 0.0; ///< N_max(k)
    std::vector<NodeViolation> below; ///< n < -tol, magnitude = -n
    std::vector<NodeViolation> above; ///< n > N_max + tol, magnitude = n - N_max

    bool ok() const { return below.empty() && above.empty(); }
};

DmpReport dmp_check(const Field& n, int k, double p_max, double tol = 1e-12);

struct MonotonicityReport {
    double min_dtn = 0.0;
    std::vector<NodeViolation> violations; ///< (cur - prev)/tau < -slack
};

MonotonicityReport monotonicity_check(const Field& prev, const Field& cur, double tau, double slack = 0.0);

/// Slack 1e-10 N_max(k)/tau used for the nodal time-derivative sign check.
double monotonicity_slack(int k, double p_max, double tau);

/// |(delta_t n, 1)_h - (G(p(n_prev)) n_prev, 1)_h|.
double mass_balance_residual(const Field& prev, const Field& cur, const ModelParams& params,
                             const LumpedMass& mass);

/// Largest nodal pressure p(n[a]).
double max_pressure(const Field& n, int k);

struct EnergyStep {
    std::size_t step = 0;
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool flagged = false;
};

/// Relative slack on the energy bound.
inline constexpr double kEnergySlack = 0.05;

/// tau (A(n_j) n_{j+1} . n_{j+1} + nu K n_{j+1} . n_{j+1}).
double dissipation_increment(const SparseOperator& diffusion_at_j, const SparseOperator& stiffness,
                             std::span<const double> next, const ModelParams& params);

/// Incremental form of the energy check.
///
/// lhs_m = 1/2 ||n^m||_h^2 + sum_{j<m} dissipation_j,
/// rhs_m = exp(2 G(0) t_m) 1/2 ||n^0||_h^2, flagged when lhs > (1 + slack) rhs.
class EnergyTracker {
public:
    EnergyTracker(const Field& n0, const ModelParams& params, const LumpedMass& mass);

    const EnergyStep& current() const { return current_; }
    const EnergyStep& record(const Field& next, double dissipation);

private:
    ModelParams params_;
    const LumpedMass* mass_;
    double half_norm0_ = 0.0;
    double accumulated_ = 0.0;
    EnergyStep current_;
};

/// Energy report for every level of a stored trajectory n^0, ..., n^m.
std::vector<EnergyStep> energy_check(std::span<const Field> trajectory, const ModelParams& params,
                                     Scheme scheme, const Assembler& assembler, const LumpedMass& mass,
                                     const SparseOperator& stiffness,
                                     WeightQuadrature quad = WeightQuadrature::Vertex);

} // namespace hsfem
