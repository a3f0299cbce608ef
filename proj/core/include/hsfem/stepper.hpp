#pragma once

#include "hsfem/assembly.hpp"
#include "hsfem/diagnostics.hpp"
#include "hsfem/fespace.hpp"
#include "hsfem/model.hpp"
#include "hsfem/solver.hpp"

#include <cstddef>

namespace hsfem {

/// Density at one time level. p[a] = pressure(n[a], k) and t = step * tau.
struct SimState {
    double t = 0.0;
    std::size_t step = 0;
    Field n;
    Field p;
    DiagnosticsRecord diag;
};

/// Builds a state at `step` from nodal densities (pressure filled in).
SimState make_state(Field n, int k, std::size_t step, double tau);

struct StepOptions {
    SolveOptions solve;
    WeightQuadrature quadrature = WeightQuadrature::Vertex;
    /// Values in (-snap_threshold, 0) after the solve are set to zero.
    double snap_threshold = 1e-13;
    /// Run the off-diagonal sign check on the assembled system matrix.
    bool certify_system = false;
};

/// Operators that stay fixed over a run.
struct StepContext {
    const Assembler& assembler;
    const LumpedMass& mass;
    const SparseOperator& stiffness;
};

struct StepOutcome {
    SimState state;
    SolveReport solve;
    std::size_t snaps = 0;
    /// tau (A(n^m) n^{m+1} . n^{m+1} + nu K n^{m+1} . n^{m+1}), the energy dissipation of the step.
    double dissipation = 0.0;
    /// Largest off-diagonal of the system matrix (only with certify_system).
    double system_max_offdiag = 0.0;
    double system_dominance_margin = 0.0;
};

/// One semi-implicit step: coefficients and growth frozen at n^m, diffusion
/// implicit. Solves (M/tau + A(n^m) + nu K) n^{m+1} = M/tau n^m + M G(p(n^m)) n^m.
StepOutcome step(Scheme scheme, const SimState& state, const ModelParams& params, const StepContext& ctx,
                 const StepOptions& options = {});

/// Scalar n^(k-1)-weighted scheme on nonobtuse meshes.
StepOutcome step_fem2(const SimState& state, const ModelParams& params, const StepContext& ctx,
                      const StepOptions& options = {});

/// Divided-difference scheme on axis-aligned right-angled meshes.
StepOutcome step_fem(const SimState& state, const ModelParams& params, const StepContext& ctx,
                     const StepOptions& options = {});

} // namespace hsfem
