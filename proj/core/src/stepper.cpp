#include "hsfem/stepper.hpp"

#include "hsfem/errors.hpp"

#include <string>

namespace hsfem {

SimState make_state(Field n, int k, std::size_t step, double tau)
{
    std::vector<double> p(n.size());
    for (Index a = 0; a < n.size(); ++a) {
        p[a] = pressure(n[a], k);
    }
    SimState s;
    s.step = step;
    s.t = static_cast<double>(step) * tau;
    s.p = Field(n.mesh(), std::move(p));
    s.n = std::move(n);
    s.diag.t = s.t;
    s.diag.step = step;
    return s;
}

StepOutcome step(Scheme scheme, const SimState& state, const ModelParams& params, const StepContext& ctx,
                 const StepOptions& options)
{
    const Field& n = state.n;
    const std::size_t size = n.size();
    if (ctx.mass.size() != size || ctx.stiffness.size() != size ||
        ctx.assembler.mesh().num_nodes() != size) {
        throw InvalidArgument("step: operators do not match the state");
    }
    for (Index a = 0; a < size; ++a) {
        if (!(n[a] >= 0.0)) {
            throw DomainError("step: negative density " + std::to_string(n[a]) + " at node " + std::to_string(a));
        }
    }

    const SparseOperator A = diffusion_operator(ctx.assembler, scheme, n.values(), params, options.quadrature);
    const SparseOperator S = system_matrix(ctx.mass, params.tau, A, params.nu, ctx.stiffness);

    // Increment form: S (n^{m+1} - n^m) = M G n^m - (A + nu K) n^m.
    const std::vector<double> an = A * n.values();
    const std::vector<double> kn = ctx.stiffness * n.values();
    std::vector<double> rhs(size);
    for (Index a = 0; a < size; ++a) {
        const double g = growth(state.p[a], params.growth, params.p_max);
        rhs[a] = ctx.mass.diag[a] * g * n[a] - an[a] - params.nu * kn[a];
    }
    SolveResult solved = solve_spd(S, rhs, options.solve);

    StepOutcome out;
    out.solve = solved.report;
    std::vector<double> next(size);
    for (Index a = 0; a < size; ++a) {
        next[a] = n[a] + solved.x[a];
        if (next[a] < 0.0 && next[a] > -options.snap_threshold) {
            next[a] = 0.0;
            ++out.snaps;
        }
    }
    out.dissipation = dissipation_increment(A, ctx.stiffness, next, params);
    if (options.certify_system) {
        out.system_max_offdiag = offdiag_sign_check(S).max_offdiag;
        out.system_dominance_margin = diagonal_dominance_margin(S);
    }

    // A genuinely negative value is left in place for the DMP monitor to report.
    std::vector<double> p(size);
    for (Index a = 0; a < size; ++a) {
        p[a] = next[a] > 0.0 ? pressure(next[a], params.k) : 0.0;
    }
    out.state.step = state.step + 1;
    out.state.t = static_cast<double>(out.state.step) * params.tau;
    out.state.n = Field(n.mesh(), std::move(next));
    out.state.p = Field(n.mesh(), std::move(p));
    out.state.diag.t = out.state.t;
    out.state.diag.step = out.state.step;
    out.state.diag.snaps = out.snaps;
    return out;
}

StepOutcome step_fem2(const SimState& state, const ModelParams& params, const StepContext& ctx,
                      const StepOptions& options)
{
    return step(Scheme::Fem2, state, params, ctx, options);
}

StepOutcome step_fem(const SimState& state, const ModelParams& params, const StepContext& ctx,
                     const StepOptions& options)
{
    return step(Scheme::Fem, state, params, ctx, options);
}

} // namespace hsfem
