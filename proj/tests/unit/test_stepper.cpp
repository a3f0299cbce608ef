#include "hsfem/errors.hpp"
#include "hsfem/simulation.hpp"
#include "hsfem/stepper.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hsfem;
using hsfem::testing::rect_mesh;

namespace {

struct Fixture {
    MeshPtr mesh;
    Assembler assembler;
    LumpedMass mass;
    SparseOperator stiffness;

    explicit Fixture(MeshPtr m)
        : mesh(std::move(m)), assembler(*mesh), mass(lumped_mass(*mesh)), stiffness(assembler.stiffness())
    {
    }
    StepContext ctx() const { return StepContext{assembler, mass, stiffness}; }
};

double max_abs_diff(const Field& a, const Field& b)
{
    double m = 0.0;
    for (Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST(Step, ConstantStateFollowsTheOde)
{
    Fixture f(rect_mesh(-1, 1, -1, 1, 6, 6));
    ModelParams p;
    p.k = 10;
    p.tau = 1e-4;
    const double c = 0.4;
    for (Scheme s : {Scheme::Fem, Scheme::Fem2}) {
        const SimState st = make_state(Field(f.mesh, c), p.k, 0, p.tau);
        const StepOutcome out = step(s, st, p, f.ctx());
        const double expected = c * (1.0 + p.tau * growth(pressure(c, p.k), p.growth, p.p_max));
        for (double v : out.state.n.values()) {
            EXPECT_NEAR(v, expected, 1e-13);
        }
        EXPECT_EQ(out.state.step, 1u);
        EXPECT_EQ(out.state.t, p.tau);
        EXPECT_NEAR(out.state.p[0], pressure(expected, p.k), 1e-12);
    }
}

TEST(Step, SaturatedStateIsStationary)
{
    Fixture f(rect_mesh(0, 1, 0, 1, 4, 4));
    ModelParams p;
    const double nmax = n_max(p.k, p.p_max);
    const SimState st = make_state(Field(f.mesh, nmax), p.k, 0, p.tau);
    const StepOutcome out = step_fem2(st, p, f.ctx());
    for (double v : out.state.n.values()) {
        EXPECT_NEAR(v, nmax, 1e-13);
    }
}

TEST(Step, DiscreteMassIdentity)
{
    std::mt19937_64 rng(1);
    Fixture f(rect_mesh(-2, 2, -2, 2, 10, 10));
    ModelParams p;
    p.k = 4;
    p.tau = 1e-3;
    const SimState st = make_state(hsfem::testing::random_field(f.mesh, rng, 0.0, 0.9), p.k, 0, p.tau);
    for (Scheme s : {Scheme::Fem, Scheme::Fem2}) {
        const StepOutcome out = step(s, st, p, f.ctx());
        double change = 0.0, source = 0.0, mass = 0.0;
        for (Index a = 0; a < st.n.size(); ++a) {
            change += f.mass.diag[a] * (out.state.n[a] - st.n[a]) / p.tau;
            source += f.mass.diag[a] * growth(pressure(st.n[a], p.k), p.growth, p.p_max) * st.n[a];
            mass += f.mass.diag[a] * st.n[a];
        }
        EXPECT_NEAR(change, source, 1e-9 * mass);
    }
}

TEST(Step, LinearHeatStepSolvesImplicitEuler)
{
    Fixture f(rect_mesh(0, 1, 0, 1, 8, 8));
    ModelParams p;
    p.nonlinear_diffusion = false;
    p.growth = GrowthLaw::zero();
    p.nu = 1.0;
    p.tau = 1e-2;
    const Field n0 = nodal_interpolate(f.mesh, [](double x, double y) { return 1.0 + x * x - y; });
    const StepOutcome out = step_fem2(make_state(n0, p.k, 0, p.tau), p, f.ctx());
    // (M/tau + nu K) n1 = M/tau n0
    const std::vector<double> kn = f.stiffness * out.state.n.values();
    for (Index a = 0; a < n0.size(); ++a) {
        const double lhs = f.mass.diag[a] / p.tau * out.state.n[a] + p.nu * kn[a];
        EXPECT_NEAR(lhs, f.mass.diag[a] / p.tau * n0[a], 1e-10);
    }
}

TEST(Step, SchemesDivergeAtFirstOrderInTau)
{
    std::mt19937_64 rng(8);
    Fixture f(rect_mesh(-1, 1, -1, 1, 10, 10));
    const Field n0 = hsfem::testing::random_field(f.mesh, rng, 0.2, 0.9);
    ModelParams p;
    p.k = 3;
    double prev = 0.0;
    for (double tau : {4e-6, 2e-6, 1e-6}) {
        p.tau = tau;
        const SimState st = make_state(n0, p.k, 0, tau);
        const double d = max_abs_diff(step_fem(st, p, f.ctx()).state.n, step_fem2(st, p, f.ctx()).state.n);
        EXPECT_GT(d, 0.0);
        if (prev > 0.0) {
            EXPECT_NEAR(prev / d, 2.0, 0.05);
        }
        prev = d;
    }
}

TEST(Step, CertifiedSystemIsAnMMatrix)
{
    std::mt19937_64 rng(12);
    Fixture f(rect_mesh(-10, 10, -10, 10, 20, 20));
    ModelParams p;
    StepOptions opts;
    opts.certify_system = true;
    const SimState st = make_state(hsfem::testing::random_field(f.mesh, rng, 0.0, 0.99), p.k, 0, p.tau);
    const double min_m = *std::min_element(f.mass.diag.begin(), f.mass.diag.end());
    for (Scheme s : {Scheme::Fem, Scheme::Fem2}) {
        const StepOutcome out = step(s, st, p, f.ctx(), opts);
        EXPECT_LE(out.system_max_offdiag, 1e-14);
        EXPECT_GE(out.system_dominance_margin, min_m / p.tau - 1e-12);
        EXPECT_TRUE(out.solve.converged);
    }
}

TEST(Step, RejectsNegativeDensity)
{
    Fixture f(rect_mesh(0, 1, 0, 1, 2, 2));
    Field n(f.mesh, 0.5);
    n[4] = -1e-6;
    SimState st;
    st.n = n;
    st.p = Field(f.mesh, 0.0);
    EXPECT_THROW(step_fem2(st, ModelParams{}, f.ctx()), DomainError);
}

TEST(Simulation, ConstantDatumRunKeepsInvariants)
{
    RunConfig cfg;
    cfg.box = BBox{-1, 1, -1, 1};
    cfg.nx = cfg.ny = 6;
    cfg.initial = InitialDatum::Constant;
    cfg.model.alpha = 0.3;
    cfg.model.tau = 1e-5;
    cfg.model.t_final = 0.02;
    Simulation sim(cfg);
    std::size_t observed = 0;
    const RunSummary& s = sim.run([&](const SimState& st) {
        EXPECT_EQ(st.t, static_cast<double>(st.step) * cfg.model.tau);
        ++observed;
    });
    EXPECT_EQ(s.steps, 2000u);
    EXPECT_EQ(observed, 2001u);
    EXPECT_TRUE(s.h4_holds);
    EXPECT_TRUE(s.ok()) << (s.messages.empty() ? "" : s.messages.front());
    EXPECT_GT(sim.state().n[0], 0.3);
    EXPECT_LE(s.max_value, n_max(cfg.model.k, cfg.model.p_max) + 1e-12);
}

TEST(Simulation, ClampsInitialDatumAboveSaturation)
{
    RunConfig cfg;
    cfg.box = BBox{-1, 1, -1, 1};
    cfg.nx = cfg.ny = 4;
    cfg.model.t_final = 0.0;
    Simulation sim(cfg, [](double, double) { return 1.5; });
    EXPECT_EQ(sim.summary().clamped_nodes, 25u);
    EXPECT_NEAR(sim.state().n[0], n_max(cfg.model.k, cfg.model.p_max), 0.0);
    EXPECT_EQ(steps_to(0.1, 1e-5), 10000u);
}
