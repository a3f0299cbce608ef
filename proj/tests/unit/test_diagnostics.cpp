#include "hsfem/diagnostics.hpp"
#include "hsfem/stepper.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace hsfem;
using hsfem::testing::rect_mesh;

namespace {

// sum over elements of area * grad(u) . grad(v), with gradients rebuilt from vertex coordinates.
double grad_pairing(const Mesh& mesh, std::span<const double> u, std::span<const double> v)
{
    double total = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const Triangle& t = mesh.element(e);
        const Point a = mesh.node(t[0]), b = mesh.node(t[1]), c = mesh.node(t[2]);
        const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        auto grad = [&](std::span<const double> f) {
            const double du1 = f[t[1]] - f[t[0]], du2 = f[t[2]] - f[t[0]];
            return std::pair{(du1 * (c.y - a.y) - du2 * (b.y - a.y)) / det,
                             (du2 * (b.x - a.x) - du1 * (c.x - a.x)) / det};
        };
        const auto gu = grad(u), gv = grad(v);
        total += 0.5 * std::abs(det) * (gu.first * gv.first + gu.second * gv.second);
    }
    return total;
}

} // namespace

TEST(H4Residual, MatchesVariationalForm)
{
    std::mt19937_64 rng(31);
    const auto mesh = rect_mesh(-2, 2, -2, 2, 9, 9);
    const LumpedMass M = lumped_mass(*mesh);
    const SparseOperator K = stiffness(*mesh);
    ModelParams p;
    p.k = 5;
    p.nu = 0.7;
    const Field n0 = hsfem::testing::random_field(mesh, rng, 0.0, 0.95);
    const H4Residual r = h4_residual(n0, p, M, K);

    std::vector<double> nk(n0.size());
    for (Index a = 0; a < nk.size(); ++a) nk[a] = std::pow(n0[a], p.k);
    for (int trial = 0; trial < 20; ++trial) {
        const Field chi = hsfem::testing::random_field(mesh, rng, 0.0, 1.0);
        double source = 0.0;
        for (Index a = 0; a < chi.size(); ++a) {
            source += M.diag[a] * growth(pressure(n0[a], p.k), p.growth, p.p_max) * n0[a] * chi[a];
        }
        const double expected =
            -grad_pairing(*mesh, nk, chi.values()) - p.nu * grad_pairing(*mesh, n0.values(), chi.values()) + source;
        const double got = std::inner_product(r.residual.begin(), r.residual.end(), chi.values().begin(), 0.0);
        EXPECT_NEAR(got, expected, 1e-11 * (1 + std::abs(expected)));
    }
    EXPECT_DOUBLE_EQ(r.min, *std::min_element(r.residual.begin(), r.residual.end()));
}

TEST(H4Residual, ConstantDatumIsPositive)
{
    const auto mesh = rect_mesh(-1, 1, -1, 1, 5, 5);
    const LumpedMass M = lumped_mass(*mesh);
    ModelParams p;
    const H4Residual r = h4_residual(Field(mesh, 0.3), p, M, stiffness(*mesh));
    const double g = growth(pressure(0.3, p.k), p.growth, p.p_max);
    for (Index a = 0; a < r.residual.size(); ++a) {
        EXPECT_NEAR(r.residual[a], M.diag[a] * g * 0.3, 1e-12);
    }
    EXPECT_GT(r.min, 0.0);
}

TEST(Complementarity, ConstantAndZeroFields)
{
    const auto mesh = rect_mesh(0, 2, 0, 1, 6, 3);
    const LumpedMass M = lumped_mass(*mesh);
    const SparseOperator K = stiffness(*mesh);
    ModelParams p;
    p.k = 4;
    EXPECT_EQ(complementarity_residual(Field(mesh, 0.0), p, M, K), 0.0);
    const double c = 0.8, pk = std::pow(c, 4);
    EXPECT_NEAR(complementarity_residual(Field(mesh, c), p, M, K),
                std::sqrt(2.0) * pk * growth(pk, p.growth, p.p_max), 1e-10);
}

TEST(Complementarity, VanishesWherePressureSitsAtThreshold)
{
    const auto mesh = rect_mesh(0, 1, 0, 1, 4, 4);
    ModelParams p;
    p.k = 100;
    // I_h(n^k) == P_max: G vanishes and the Laplacian of a constant is zero.
    const Field n(mesh, std::pow(p.p_max, 1.0 / p.k));
    EXPECT_NEAR(complementarity_residual(n, p, lumped_mass(*mesh), stiffness(*mesh)), 0.0, 1e-12);
}

TEST(H4Residual, GaussianDatumOnPaperDomain)
{
    const auto mesh = rect_mesh(-10, 10, -10, 10, 50, 50);
    ModelParams p;
    p.alpha = 0.5;
    const Field n0 = nodal_interpolate(mesh, initial_gaussian(p.alpha));
    const H4Residual r = h4_residual(n0, p, lumped_mass(*mesh), stiffness(*mesh));
    RecordProperty("h4_min", std::to_string(r.min));
    EXPECT_TRUE(std::isfinite(r.min));
    EXPECT_EQ(r.residual.size(), mesh->num_nodes());
}

TEST(Complementarity, InvariantUnderRenumbering)
{
    std::mt19937_64 rng(41);
    const auto mesh = rect_mesh(-1, 1, -1, 1, 7, 5);
    const Field n = hsfem::testing::random_field(mesh, rng, 0.0, 1.0);
    ModelParams p;
    p.k = 6;
    const double ref = complementarity_residual(n, p, lumped_mass(*mesh), stiffness(*mesh));

    std::vector<Index> perm(mesh->num_nodes());
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Point> nodes(perm.size());
    std::vector<double> vals(perm.size());
    for (Index a = 0; a < perm.size(); ++a) {
        nodes[perm[a]] = mesh->node(a);
        vals[perm[a]] = n[a];
    }
    std::vector<Triangle> elems;
    for (const Triangle& t : mesh->elements()) elems.push_back(Triangle{perm[t[0]], perm[t[1]], perm[t[2]]});
    std::reverse(elems.begin(), elems.end());
    const auto shuffled = std::make_shared<const Mesh>(Mesh(nodes, elems));
    const double got = complementarity_residual(Field(shuffled, vals), p, lumped_mass(*shuffled), stiffness(*shuffled));
    EXPECT_NEAR(got, ref, 1e-12 * ref);
}

TEST(GradientMetrics, LinearField)
{
    const auto mesh = rect_mesh(0, 1, 0, 1, 4, 4);
    const Field n = nodal_interpolate(mesh, [](double x, double) { return 0.5 + 0.25 * x; });
    const GradientMetrics g = gradient_bound_metrics(n, 2, stiffness(*mesh));
    EXPECT_NEAR(g.grad_n, 0.25, 1e-13);
    std::vector<double> sq(n.size());
    for (Index a = 0; a < sq.size(); ++a) sq[a] = n[a] * n[a];
    EXPECT_NEAR(g.grad_nk, std::sqrt(grad_pairing(*mesh, sq, sq)), 1e-13);
}

TEST(DmpCheck, FlagsBothSides)
{
    const auto mesh = rect_mesh(0, 1, 0, 1, 2, 2);
    Field n(mesh, 0.5);
    EXPECT_TRUE(dmp_check(n, 100, 1.0).ok());
    n[0] = -2e-12;
    n[8] = n_max(100, 1.0) + 1e-9;
    n[3] = -5e-13;
    const DmpReport r = dmp_check(n, 100, 1.0);
    ASSERT_EQ(r.below.size(), 1u);
    EXPECT_EQ(r.below[0].node, 0u);
    ASSERT_EQ(r.above.size(), 1u);
    EXPECT_EQ(r.above[0].node, 8u);
    EXPECT_NEAR(r.above[0].magnitude, 1e-9, 1e-15);
    EXPECT_FALSE(r.ok());
}

TEST(Monotonicity, SlackAndViolations)
{
    const auto mesh = rect_mesh(0, 1, 0, 1, 1, 1);
    const Field prev(mesh, 0.5);
    Field cur(mesh, 0.6);
    cur[2] = 0.5 - 1e-3;
    const MonotonicityReport r = monotonicity_check(prev, cur, 0.1, 0.0);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_NEAR(r.min_dtn, -1e-2, 1e-14);
    EXPECT_TRUE(monotonicity_check(prev, cur, 0.1, 0.02).violations.empty());
    EXPECT_NEAR(monotonicity_slack(100, 1.0, 1e-5), 1e-5 * n_max(100, 1.0), 1e-20);
}

TEST(MassBalance, ResidualOfHandBuiltStep)
{
    const auto mesh = rect_mesh(0, 1, 0, 1, 3, 3);
    const LumpedMass M = lumped_mass(*mesh);
    ModelParams p;
    p.tau = 0.01;
    const double c = 0.5;
    const double g = growth(pressure(c, p.k), p.growth, p.p_max);
    const Field prev(mesh, c);
    EXPECT_NEAR(mass_balance_residual(prev, Field(mesh, c * (1 + p.tau * g)), p, M), 0.0, 1e-10);
    EXPECT_NEAR(mass_balance_residual(prev, Field(mesh, c), p, M), g * c, 1e-10);
}

TEST(Energy, TrackerBound)
{
    const auto mesh = rect_mesh(0, 1, 0, 1, 2, 2);
    const LumpedMass M = lumped_mass(*mesh);
    ModelParams p;
    p.tau = 1e-3;
    EnergyTracker tr(Field(mesh, 0.5), p, M);
    EXPECT_DOUBLE_EQ(tr.current().lhs, 0.125);
    const EnergyStep& s = tr.record(Field(mesh, 0.5), 0.01);
    EXPECT_NEAR(s.lhs, 0.135, 1e-15);
    EXPECT_NEAR(s.rhs, 0.125 * std::exp(2 * growth(0.0, p.growth, p.p_max) * 1e-3), 1e-15);
    EXPECT_FALSE(s.flagged);
    EXPECT_TRUE(tr.record(Field(mesh, 2.0), 0.0).flagged);
}

TEST(Energy, NormNonincreasingWithoutGrowth)
{
    std::mt19937_64 rng(77);
    const auto mesh = rect_mesh(-1, 1, -1, 1, 10, 10);
    const Assembler asmb(*mesh);
    const LumpedMass M = lumped_mass(*mesh);
    const SparseOperator K = asmb.stiffness();
    ModelParams p;
    p.k = 3;
    p.tau = 1e-3;
    p.growth = GrowthLaw::zero();
    std::vector<Field> traj{hsfem::testing::random_field(mesh, rng, 0.0, 1.0)};
    SimState st = make_state(traj.front(), p.k, 0, p.tau);
    for (int m = 0; m < 20; ++m) {
        st = step_fem2(st, p, StepContext{asmb, M, K}).state;
        EXPECT_LE(norm_h(st.n, M), norm_h(traj.back(), M) + 1e-12);
        traj.push_back(st.n);
    }
    for (const EnergyStep& e : energy_check(traj, p, Scheme::Fem2, asmb, M, K)) {
        EXPECT_FALSE(e.flagged);
        EXPECT_LE(e.lhs, e.rhs + 1e-12);
    }
}
