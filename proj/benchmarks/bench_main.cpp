#include "hsfem/assembly.hpp"
#include "hsfem/diagnostics.hpp"
#include "hsfem/solver.hpp"
#include "hsfem/stepper.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace hsfem;

namespace {

struct Problem {
    MeshPtr mesh;
    Assembler assembler;
    LumpedMass mass;
    SparseOperator stiffness;
    Field n;

    explicit Problem(int cells)
        : mesh(std::make_shared<const Mesh>(build_rect_mesh(BBox{-10, 10, -10, 10}, cells, cells))),
          assembler(*mesh),
          mass(lumped_mass(*mesh)),
          stiffness(assembler.stiffness()),
          n(nodal_interpolate(mesh, initial_gaussian(1.0)))
    {
        const double top = n_max(100, 1.0);
        for (double& v : n.values()) {
            v = std::min(v, top);
        }
    }
};

void BM_Stiffness(benchmark::State& state)
{
    const Problem p(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(p.assembler.stiffness());
    }
}
BENCHMARK(BM_Stiffness)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_DiffusionFem2(benchmark::State& state)
{
    const Problem p(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(p.assembler.diffusion_fem2(p.n.values(), 100));
    }
}
BENCHMARK(BM_DiffusionFem2)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_DiffusionFem(benchmark::State& state)
{
    const Problem p(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(p.assembler.diffusion_fem(p.n.values(), 100));
    }
}
BENCHMARK(BM_DiffusionFem)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_ConjugateGradient(benchmark::State& state)
{
    const Problem p(static_cast<int>(state.range(0)));
    const SparseOperator A = p.assembler.diffusion_fem2(p.n.values(), 100);
    const SparseOperator S = system_matrix(p.mass, 1e-5, A, 0.5, p.stiffness);
    const std::vector<double> b = p.stiffness * p.n.values();
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_spd(S, b));
    }
}
BENCHMARK(BM_ConjugateGradient)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_Step(benchmark::State& state)
{
    const Problem p(static_cast<int>(state.range(0)));
    ModelParams params;
    const SimState s = make_state(p.n, params.k, 0, params.tau);
    const StepContext ctx{p.assembler, p.mass, p.stiffness};
    for (auto _ : state) {
        benchmark::DoNotOptimize(step_fem2(s, params, ctx));
    }
}
BENCHMARK(BM_Step)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_Complementarity(benchmark::State& state)
{
    const Problem p(static_cast<int>(state.range(0)));
    ModelParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(complementarity_residual(p.n, params, p.mass, p.stiffness));
    }
}
BENCHMARK(BM_Complementarity)->Arg(100)->Unit(benchmark::kMicrosecond);

} // namespace
BENCHMARK_MAIN();
