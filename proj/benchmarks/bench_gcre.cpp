#include "gcre/conjugate.hpp"
#include "gcre/estimator.hpp"
#include "gcre/expression.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace gcre;

namespace {

ProblemSpec parabola_obstacle() {
    ProblemSpec p;
    p.kind = ProblemKind::obstacle_1d;
    p.geometry = Interval{-2.0, 2.0};
    p.obstacle = expression_field(Expression("1 - x^2"));
    p.constraint_curvature = 2.0;
    return p;
}

ProblemSpec tresca() {
    ProblemSpec p;
    p.kind = ProblemKind::tresca_contact_2d;
    p.geometry = Rectangle{1.0, 0.25};
    p.tags.bottom = BoundaryTag::contact;
    p.tags.left = p.tags.right = BoundaryTag::neumann;
    p.material = Material::from_young(1.0, 0.3);
    p.dirichlet = {constant_field(0.02), constant_field(-0.01)};
    p.obstacle = constant_field(0.0);
    p.friction = constant_field(0.02);
    return p;
}

std::shared_ptr<const Mesh> strip_mesh(const ProblemSpec &p, Index n) {
    const Index ny = p.dimension() == 1 ? 0 : std::max<Index>(1, n / 4);
    return std::make_shared<const Mesh>(build_mesh(p.geometry, {n, ny}, p.tags));
}

MixedSolution solve_mixed(const DiscreteSystem &sys) {
    const PrimalSolution s = solve_primal(sys, {1e-12, 200});
    MixedSolution m = extract_multipliers(sys, s.u);
    m.u = make_kinematically_admissible(s.u, sys);
    return m;
}

void BM_Conjugate(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> x(n), f(n), s(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = -1.0 + 2.0 * k / (n - 1);
        f[k] = std::cosh(x[k]);
        s[k] = -2.0 + 4.0 * k / (n - 1);
    }
    const SampledFunction fn(x, f);
    for (auto _ : state)
        benchmark::DoNotOptimize(discrete_conjugate(fn, s));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Conjugate)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oN);

void BM_AssembleTresca(benchmark::State &state) {
    const auto p = tresca();
    const auto mesh = strip_mesh(p, state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble(p, mesh));
}
BENCHMARK(BM_AssembleTresca)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond);

void BM_SolveObstacle(benchmark::State &state) {
    const auto p = parabola_obstacle();
    const auto sys = assemble(p, strip_mesh(p, state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_primal(sys, {1e-12, 200}));
}
BENCHMARK(BM_SolveObstacle)->RangeMultiplier(4)->Range(64, 4096)->Unit(benchmark::kMillisecond);

void BM_SolveTresca(benchmark::State &state) {
    const auto p = tresca();
    const auto sys = assemble(p, strip_mesh(p, state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_primal(sys, {1e-12, 200}));
}
BENCHMARK(BM_SolveTresca)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond);

void BM_RecoverTresca(benchmark::State &state) {
    const auto p = tresca();
    const auto sys = assemble(p, strip_mesh(p, state.range(0)));
    const MixedSolution m = solve_mixed(sys);
    for (auto _ : state)
        benchmark::DoNotOptimize(recover_equilibrated_dual(sys, m));
}
BENCHMARK(BM_RecoverTresca)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond);

void BM_EstimateObstacle(benchmark::State &state) {
    const auto p = parabola_obstacle();
    const auto sys = assemble(p, strip_mesh(p, state.range(0)));
    const MixedSolution m = solve_mixed(sys);
    const AdmissibleDual dual = recover_equilibrated_dual(sys, m);
    for (auto _ : state)
        benchmark::DoNotOptimize(gcre::gcre(m.u, dual, sys));
}
BENCHMARK(BM_EstimateObstacle)->RangeMultiplier(4)->Range(64, 4096)->Unit(benchmark::kMicrosecond);

} // namespace
BENCHMARK_MAIN();
