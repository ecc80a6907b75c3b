#include <benchmark/benchmark.h>

#include <cmath>

#include "nqlab/control.hpp"
#include "nqlab/dynamics.hpp"
#include "nqlab/goldbach_cascade.hpp"
#include "nqlab/lattice.hpp"
#include "nqlab/numtheory.hpp"
#include "nqlab/spectral.hpp"

using namespace nqlab;

namespace {

struct PrimeWell {
    Potential pot;
    EigenBasis basis;
    PrimeWell() {
        const auto s = target_spectrum({SequenceKind::Primes, 20, {}});
        pot = synthesize_potential(s, recommended_grid(s)).potential;
        basis = solve_states(pot, 60);
    }
};

const PrimeWell& well() {
    static const PrimeWell w;
    return w;
}

void BM_Sieve(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(PrimeTable(state.range(0)).count());
}
BENCHMARK(BM_Sieve)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_NltCensus(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(nlt_census(state.range(0)).count);
}
BENCHMARK(BM_NltCensus)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_Synthesis(benchmark::State& state) {
    const auto s = target_spectrum({SequenceKind::LnNaturals, static_cast<int>(state.range(0)), {}});
    const Grid g = recommended_grid(s);
    for (auto _ : state) benchmark::DoNotOptimize(synthesize_potential(s, g).report.final_residual);
}
BENCHMARK(BM_Synthesis)->Arg(30)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_GridStep(benchmark::State& state) {
    const auto& w = well();
    GridPropagator prop(w.pot, drive_profile(w.pot, DriveForm::Linear));
    Eigen::VectorXcd psi = prop.to_grid(w.basis, basis_state(w.basis.size(), 0));
    for (auto _ : state) prop.step(psi, 0.1, 0.01);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GridStep);

void BM_EigenbasisStep(benchmark::State& state) {
    const auto& w = well();
    const auto F = operator_matrix(w.basis, drive_profile(w.pot, DriveForm::Linear), static_cast<int>(state.range(0)));
    const std::vector<double> e(w.basis.energies.begin(), w.basis.energies.begin() + state.range(0));
    EigenbasisPropagator prop(e, F);
    Eigen::VectorXcd c = basis_state(prop.size(), 0);
    for (auto _ : state) prop.step(c, 0.1, 0.01);
}
BENCHMARK(BM_EigenbasisStep)->Arg(20)->Arg(60);

void BM_LatticeDiagonalize(benchmark::State& state) {
    const int half = static_cast<int>(state.range(0));
    const ExponentialLattice lat(1.0, 0.3, -half, half);
    for (auto _ : state) benchmark::DoNotOptimize(diagonalize(lat).states.size());
}
BENCHMARK(BM_LatticeDiagonalize)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_GrapeObjective(benchmark::State& state) {
    const auto& w = well();
    ControlProblem p;
    const ControlSystem sys(w.pot, w.basis, p);
    const auto b = initial_guess(sys, 1, GrapeOptions{});
    std::vector<double> g;
    for (auto _ : state) benchmark::DoNotOptimize(sys.objective(b, &g));
}
BENCHMARK(BM_GrapeObjective)->Unit(benchmark::kMillisecond);

void BM_GoldbachClassify(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(classify_transitions(state.range(0)).first_assisted);
}
BENCHMARK(BM_GoldbachClassify)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
