// Throughput benchmarks for the hot paths: ensemble generation, the
// classical reductions, operator-algebra verification, state preparation,
// and the counting simulator. Run with --benchmark_filter=<regex> to
// focus on one.

#include <benchmark/benchmark.h>

#include <hops/ensemble.hpp>
#include <hops/fock.hpp>
#include <hops/measurement.hpp>
#include <hops/pcmi.hpp>

namespace {

hops::FieldEnsemble make_hidden(std::size_t n) {
  return hops::generate_ensemble(hops::EnsembleKind::hops(hops::pi / 3, 0.5),
                                 {hops::AmplitudeDist::constant(1.0), 42}, n);
}

void BM_GenerateEnsemble(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto ens = make_hidden(n);
    benchmark::DoNotOptimize(ens.samples.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_GenerateEnsemble)->Arg(1000)->Arg(100000);

void BM_ClassicalStokes(benchmark::State& state) {
  const auto ens = make_hidden(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto s = hops::classical_stokes(ens);
    benchmark::DoNotOptimize(s.s3);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_ClassicalStokes)->Arg(100000);

void BM_RandomnessAudit(benchmark::State& state) {
  const auto ens = make_hidden(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto audit = hops::randomness_audit(ens);
    benchmark::DoNotOptimize(audit.classification);
  }
}
BENCHMARK(BM_RandomnessAudit)->Arg(100000);

void BM_VerifyAlgebra(benchmark::State& state) {
  const hops::FockSpace space(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto report = hops::verify_algebra(space);
    benchmark::DoNotOptimize(report.all_pass);
  }
}
BENCHMARK(BM_VerifyAlgebra)->DenseRange(3, 6);

void BM_HopsMixture(benchmark::State& state) {
  const hops::FockSpace space(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto rho = hops::hops_mixture(hops::pi / 2, 0.0, 0.7, 64, space);
    benchmark::DoNotOptimize(rho.rho.data());
  }
}
BENCHMARK(BM_HopsMixture)->Arg(8)->Arg(10)->Arg(12);

void BM_FactorizationCheck(benchmark::State& state) {
  const hops::FockSpace space(12);
  const auto rho = hops::hops_mixture(hops::pi / 2, 0.0, 0.7, 64, space);
  for (auto _ : state) {
    auto report = hops::check_factorization(rho, {1.0, 0.0},
                                            hops::CriterionKind::Hops, 2);
    benchmark::DoNotOptimize(report.worst_residual);
  }
}
BENCHMARK(BM_FactorizationCheck);

void BM_PcmiRun(benchmark::State& state) {
  const auto ens = hops::generate_ensemble(
      hops::EnsembleKind::polarized(hops::pi / 2, 0.7),
      {hops::AmplitudeDist::rayleigh(1.0), 7},
      static_cast<std::size_t>(state.range(0)));
  const hops::DeviceConfig config;
  for (auto _ : state) {
    auto out = hops::pcmi_run(ens, config);
    benchmark::DoNotOptimize(out.samples.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_PcmiRun)->Arg(10000);

void BM_SimulateCounts(benchmark::State& state) {
  const auto ens = make_hidden(1000);
  for (auto _ : state) {
    auto records =
        hops::simulate_counts(ens, hops::Scheme::Direct, {1.0},
                              static_cast<std::size_t>(state.range(0)), 99);
    benchmark::DoNotOptimize(records.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          1000 * state.range(0));
}
BENCHMARK(BM_SimulateCounts)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
