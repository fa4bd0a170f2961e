#include <benchmark/benchmark.h>

#include "mutakill/kill_defs.hpp"
#include "mutakill/monotonicity.hpp"
#include "mutakill/sim_gen.hpp"
#include "mutakill/stats.hpp"

namespace {

using namespace mutakill;

void BM_FisherExact(benchmark::State& state) {
  const stats::ContingencyTable table{static_cast<std::int64_t>(state.range(0)),
                                      state.range(0) / 3, state.range(0) / 2,
                                      state.range(0) / 2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::fisher_exact(table).p_value);
  }
}
BENCHMARK(BM_FisherExact)->Arg(20)->Arg(200)->Arg(2000);

void BM_KdfFullMatrix(benchmark::State& state) {
  ScenarioSpec spec;
  spec.n_inputs = static_cast<std::size_t>(state.range(0));
  spec.r_orig = spec.r_mut = 20;
  spec.blocks = {{spec.n_inputs / 2, 0.95, 0.7}, {spec.n_inputs - spec.n_inputs / 2, 0.8, 0.8}};
  spec.seed = 7;
  const MatrixPair pair = generate(spec);
  const auto columns = all_columns(spec.n_inputs);
  const KillParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kdf_killed(pair.original, pair.mutant, columns, params).killed);
  }
}
BENCHMARK(BM_KdfFullMatrix)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_AuditAdversarial(benchmark::State& state) {
  const MatrixPair pair = adversarial_kd1(20, 100, 9900);
  AuditInputs inputs;
  inputs.original_correctness = &pair.original;
  inputs.mutant_correctness = &pair.mutant;
  AuditConfig cfg;
  cfg.definition = state.range(0) == 0 ? KillDefinition::kd1 : KillDefinition::kdf;
  for (auto _ : state) {
    benchmark::DoNotOptimize(audit(inputs, cfg).witness_pair_count);
  }
}
BENCHMARK(BM_AuditAdversarial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state) {
  ScenarioSpec spec;
  spec.n_inputs = static_cast<std::size_t>(state.range(0));
  spec.r_orig = spec.r_mut = 20;
  spec.blocks = {{spec.n_inputs, 0.9, 0.6}};
  spec.seed = 42;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate(spec).original.bits.rows());
  }
}
BENCHMARK(BM_Generate)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
