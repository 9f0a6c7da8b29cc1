// Serial reference against the OpenMP kernels on the solver, the analyzer
// and the upper-bound oracle.

#include <benchmark/benchmark.h>

#include "tightbound/analyzer.hpp"
#include "tightbound/oracle.hpp"
#include "tightbound/sdl.hpp"

using namespace tightbound;

namespace {

Execution mode(const benchmark::State& st) { return st.range(0) ? Execution::Parallel : Execution::Serial; }

const char* kTwoPhaseCounted = R"(
loop X1 {
  X6 := X6 + X5;
  loop X2 + X3 { X6 := X6 + X5;
    choose { X3 := X1; X2 := X4 } or { X3 := X4; X2 := X1 }
  };
  X4 := X2 + X3
};
loop X4 { X6 := X6 + X5;
  choose { X3 := X1 + X2 + X3 } or { X3 := X2; X2 := X1 }
})";

void BM_SolveTriangular(benchmark::State& st) {
  const SdlProblem prob{{parse_multipoly("<x1+x2, x2+x3, x3, x3>")}, 4, {}};
  for (auto _ : st) benchmark::DoNotOptimize(solve_sdl(prob, mode(st)));
}

void BM_SolveTwoTransitions(benchmark::State& st) {
  const SdlProblem prob{{parse_multipoly("<x1+x2, x2+x3*x4, x3, x4+x3>"), parse_multipoly("<x1+x3, x4, x2, x4>")}, 4, {}};
  for (auto _ : st) benchmark::DoNotOptimize(solve_sdl(prob, mode(st)));
}

void BM_AnalyzeTwoPhaseCounted(benchmark::State& st) {
  const Program p = parse(kTwoPhaseCounted);
  AnalysisOptions o;
  o.exec = mode(st);
  for (auto _ : st) benchmark::DoNotOptimize(analyze_program(p, o));
}

void BM_AnalyzeAdversarial(benchmark::State& st) {
  const Program p = gen_adversarial(8, 2);
  AnalysisOptions o;
  o.exec = mode(st);
  for (auto _ : st) benchmark::DoNotOptimize(analyze_program(p, o));
}

void BM_CheckUpperGrid(benchmark::State& st) {
  const Program p = parse("loop X1 { choose { X2 := X2 + X3 } or { X3 := X2 * X4 } }; X4 := X4 + X1");
  const AnalysisReport r = analyze_program(p);
  const Grid g = Grid::uniform(4, 0, 4);
  for (auto _ : st) benchmark::DoNotOptimize(check_upper(p, r, g, 64, {}, mode(st)));
}

}  // namespace

BENCHMARK(BM_SolveTriangular)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SolveTwoTransitions)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnalyzeTwoPhaseCounted)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnalyzeAdversarial)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckUpperGrid)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
