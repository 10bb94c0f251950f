#include <benchmark/benchmark.h>

#include <saddlekit/am.hpp>
#include <saddlekit/problems.hpp>
#include <saddlekit/saddle.hpp>
#include <saddlekit/vr.hpp>

using namespace saddlekit;

namespace {

QuadraticSaddleInstance bench_instance(int d, int m_G) {
  GenerateTargets t;
  t.dx = t.dy = d;
  t.L_f = 2;
  t.mu_x = 0.3;
  t.L_G = 1;
  t.L_h = 2;
  t.mu_y = 0.3;
  t.m_G = m_G;
  return generate(t, 1);
}

void BM_Generate(benchmark::State& state) {
  GenerateTargets t;
  t.dx = t.dy = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate(t, 1));
  }
}
BENCHMARK(BM_Generate)->Arg(8)->Arg(32)->Arg(128);

void BM_AmIteration(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  QuadraticSaddleInstance in = bench_instance(d, 1);
  Mat A = in.A;
  Vec a = in.a;
  CountedOracle phi(
      [A, a](const Vec& x) {
        return Eval{0.5 * x.dot(A * x) + a.dot(x), Vec(A * x + a)};
      },
      OracleSpec::exact(in.L_f, in.mu_x), OracleClass::GradF, nullptr, 1, d,
      in.L_f);
  ProxSolver prox = [&](const Vec& g, const Vec& c, double H, double, double) {
    return quadratic_prox(g, A, a, H, c);
  };
  AMConfig cfg;
  cfg.H = 2 * in.L_f;
  cfg.max_iter = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        am_run(phi, CountedOracle::zero(d), prox, cfg, Vec::Zero(d)));
  }
  state.SetItemsProcessed(state.iterations() * cfg.max_iter);
}
BENCHMARK(BM_AmIteration)->Arg(8)->Arg(32);

void BM_SlidingMaxEval(benchmark::State& state) {
  QuadraticSaddleInstance in = bench_instance(8, 1);
  auto ledger = make_ledger();
  SaddleProblem p = make_saddle_problem(in, ledger);
  SlidingMaxOracle s(p, 2 * in.L_G, Vec::Zero(8), 1e-6, 0.0, SlidingH::HgeG);
  CountedOracle o = s.oracle();
  Vec x = Vec::Ones(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(o(x));
  }
}
BENCHMARK(BM_SlidingMaxEval);

void BM_SagaStep(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  QuadraticSaddleInstance in = bench_instance(6, m);
  auto ledger = make_ledger();
  SaddleProblem p = make_saddle_problem(in, ledger);
  SagaSaddleProblem sp;
  sp.m = m;
  sp.dx = sp.dy = 6;
  sp.Gx_i = p.Gx_i;
  sp.Gy_i = p.Gy_i;
  sp.L_G_i = p.L_G_i;
  sp.mu_x = in.mu_x;
  sp.mu_y = in.mu_y;
  sp.prox_f = p.prox_f;
  sp.prox_h = p.prox_h;
  SagaReport rep;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        saga_sp_solve(sp, 1e-4, 0.2, 3, Vec::Zero(6), Vec::Zero(6), 1.0, &rep));
    state.PauseTiming();
    state.counters["steps"] = static_cast<double>(rep.iterations);
    state.ResumeTiming();
  }
}
BENCHMARK(BM_SagaStep)->Arg(4)->Arg(16);

void BM_FrameworkSolve(benchmark::State& state) {
  QuadraticSaddleInstance in = bench_instance(5, 1);
  for (auto _ : state) {
    auto ledger = make_ledger();
    SaddleProblem p = make_saddle_problem(in, ledger);
    benchmark::DoNotOptimize(solve_saddle(p, 1e-3, 0.0));
  }
}
BENCHMARK(BM_FrameworkSolve);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
