#include <benchmark/benchmark.h>

#include "cvxpoly/convexcert.hpp"
#include "cvxpoly/hierarchy.hpp"

namespace {

using cvxpoly::Polynomial;

cvxpoly::SemialgebraicSet hyperbola_disk() {
  const auto x = Polynomial::variable(2, 0);
  const auto y = Polynomial::variable(2, 1);
  const auto c = [](double v) { return Polynomial::constant(2, v); };
  return cvxpoly::SemialgebraicSet(
      2, {x * y - c(0.25), c(0.5) - (x - c(0.5)).pow(2) - (y - c(0.5)).pow(2)});
}

void BM_QrOrder(benchmark::State& state) {
  const cvxpoly::PolyOptProblem problem(Polynomial::variable(2, 0), hyperbola_disk());
  const int r = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto prog = cvxpoly::build_qr(problem, r);
    auto sol = cvxpoly::solve_sdp(prog.sdp());
    benchmark::DoNotOptimize(sol.dual_value);
  }
}
BENCHMARK(BM_QrOrder)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_RhoProgram(benchmark::State& state) {
  const auto k = hyperbola_disk();
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto prog = cvxpoly::rho_program(k, 0, d);
    auto sol = cvxpoly::solve_sdp(prog.sdp());
    benchmark::DoNotOptimize(sol.dual_value);
  }
}
BENCHMARK(BM_RhoProgram)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_QhatDisk(benchmark::State& state) {
  const auto x = Polynomial::variable(2, 0);
  const auto y = Polynomial::variable(2, 1);
  const auto one = Polynomial::constant(2, 1.0);
  const cvxpoly::PolyOptProblem problem(
      (x - one).pow(2) + (y - one).pow(2),
      cvxpoly::SemialgebraicSet(2, {one - x.pow(2) - y.pow(2)}));
  for (auto _ : state) {
    auto report = cvxpoly::solve_hierarchy(problem);
    benchmark::DoNotOptimize(report.relaxations.size());
  }
}
BENCHMARK(BM_QhatDisk)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
