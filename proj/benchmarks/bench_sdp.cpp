#include <random>

#include <benchmark/benchmark.h>

#include "cvxpoly/sdp.hpp"

namespace {

using Eigen::MatrixXd;

// Random strictly feasible SDP: one block of size s, m constraints.
cvxpoly::SdpProblem make_problem(int s, int m, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto sym = [&] {
    MatrixXd a(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) a(i, j) = nd(rng);
    return MatrixXd(0.5 * (a + a.transpose()));
  };
  const MatrixXd x0 = MatrixXd::Identity(s, s);
  cvxpoly::SdpProblem p;
  p.block_sizes = {s};
  p.objective = {MatrixXd::Identity(s, s)};
  for (int i = 0; i < m; ++i) {
    const MatrixXd a = sym();
    p.objective[0] += 0.1 * nd(rng) * a;
    p.constraints.push_back({{{0, a}}, a.cwiseProduct(x0).sum()});
  }
  return p;
}

void BM_SolveDense(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const auto p = make_problem(s, m, 7);
  for (auto _ : state) {
    auto sol = cvxpoly::solve_sdp(p);
    benchmark::DoNotOptimize(sol.primal_value);
  }
  state.counters["m"] = m;
}
BENCHMARK(BM_SolveDense)->Args({10, 20})->Args({20, 60})->Args({40, 200})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
