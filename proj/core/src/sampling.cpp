#include "cvxpoly/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace cvxpoly {

namespace {

// g = c + b.x - x^T Q x with Q positive definite: an ellipsoid.
std::optional<Box> ellipsoid_box(const Polynomial& g, int n) {
  if (g.degree() != 2) return std::nullopt;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  double c = 0.0;
  for (const auto& [m, coef] : g.terms()) {
    if (m.degree() == 0) {
      c = coef;
    } else if (m.degree() == 1) {
      for (int i = 0; i < n; ++i) {
        if (m[i] == 1) b(i) = coef;
      }
    } else {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i) {
        for (int e = 0; e < m[i]; ++e) idx.push_back(i);
      }
      if (idx[0] == idx[1]) {
        q(idx[0], idx[0]) -= coef;
      } else {
        q(idx[0], idx[1]) -= coef / 2.0;
        q(idx[1], idx[0]) -= coef / 2.0;
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(q);
  if (llt.info() != Eigen::Success) return std::nullopt;
  if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues()(0) <= 1e-12) {
    return std::nullopt;
  }
  // g = c + x0^T Q x0 - (x - x0)^T Q (x - x0), x0 = Q^{-1} b / 2.
  const Eigen::VectorXd x0 = llt.solve(b) / 2.0;
  const double level = c + x0.dot(q * x0);
  if (level < 0.0) return std::nullopt;
  const Eigen::MatrixXd qinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  Box box;
  for (int i = 0; i < n; ++i) {
    const double half = std::sqrt(level * qinv(i, i));
    box.lo.push_back(x0(i) - half);
    box.hi.push_back(x0(i) + half);
  }
  return box;
}

}  // namespace

std::optional<Box> bounding_box(const SemialgebraicSet& k) {
  const int n = k.num_vars();
  std::optional<Box> out;
  auto intersect = [&](const Box& b) {
    if (!out) {
      out = b;
      return;
    }
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      out->lo[u] = std::max(out->lo[u], b.lo[u]);
      out->hi[u] = std::min(out->hi[u], b.hi[u]);
    }
  };
  if (k.ball_bound()) {
    const double m = *k.ball_bound();
    intersect(Box{Point(static_cast<std::size_t>(n), -m), Point(static_cast<std::size_t>(n), m)});
  }
  for (const auto& g : k.constraints()) {
    if (auto b = ellipsoid_box(g, n)) intersect(*b);
  }
  return out;
}

Box bounding_box_or(const SemialgebraicSet& k, double fallback) {
  if (auto b = bounding_box(k)) return *b;
  const auto n = static_cast<std::size_t>(k.num_vars());
  return Box{Point(n, -fallback), Point(n, fallback)};
}

std::vector<Point> sample_box(const Box& box, int count, std::mt19937_64& rng) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < count; ++s) {
    Point x(box.lo.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Point> sample_set(const SemialgebraicSet& k, const Box& box, int count,
                              std::mt19937_64& rng, double tol, int max_draws) {
  std::vector<Point> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Point x(box.lo.size());
  for (int draw = 0; draw < max_draws && static_cast<int>(out.size()) < count; ++draw) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    }
    if (k.contains(x, tol)) out.push_back(x);
  }
  return out;
}

Point project_to_zero_set(const Polynomial& g, Point x, int iterations) {
  const int n = g.num_vars();
  std::vector<Polynomial> grad;
  for (int i = 0; i < n; ++i) grad.push_back(g.partial(i));
  for (int it = 0; it < iterations; ++it) {
    const double v = g.eval(x);
    if (v == 0.0) break;
    Point dg(static_cast<std::size_t>(n));
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      dg[static_cast<std::size_t>(i)] = grad[static_cast<std::size_t>(i)].eval(x);
      norm2 += dg[static_cast<std::size_t>(i)] * dg[static_cast<std::size_t>(i)];
    }
    if (norm2 < std::numeric_limits<double>::min()) break;
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] -= v * dg[static_cast<std::size_t>(i)] / norm2;
    }
  }
  return x;
}

double hessian_min_eigenvalue(const Polynomial& f, std::span<const double> x) {
  const int n = f.num_vars();
  const Derivatives d = differentiate(f);
  const auto h = eval_matrix(d.hessian, x);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()(0);
}

double sampled_min_curvature(const Polynomial& f, const std::vector<Point>& points) {
  const int n = f.num_vars();
  const Derivatives d = differentiate(f);
  double worst = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd m(n, n);
  for (const auto& x : points) {
    const auto h = eval_matrix(d.hessian, x);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        m(i, j) = h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
    worst = std::min(worst, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                m, Eigen::EigenvaluesOnly)
                                .eigenvalues()(0));
  }
  return worst;
}

}  // namespace cvxpoly
