#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cvxpoly/polynomial.hpp"

namespace cvxpoly {

using Point = std::vector<double>;

struct Box {
  Point lo;
  Point hi;

  int dim() const { return static_cast<int>(lo.size()); }
};

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// A box known to contain K: from the ball bound, or from a quadratic
/// constraint with negative definite Hessian (an ellipsoid). Empty when K
/// carries no such information.
std::optional<Box> bounding_box(const SemialgebraicSet& k);

/// bounding_box(k), or the cube [-fallback, fallback]^n.
Box bounding_box_or(const SemialgebraicSet& k, double fallback);

std::vector<Point> sample_box(const Box& box, int count, std::mt19937_64& rng);

/// Up to `count` points of K (within `tol`) by rejection from `box`, giving
/// up after `max_draws` draws.
std::vector<Point> sample_set(const SemialgebraicSet& k, const Box& box, int count,
                              std::mt19937_64& rng, double tol = 0.0,
                              int max_draws = 200000);

/// Newton iteration x <- x - g(x) grad g(x) / |grad g(x)|^2 towards the zero
/// set of g. Stops after `iterations` steps or when the gradient vanishes.
Point project_to_zero_set(const Polynomial& g, Point x, int iterations = 60);

/// Smallest eigenvalue of the Hessian of f at x.
double hessian_min_eigenvalue(const Polynomial& f, std::span<const double> x);

/// Minimum of hessian_min_eigenvalue over the sample points.
double sampled_min_curvature(const Polynomial& f, const std::vector<Point>& points);

}  // namespace cvxpoly
