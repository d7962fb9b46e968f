#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cvxpoly {

/// A multi-index alpha in N^n, i.e. the monomial X^alpha.
class Monomial {
 public:
  Monomial() = default;
  /// The constant monomial in `n` variables.
  explicit Monomial(int n);
  explicit Monomial(std::vector<int> exponents);

  static Monomial variable(int n, int i);

  int num_vars() const { return static_cast<int>(exponents_.size()); }
  int degree() const { return degree_; }
  const std::vector<int>& exponents() const { return exponents_; }
  int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }

  Monomial operator*(const Monomial& other) const;
  double eval(std::span<const double> x) const;

  bool operator==(const Monomial& other) const {
    return exponents_ == other.exponents_;
  }

  std::string to_string() const;

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// Graded lexicographic order: lower total degree first; within a degree the
/// lexicographically larger exponent vector comes first, so for n=2 the order
/// is 1, X1, X2, X1^2, X1 X2, X2^2, ...
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Number of monomials of degree <= d in n variables, C(n+d, d).
std::size_t basis_size(int n, int d);

/// Position of `m` in monomial_basis(n, deg m) (and every larger basis).
std::size_t grlex_index(const Monomial& m);

/// All monomials of degree <= d in n variables, in graded-lex order.
std::vector<Monomial> monomial_basis(int n, int d);

/// Monomials of degree exactly d, in graded-lex order.
std::vector<Monomial> homogeneous_monomials(int n, int d);

/// Sparse multivariate polynomial with real coefficients.
///
/// Terms with |coefficient| <= kPruneThreshold are never stored, so the
/// cached degree always reflects a nonzero term.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GrlexLess>;
  static constexpr double kPruneThreshold = 1e-12;

  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {}

  static Polynomial constant(int n, double c);
  static Polynomial variable(int n, int i);
  static Polynomial monomial(const Monomial& m, double c = 1.0);

  int num_vars() const { return n_; }
  /// Total degree; the zero polynomial has degree 0.
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  double coeff(const Monomial& m) const;
  double constant_term() const;

  /// Adds c * X^alpha, pruning the result if it cancels.
  void add_term(const Monomial& m, double c);

  double l1_norm() const;
  double eval(std::span<const double> x) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  Polynomial pow(int k) const;

  /// d/dX_i.
  Polynomial partial(int i) const;

  /// Substitutes X_i -> images[i]; all images share one variable count,
  /// which becomes the variable count of the result.
  Polynomial compose(std::span<const Polynomial> images) const;

  /// Re-embeds this polynomial into `total_vars` variables, mapping X_i to
  /// X_{offset+i}. Used to build polynomials in (X, Y) or (X, W).
  Polynomial embed(int total_vars, int offset) const;

  bool operator==(const Polynomial& other) const;

  std::string to_string() const;

 private:
  void recompute_degree();

  int n_ = 0;
  TermMap terms_;
  int degree_ = 0;
};

using PolynomialMatrix = std::vector<std::vector<Polynomial>>;

struct Derivatives {
  std::vector<Polynomial> gradient;
  PolynomialMatrix hessian;  // symmetric, n x n
};

Derivatives differentiate(const Polynomial& p);

/// Evaluates a matrix of polynomials at x (row-major nested vectors).
std::vector<std::vector<double>> eval_matrix(const PolynomialMatrix& m,
                                             std::span<const double> x);

/// theta_r(X) = 1 + sum_{k=1..r} sum_i X_i^{2k} / k!
Polynomial theta(int n, int r);

/// Smallest admissible r for theta_perturbation: floor(deg f / 2) + 1.
int theta_min_order(const Polynomial& f);

/// f + eps (theta_{r0} + theta_r) with r0 = theta_min_order(f).
Polynomial theta_perturbation(const Polynomial& f, double eps, int r);

/// F(X,u) = int_0^1 int_0^t Hess f(u + s (X - u)) ds dt, computed term-wise
/// with the exact weights 1 / ((k+1)(k+2)) for the s^k components, so that
/// f(X) = f(u) + grad f(u).(X-u) + (X-u)^T F(X,u) (X-u).
PolynomialMatrix averaged_hessian_remainder(const Polynomial& f,
                                            std::span<const double> u);

/// Right-hand side of the averaged-Hessian identity at u, as a polynomial.
Polynomial taylor_reconstruction(const Polynomial& f, std::span<const double> u,
                                 const PolynomialMatrix& remainder);

/// {x in R^n : g_j(x) >= 0 for all j}, optionally with a ball bound M used
/// for the redundant constraint M^2 - |X|^2 >= 0.
class SemialgebraicSet {
 public:
  SemialgebraicSet(int n, std::vector<Polynomial> constraints,
                   std::optional<double> ball_bound = std::nullopt);

  int num_vars() const { return n_; }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const std::vector<Polynomial>& constraints() const { return constraints_; }
  const Polynomial& constraint(int j) const {
    return constraints_[static_cast<std::size_t>(j)];
  }
  const std::optional<double>& ball_bound() const { return ball_bound_; }

  /// r_j = ceil(deg g_j / 2).
  int half_degree(int j) const;
  int max_half_degree() const;

  bool contains(std::span<const double> x, double tol = 0.0) const;
  /// min_j g_j(x).
  double min_constraint_value(std::span<const double> x) const;

 private:
  int n_;
  std::vector<Polynomial> constraints_;
  std::optional<double> ball_bound_;
};

/// Ceil(d / 2) for nonnegative d.
inline int half_ceil(int d) { return (d + 1) / 2; }

}  // namespace cvxpoly
