#include "cvxpoly/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cvxpoly/errors.hpp"

namespace cvxpoly {

namespace {

// Exact binomial for the small arguments used by monomial bases.
std::size_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<std::size_t>(n - k + i) /
             static_cast<std::size_t>(i);
  }
  return result;
}

// Appends all exponent vectors of length (n - pos) summing to `remaining`, in
// descending lexicographic order.
void enumerate_homogeneous(int n, int pos, int remaining,
                           std::vector<int>& current,
                           std::vector<Monomial>& out) {
  if (pos == n - 1) {
    current[static_cast<std::size_t>(pos)] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    current[static_cast<std::size_t>(pos)] = v;
    enumerate_homogeneous(n, pos + 1, remaining - v, current, out);
  }
  current[static_cast<std::size_t>(pos)] = 0;
}

void require_same_vars(int a, int b, const char* op) {
  if (a != b) {
    throw PreconditionFailure(std::string(op) + ": variable count mismatch (" +
                              std::to_string(a) + " vs " + std::to_string(b) +
                              ")");
  }
}

}  // namespace

Monomial::Monomial(int n) : exponents_(static_cast<std::size_t>(n), 0) {}

Monomial::Monomial(std::vector<int> exponents)
    : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw PreconditionFailure("Monomial: negative exponent");
    degree_ += e;
  }
}

Monomial Monomial::variable(int n, int i) {
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  require_same_vars(num_vars(), other.num_vars(), "Monomial::operator*");
  std::vector<int> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
  return Monomial(std::move(e));
}

double Monomial::eval(std::span<const double> x) const {
  double v = 1.0;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    for (int k = 0; k < exponents_[i]; ++k) v *= x[i];
  }
  return v;
}

std::string Monomial::to_string() const {
  if (degree_ == 0) return "1";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (exponents_[i] == 0) continue;
    if (!first) os << '*';
    os << "X" << (i + 1);
    if (exponents_[i] > 1) os << '^' << exponents_[i];
    first = false;
  }
  return os.str();
}

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  // Larger exponent vector first.
  return b.exponents() < a.exponents();
}

std::size_t basis_size(int n, int d) {
  if (d < 0) return 0;
  return binomial(n + d, d);
}

std::size_t grlex_index(const Monomial& m) {
  const int n = m.num_vars();
  const int k = m.degree();
  std::size_t index = basis_size(n, k - 1);
  int remaining = k;
  for (int i = 0; i < n - 1; ++i) {
    const int a = m[i];
    // Vectors whose i-th entry exceeds a (with equal prefix) come first.
    for (int v = a + 1; v <= remaining; ++v) {
      index += binomial(remaining - v + n - i - 2, n - i - 2);
    }
    remaining -= a;
  }
  return index;
}

std::vector<Monomial> homogeneous_monomials(int n, int d) {
  std::vector<Monomial> out;
  if (n < 1 || d < 0) return out;
  out.reserve(binomial(n + d - 1, d));
  std::vector<int> current(static_cast<std::size_t>(n), 0);
  enumerate_homogeneous(n, 0, d, current, out);
  return out;
}

std::vector<Monomial> monomial_basis(int n, int d) {
  if (n < 1) throw PreconditionFailure("monomial_basis: n must be >= 1");
  if (d < 0) throw PreconditionFailure("monomial_basis: d must be >= 0");
  std::vector<Monomial> out;
  out.reserve(basis_size(n, d));
  for (int k = 0; k <= d; ++k) {
    auto level = homogeneous_monomials(n, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

// ---------------------------------------------------------------------------

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  p.add_term(Monomial(n), c);
  return p;
}

Polynomial Polynomial::variable(int n, int i) {
  if (i < 0 || i >= n) throw PreconditionFailure("variable index out of range");
  Polynomial p(n);
  p.add_term(Monomial::variable(n, i), 1.0);
  return p;
}

Polynomial Polynomial::monomial(const Monomial& m, double c) {
  Polynomial p(m.num_vars());
  p.add_term(m, c);
  return p;
}

double Polynomial::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::constant_term() const { return coeff(Monomial(n_)); }

void Polynomial::add_term(const Monomial& m, double c) {
  require_same_vars(n_, m.num_vars(), "Polynomial::add_term");
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) <= kPruneThreshold) {
    const bool was_top = it->first.degree() == degree_;
    terms_.erase(it);
    if (was_top) recompute_degree();
  } else {
    degree_ = std::max(degree_, m.degree());
  }
}

void Polynomial::recompute_degree() {
  degree_ = terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::l1_norm() const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) s += std::abs(c);
  return s;
}

double Polynomial::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) {
    throw PreconditionFailure("eval: point has dimension " +
                              std::to_string(x.size()) + ", expected " +
                              std::to_string(n_));
  }
  double v = 0.0;
  for (const auto& [m, c] : terms_) v += c * m.eval(x);
  return v;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(*this);
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_same_vars(n_, other.n_, "Polynomial::operator+");
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  require_same_vars(n_, other.n_, "Polynomial::operator-");
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    degree_ = 0;
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    if (std::abs(it->second) <= kPruneThreshold) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  recompute_degree();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  require_same_vars(a.n_, b.n_, "Polynomial::operator*");
  Polynomial r(a.n_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      auto [it, inserted] = r.terms_.try_emplace(ma * mb, ca * cb);
      if (!inserted) it->second += ca * cb;
    }
  }
  for (auto it = r.terms_.begin(); it != r.terms_.end();) {
    if (std::abs(it->second) <= Polynomial::kPruneThreshold) {
      it = r.terms_.erase(it);
    } else {
      ++it;
    }
  }
  r.recompute_degree();
  return r;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw PreconditionFailure("Polynomial::pow: negative exponent");
  Polynomial result = constant(n_, 1.0);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::partial(int i) const {
  if (i < 0 || i >= n_) throw PreconditionFailure("partial: index out of range");
  Polynomial r(n_);
  for (const auto& [m, c] : terms_) {
    const int e = m[i];
    if (e == 0) continue;
    std::vector<int> exps = m.exponents();
    exps[static_cast<std::size_t>(i)] -= 1;
    r.add_term(Monomial(std::move(exps)), c * e);
  }
  return r;
}

Polynomial Polynomial::compose(std::span<const Polynomial> images) const {
  if (static_cast<int>(images.size()) != n_) {
    throw PreconditionFailure("compose: expected one image per variable");
  }
  const int target_n = images.empty() ? 0 : images[0].num_vars();
  for (const auto& img : images) {
    require_same_vars(target_n, img.num_vars(), "compose");
  }
  // Cache powers of each image.
  std::vector<std::vector<Polynomial>> powers(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    powers[i].push_back(constant(target_n, 1.0));
  }
  Polynomial result(target_n);
  for (const auto& [m, c] : terms_) {
    Polynomial term = constant(target_n, c);
    for (std::size_t i = 0; i < images.size(); ++i) {
      const int e = m[static_cast<int>(i)];
      while (static_cast<int>(powers[i].size()) <= e) {
        powers[i].push_back(powers[i].back() * images[i]);
      }
      if (e > 0) term = term * powers[i][static_cast<std::size_t>(e)];
    }
    result += term;
  }
  return result;
}

Polynomial Polynomial::embed(int total_vars, int offset) const {
  if (offset < 0 || offset + n_ > total_vars) {
    throw PreconditionFailure("embed: target space too small");
  }
  Polynomial r(total_vars);
  for (const auto& [m, c] : terms_) {
    std::vector<int> e(static_cast<std::size_t>(total_vars), 0);
    for (int i = 0; i < n_; ++i) e[static_cast<std::size_t>(offset + i)] = m[i];
    r.add_term(Monomial(std::move(e)), c);
  }
  return r;
}

bool Polynomial::operator==(const Polynomial& other) const {
  return n_ == other.n_ && terms_ == other.terms_;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    double a = c;
    if (!first) {
      os << (c < 0 ? " - " : " + ");
      a = std::abs(c);
    }
    if (m.degree() == 0) {
      os << a;
    } else if (a == 1.0) {
      os << m.to_string();
    } else if (a == -1.0) {
      os << '-' << m.to_string();
    } else {
      os << a << '*' << m.to_string();
    }
    first = false;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

Derivatives differentiate(const Polynomial& p) {
  const int n = p.num_vars();
  Derivatives d;
  d.gradient.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) d.gradient.push_back(p.partial(i));
  d.hessian.assign(static_cast<std::size_t>(n),
                   std::vector<Polynomial>(static_cast<std::size_t>(n),
                                           Polynomial(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Polynomial hij = d.gradient[static_cast<std::size_t>(i)].partial(j);
      d.hessian[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = hij;
      d.hessian[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          std::move(hij);
    }
  }
  return d;
}

std::vector<std::vector<double>> eval_matrix(const PolynomialMatrix& m,
                                             std::span<const double> x) {
  std::vector<std::vector<double>> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[i].reserve(m[i].size());
    for (const auto& p : m[i]) out[i].push_back(p.eval(x));
  }
  return out;
}

Polynomial theta(int n, int r) {
  Polynomial t = Polynomial::constant(n, 1.0);
  double factorial = 1.0;
  for (int k = 1; k <= r; ++k) {
    factorial *= k;
    for (int i = 0; i < n; ++i) {
      std::vector<int> e(static_cast<std::size_t>(n), 0);
      e[static_cast<std::size_t>(i)] = 2 * k;
      t.add_term(Monomial(std::move(e)), 1.0 / factorial);
    }
  }
  return t;
}

int theta_min_order(const Polynomial& f) { return f.degree() / 2 + 1; }

Polynomial theta_perturbation(const Polynomial& f, double eps, int r) {
  if (!(eps > 0.0)) throw PreconditionFailure("theta_perturbation: eps must be > 0");
  const int r0 = theta_min_order(f);
  if (r < r0) {
    throw PreconditionFailure("theta_perturbation: r = " + std::to_string(r) +
                              " is below r0 = " + std::to_string(r0));
  }
  const int n = f.num_vars();
  return f + eps * (theta(n, r0) + theta(n, r));
}

PolynomialMatrix averaged_hessian_remainder(const Polynomial& f,
                                            std::span<const double> u) {
  const int n = f.num_vars();
  if (static_cast<int>(u.size()) != n) {
    throw PreconditionFailure("averaged_hessian_remainder: dim(u) != n");
  }
  const Derivatives d = differentiate(f);

  // Variables (X_1..X_n, s); X_i -> u_i + s (X_i - u_i).
  const int m = n + 1;
  const Polynomial s = Polynomial::variable(m, n);
  std::vector<Polynomial> images;
  images.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double ui = u[static_cast<std::size_t>(i)];
    images.push_back(Polynomial::constant(m, ui) +
                     s * (Polynomial::variable(m, i) - Polynomial::constant(m, ui)));
  }

  PolynomialMatrix out(static_cast<std::size_t>(n),
                       std::vector<Polynomial>(static_cast<std::size_t>(n),
                                               Polynomial(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const Polynomial along_ray =
          d.hessian[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
              .compose(images);
      Polynomial integrated(n);
      for (const auto& [mono, c] : along_ray.terms()) {
        const long k = mono[n];
        // int_0^1 int_0^t s^k ds dt = 1 / ((k+1)(k+2)).
        const long denom = (k + 1) * (k + 2);
        std::vector<int> e(mono.exponents().begin(), mono.exponents().end() - 1);
        integrated.add_term(Monomial(std::move(e)), c / static_cast<double>(denom));
      }
      out[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = integrated;
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          std::move(integrated);
    }
  }
  return out;
}

Polynomial taylor_reconstruction(const Polynomial& f, std::span<const double> u,
                                 const PolynomialMatrix& remainder) {
  const int n = f.num_vars();
  const Derivatives d = differentiate(f);
  Polynomial r = Polynomial::constant(n, f.eval(u));
  std::vector<Polynomial> shifted;
  shifted.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    shifted.push_back(Polynomial::variable(n, i) -
                      Polynomial::constant(n, u[static_cast<std::size_t>(i)]));
  }
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    r += d.gradient[si].eval(u) * shifted[si];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto si = static_cast<std::size_t>(i);
      const auto sj = static_cast<std::size_t>(j);
      r += shifted[si] * remainder[si][sj] * shifted[sj];
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

SemialgebraicSet::SemialgebraicSet(int n, std::vector<Polynomial> constraints,
                                   std::optional<double> ball_bound)
    : n_(n), constraints_(std::move(constraints)), ball_bound_(ball_bound) {
  if (n < 1) throw PreconditionFailure("SemialgebraicSet: n must be >= 1");
  for (const auto& g : constraints_) {
    if (g.num_vars() != n) {
      throw PreconditionFailure("SemialgebraicSet: constraint variable count mismatch");
    }
  }
  if (ball_bound_ && !(*ball_bound_ > 0.0)) {
    throw PreconditionFailure("SemialgebraicSet: ball bound must be > 0");
  }
}

int SemialgebraicSet::half_degree(int j) const {
  return half_ceil(constraint(j).degree());
}

int SemialgebraicSet::max_half_degree() const {
  int v = 0;
  for (int j = 0; j < num_constraints(); ++j) v = std::max(v, half_degree(j));
  return v;
}

bool SemialgebraicSet::contains(std::span<const double> x, double tol) const {
  for (const auto& g : constraints_) {
    if (g.eval(x) < -tol) return false;
  }
  return true;
}

double SemialgebraicSet::min_constraint_value(std::span<const double> x) const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& g : constraints_) v = std::min(v, g.eval(x));
  return v;
}

}  // namespace cvxpoly
