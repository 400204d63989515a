#pragma once

// Canonical cyclic cover {s^2 = p(x), t^n = q(x)} of (C, w), its deck action,
// holomorphic eigendifferentials and the maps Phi_k.

#include <numeric>
#include <random>
#include <vector>

#include "prymtau/curve.hpp"
#include "prymtau/rational.hpp"

namespace prymtau {

/// Differential f(x) s^{-eps} t^{-b} dx on the cover.  Its deck character is
/// rho^k with k = -b mod n.
struct CharDiff {
  Poly f;
  int eps = 1;
  int b = 0;
  int character(int n) const { return ((-b) % n + n) % n; }
  cplx coefficient(cplx x, cplx s, cplx t) const {
    return f(x) * std::pow(s, -eps) * std::pow(t, -b);
  }
};

/// Monomial x^a s^{-eps} t^{-b} dx.
struct EigenMonomial {
  int a = 0;
  int eps = 1;
  int b = 0;
  CharDiff as_diff() const {
    std::vector<cplx> c(a + 1, 0.0);
    c[a] = 1.0;
    return {Poly(c), eps, b};
  }
  cplx coefficient(cplx x, cplx s, cplx t) const {
    return std::pow(x, a) * std::pow(s, -eps) * std::pow(t, -b);
  }
};

struct EigenDifferentialBasis {
  int k = 0;
  std::vector<EigenMonomial> elements;
  int rank() const { return static_cast<int>(elements.size()); }
};

/// Local ramification data over one value of x (or over infinity).
struct FiberType {
  cplx x{};
  bool infinity = false;
  int mu_p = 0;  // multiplicity of x as a root of p
  int mu_q = 0;  // multiplicity of x as a root of q
  bool at_origin = false;
  int e = 1;     // ramification index
};

struct CyclicCover {
  NDifferential base;
  int n = 1;
  int genus_hat = 0;     // n^2 (g-1) + 1
  int genus_hat_rh = 0;  // from Riemann-Hurwitz
  bool simple = true;
  cplx rho{};
  std::vector<FiberType> fibers;  // finite special fibers, then infinity

  const HyperellipticCurve& curve() const { return base.curve; }
  int genus() const { return base.curve.genus; }
  /// t on deck sheet m over x: rho^m times the principal n-th root of q(x).
  cplx t_principal(cplx x) const { return std::pow(base.q(x), 1.0 / n); }
};

inline int lcm_int(int a, int b) { return a / std::gcd(a, b) * b; }

inline int ramification_index(int mu_p, int mu_q, int n) {
  return lcm_int(2 / std::gcd(mu_p, 2), n / std::gcd(mu_q, n));
}

/// Vanishing order of x^a s^{-eps} t^{-b} dx at the points of a fiber,
/// in the local parameter of the cover (Puiseux orders).
inline Rational monomial_order(const FiberType& f, int n, int deg_p, int deg_q, const EigenMonomial& m) {
  const Rational e(f.e);
  if (f.infinity) {
    return Rational(-m.a) * e + Rational(m.eps) * e * Rational(deg_p, 2) +
           Rational(m.b) * e * Rational(deg_q, n) - e - 1;
  }
  Rational ord = (e - 1) - Rational(m.eps) * e * Rational(f.mu_p, 2) - Rational(m.b) * e * Rational(f.mu_q, n);
  if (f.at_origin) ord += Rational(m.a) * e;
  return ord;
}

inline bool monomial_holomorphic(const CyclicCover& c, const EigenMonomial& m) {
  for (const auto& f : c.fibers) {
    const Rational o = monomial_order(f, c.n, c.curve().degree(), c.base.q.degree(), m);
    if (!o.is_integer()) throw RankMismatch("non-integral valuation");
    if (o < Rational(0)) return false;
  }
  return true;
}

inline CyclicCover build_cover(const NDifferential& w) {
  CyclicCover c;
  c.base = w;
  c.n = w.n;
  c.rho = std::polar(1.0, 2.0 * pi / w.n);
  c.simple = w.simple_stratum;
  const int g = w.curve.genus;
  c.genus_hat = w.n * w.n * (g - 1) + 1;
  const double tol = 1e-9;
  auto add_fiber = [&](cplx x, int mp, int mq) {
    for (auto& f : c.fibers)
      if (std::abs(f.x - x) < tol) {
        f.mu_p += mp;
        f.mu_q += mq;
        return;
      }
    FiberType f;
    f.x = x;
    f.mu_p = mp;
    f.mu_q = mq;
    f.at_origin = std::abs(x) < tol;
    c.fibers.push_back(f);
  };
  for (const auto& b : w.curve.branch_points) add_fiber(b, 1, 0);
  for (const auto& [r, m] : w.q_roots()) add_fiber(r, 0, m);
  for (auto& f : c.fibers) f.e = ramification_index(f.mu_p, f.mu_q, w.n);
  FiberType inf;
  inf.infinity = true;
  inf.e = lcm_int(2 / std::gcd(w.curve.degree(), 2), w.n / std::gcd(w.q.degree(), w.n));
  c.fibers.push_back(inf);
  // Riemann-Hurwitz for the degree-2n map to the x-sphere
  int total = -4 * w.n;
  for (const auto& f : c.fibers) total += 2 * w.n - 2 * w.n / f.e;
  c.genus_hat_rh = total / 2 + 1;
  if (c.simple && c.genus_hat != c.genus_hat_rh)
    throw RankMismatch("genus formula and Riemann-Hurwitz disagree");
  return c;
}

/// Holomorphic monomial eigendifferentials with character rho^k.
inline EigenDifferentialBasis eigen_basis(const CyclicCover& c, int k) {
  if (k < 0 || k >= c.n) throw DimensionMismatch("k out of range");
  EigenDifferentialBasis B;
  B.k = k;
  const int b = (c.n - k) % c.n;
  for (int eps = 1; eps >= 0; --eps) {
    const int amax = 4 * c.n * (c.genus() + 2);
    for (int a = 0; a <= amax; ++a) {
      EigenMonomial m{a, eps, b};
      if (monomial_holomorphic(c, m)) B.elements.push_back(m);
    }
  }
  const int g = c.genus();
  const int want = k == 0 ? g : (2 * c.n - 2 * k + 1) * (g - 1);
  if (c.simple && B.rank() != want)
    throw RankMismatch("rank " + std::to_string(B.rank()) + " for k=" + std::to_string(k) +
                       ", expected " + std::to_string(want));
  return B;
}

/// v = t dx/s = q(x) s^{-1} t^{-(n-1)} dx.
inline CharDiff canonical_v(const CyclicCover& c) { return {c.base.q, 1, c.n - 1}; }

/// Vanishing order of v at the ramification points over a fiber.
inline Rational v_order(const CyclicCover& c, const FiberType& f) {
  const Rational e(f.e);
  if (f.infinity)
    return e * Rational(c.curve().degree(), 2) - e * Rational(c.base.q.degree(), c.n) - e - 1;
  return (e - 1) - e * Rational(f.mu_p, 2) + e * Rational(f.mu_q, c.n);
}

struct CoverPoint {
  cplx x, s, t;
};

inline CoverPoint random_cover_point(const CyclicCover& c, std::mt19937_64& rng, double box = 2.0) {
  std::uniform_real_distribution<double> U(-box, box);
  std::uniform_int_distribution<int> S(0, 1), M(0, c.n - 1);
  const cplx x(U(rng), U(rng));
  const cplx s = (S(rng) ? 1.0 : -1.0) * c.curve().s_principal(x);
  const cplx t = std::pow(c.rho, M(rng)) * c.t_principal(x);
  return {x, s, t};
}

inline int eigen_rank_formula(int g, int n, int k) { return k == 0 ? g : (2 * n - 2 * k + 1) * (g - 1); }

/// g + sum_k (2n-2k+1)(g-1) == n^2 (g-1) + 1.
inline bool rank_sum_identity(int g, int n) {
  int s = g;
  for (int k = 1; k < n; ++k) s += (2 * n - 2 * k + 1) * (g - 1);
  return s == n * n * (g - 1) + 1;
}

/// Rank of the evaluation matrix of a list of differentials at `npts` random points.
inline int evaluation_rank(const CyclicCover& c, const std::vector<EigenMonomial>& elems, int npts,
                           std::uint64_t seed, double tol = 1e-8) {
  std::mt19937_64 rng(seed);
  CMat M(npts, elems.size());
  for (int i = 0; i < npts; ++i) {
    const CoverPoint P = random_cover_point(c, rng);
    for (std::size_t j = 0; j < elems.size(); ++j) M(i, j) = elems[j].coefficient(P.x, P.s, P.t);
  }
  for (Eigen::Index j = 0; j < M.cols(); ++j) M.col(j).normalize();
  Eigen::JacobiSVD<CMat> svd(M);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv(i) > tol * sv(0);
  return r;
}

/// Matrix of u -> u v^{n-k} from the monomial basis of Lambda^(k) to the
/// monomial basis of (n-k+1)-differentials on C.  Computed by collocation.
inline CMat phi_k_matrix(const CyclicCover& c, int k, const EigenDifferentialBasis& src,
                         const std::vector<KDiffMonomial>& dst, std::uint64_t seed = 7) {
  if (k < 1 || k >= c.n) throw SizeMismatch("k must satisfy 1 <= k <= n-1");
  if (src.rank() != static_cast<int>(dst.size())) throw SizeMismatch("basis sizes differ");
  const int N = c.n - k + 1;
  const int npts = 3 * src.rank();
  std::mt19937_64 rng(seed);
  CMat T(npts, dst.size()), S(npts, src.rank());
  const CharDiff v = canonical_v(c);
  for (int i = 0; i < npts; ++i) {
    const CoverPoint P = random_cover_point(c, rng, 1.5);
    const cplx vpow = std::pow(v.coefficient(P.x, P.s, P.t), c.n - k);
    for (std::size_t j = 0; j < dst.size(); ++j) {
      if (dst[j].k != N) throw SizeMismatch("target basis has wrong tensor degree");
      T(i, j) = dst[j].value(P.x, P.s);
    }
    for (int j = 0; j < src.rank(); ++j) S(i, j) = src.elements[j].coefficient(P.x, P.s, P.t) * vpow;
  }
  CMat Phi = T.colPivHouseholderQr().solve(S);
  if ((T * Phi - S).norm() > 1e-8 * S.norm()) throw SizeMismatch("image does not descend to C");
  return Phi;
}

}  // namespace prymtau
