#pragma once

// Hyperelliptic base curves s^2 = p(x), split n-differentials
// w = q(x) (dx/s)^n on them, and distinguished local parameters at zeros.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "prymtau/core.hpp"
#include "prymtau/polynomial.hpp"
#include "prymtau/series.hpp"

namespace prymtau {

struct HyperellipticCurve {
  Poly p;
  int genus = 0;
  std::vector<cplx> branch_points;  // finite roots of p
  bool branch_at_infinity = false;  // deg p odd

  int degree() const { return p.degree(); }
  /// Principal square root of p(x); sheet +1 is this value, sheet -1 its negative.
  cplx s_principal(cplx x) const {
    cplx v = p.leading();
    for (cplx b : branch_points) v *= x - b;
    return std::sqrt(v);
  }
};

/// Builds the curve; throws DegenerateCurve when p has a repeated root.
inline HyperellipticCurve build_curve(const std::vector<cplx>& p_coeffs, double sep_tol = 1e-6) {
  Poly p(p_coeffs);
  const int d = p.degree();
  if (d < 3) throw DegenerateCurve("deg p must be at least 3, got " + std::to_string(d));
  HyperellipticCurve c;
  c.p = p;
  c.genus = (d - 1) / 2;
  c.branch_points = p.roots();
  c.branch_at_infinity = (d % 2 == 1);
  double scale = 1.0;
  for (const auto& r : c.branch_points) scale = std::max(scale, std::abs(r));
  if (min_separation(c.branch_points) < sep_tol * scale)
    throw DegenerateCurve("p has a repeated root (separation below tolerance)");
  return c;
}

/// Curve with exactly the given branch points, p = lead * prod (x - r).
inline HyperellipticCurve build_curve_from_roots(const std::vector<cplx>& roots, cplx lead = 1.0,
                                                 double sep_tol = 1e-12) {
  HyperellipticCurve c;
  std::vector<cplx> coeffs = Poly::from_roots(roots).coeffs();
  for (auto& v : coeffs) v *= lead;
  c.p = Poly(coeffs);
  const int d = c.p.degree();
  if (d < 3) throw DegenerateCurve("deg p must be at least 3, got " + std::to_string(d));
  c.genus = (d - 1) / 2;
  c.branch_points = roots;
  c.branch_at_infinity = (d % 2 == 1);
  double scale = 1.0;
  for (const auto& r : roots) scale = std::max(scale, std::abs(r));
  if (min_separation(roots) < sep_tol * scale) throw DegenerateCurve("p has a repeated root");
  return c;
}

/// A point on C (or on the cover when `t` is set).
struct CurvePoint {
  cplx x{};
  cplx s{};
  cplx t{};
  bool at_infinity = false;
};

struct WZero {
  cplx x{};
  int sheet = +1;       // s = sheet * s_principal(x)
  int multiplicity = 1; // order k_i of the zero of w
  bool at_branch_point = false;
};

struct NDifferential {
  HyperellipticCurve curve;
  int n = 1;
  Poly q;
  std::vector<WZero> zeros;
  bool simple_stratum = true;

  int divisor_degree() const {
    int s = 0;
    for (const auto& z : zeros) s += z.multiplicity;
    return s;
  }
  std::vector<int> signature() const {
    std::vector<int> k;
    for (const auto& z : zeros) k.push_back(z.multiplicity);
    std::sort(k.rbegin(), k.rend());
    return k;
  }
  /// Coefficient of (dx)^n: q(x) / s^n.
  cplx value(cplx x, cplx s) const { return q(x) / std::pow(s, n); }
  /// Distinct roots of q with multiplicities.
  std::vector<std::pair<cplx, int>> q_roots() const {
    std::vector<std::pair<cplx, int>> out;
    for (const auto& z : zeros) {
      bool seen = false;
      for (const auto& r : out) seen = seen || std::abs(r.first - z.x) < 1e-12;
      if (!seen) out.push_back({z.x, z.at_branch_point ? z.multiplicity / 2 : z.multiplicity});
    }
    return out;
  }
};

/// Required degree of q for w = q (dx/s)^n to be holomorphic without a zero at infinity.
inline int required_q_degree(const HyperellipticCurve& c, int n) { return n * (c.genus - 1); }

/// Groups numerically coincident roots (relative tolerance) into (root, multiplicity).
inline std::vector<std::pair<cplx, int>> cluster_roots(const std::vector<cplx>& roots, double tol) {
  std::vector<std::pair<cplx, int>> out;
  for (const auto& r : roots) {
    bool merged = false;
    for (auto& [c, m] : out) {
      if (std::abs(c - r) < tol * std::max(1.0, std::abs(c))) {
        c = (c * static_cast<double>(m) + r) / static_cast<double>(m + 1);
        ++m;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back({r, 1});
  }
  return out;
}

inline NDifferential build_ndifferential(const HyperellipticCurve& curve, int n,
                                         const std::vector<cplx>& q_coeffs,
                                         double cluster_tol = 1e-6) {
  if (n < 1) throw WrongDegree("n must be >= 1");
  NDifferential w;
  w.curve = curve;
  w.n = n;
  w.q = Poly(q_coeffs);
  const int want = required_q_degree(curve, n);
  if (w.q.degree() != want)
    throw WrongDegree("deg q = " + std::to_string(w.q.degree()) + ", expected " + std::to_string(want));
  for (auto [r, mult] : cluster_roots(w.q.roots(), cluster_tol)) {
    if (mult > 1) {
      // a root of multiplicity m is a simple root of the (m-1)-th derivative
      Poly d = w.q;
      for (int j = 1; j < mult; ++j) d = d.derivative();
      const Poly dd = d.derivative();
      for (int it = 0; it < 20; ++it) {
        const cplx step = d(r) / dd(r);
        r -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(r))) break;
      }
    }
    bool at_branch = false;
    for (const auto& b : curve.branch_points) at_branch = at_branch || std::abs(b - r) < cluster_tol;
    if (mult > 1) w.simple_stratum = false;
    if (at_branch) {
      // ramification point: one point on C, vanishing order 2*mult in the local parameter
      w.simple_stratum = false;
      w.zeros.push_back({r, +1, 2 * mult, true});
    } else {
      w.zeros.push_back({r, +1, mult, false});
      w.zeros.push_back({r, -1, mult, false});
    }
  }
  return w;
}

/// Local chart at a zero x_i of w (not at a branch point of p).  `zeta` is the
/// series of the distinguished parameter in h = x - x_i, normalized so that
/// w = zeta^k (d zeta)^n exactly.
struct LocalChart {
  enum class Kind { Generic, BranchOfP, ZeroOfW, Infinity };
  Kind kind = Kind::ZeroOfW;
  CurvePoint center;
  int k = 1;
  int n = 1;
  double radius = 0.0;
  Series s;     // s(x) on the chart sheet
  Series w;     // coefficient of dx^n
  Series zeta;  // distinguished parameter
};

inline double nearest_special_distance(const NDifferential& w, cplx x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : w.curve.branch_points)
    if (std::abs(b - x) > 0) best = std::min(best, std::abs(b - x));
  for (const auto& z : w.zeros)
    if (std::abs(z.x - x) > 0) best = std::min(best, std::abs(z.x - x));
  return best;
}

inline LocalChart zero_chart(const NDifferential& w, std::size_t zero_index, int order = 12) {
  const WZero& z = w.zeros.at(zero_index);
  if (z.at_branch_point) throw OutsideChart("charts at zeros on branch points are not supported");
  LocalChart ch;
  ch.k = z.multiplicity;
  ch.n = w.n;
  ch.center.x = z.x;
  const double sign = z.sheet;
  ch.center.s = sign * w.curve.s_principal(z.x);
  ch.radius = 0.4 * nearest_special_distance(w, z.x);
  const int extra = ch.k;  // q has a zero of order k at the center
  Series ps = poly_series(w.curve.p.coeffs(), z.x, order + extra);
  ch.s = ps.pow(0.5) * cplx(sign);
  if (std::abs(ch.s.c[0] - ch.center.s) > 1e-9 * std::max(1.0, std::abs(ch.center.s)))
    ch.s = ch.s * cplx(-1.0);
  Series qs = poly_series(w.q.coeffs(), z.x, order + extra);
  Series sn = ch.s.pow(-static_cast<double>(w.n));
  ch.w = qs * sn;
  // G = w / h^k, v = h^{k/n} G^{1/n} dh
  Series g = (qs.shift_down(extra)) * Series(std::vector<cplx>(sn.c.begin(), sn.c.begin() + order + 1));
  Series g1 = g.pow(1.0 / w.n);
  const double e = static_cast<double>(ch.k + w.n) / w.n;
  Series inner;
  inner.c.resize(order + 1);
  for (int j = 0; j <= order; ++j) inner.c[j] = e * g1.c[j] / (j + e);
  Series pw = inner.pow(static_cast<double>(w.n) / (ch.k + w.n));
  ch.zeta.c.assign(order + 1, 0.0);
  for (int j = 0; j < order; ++j) ch.zeta.c[j + 1] = pw.c[j];
  return ch;
}

/// zeta_i at a target x (must lie inside the chart disk).
inline cplx distinguished_parameter(const LocalChart& ch, cplx target_x) {
  const cplx h = target_x - ch.center.x;
  if (std::abs(h) > ch.radius) throw OutsideChart("target outside the chart radius");
  return ch.zeta(h);
}

/// d zeta / dx at the zero itself; equals (w^{(k)}(x_i)/k!)^{1/(k+n)}.
inline cplx distinguished_frame_derivative(const LocalChart& ch) { return ch.zeta.c[1]; }

/// Monomial k-differential x^a s^e (dx/s)^k with e in {0,1}.
struct KDiffMonomial {
  int a = 0;
  int e = 0;
  int k = 1;
  cplx value(cplx x, cplx s) const { return std::pow(x, a) * std::pow(s, e) / std::pow(s, k); }
};

/// Vanishing order at the point(s) over infinity.
inline int kdiff_order_at_infinity(const HyperellipticCurve& c, const KDiffMonomial& m) {
  const int d = c.degree();
  if (d % 2 == 1) return -2 * m.a - d * m.e + m.k * (d - 3);
  const int g = c.genus;
  return -m.a - (g + 1) * m.e + m.k * (g - 1);
}

/// Monomial basis of holomorphic k-differentials on C.
inline std::vector<KDiffMonomial> ndiff_basis(const HyperellipticCurve& c, int k) {
  std::vector<KDiffMonomial> out;
  for (int e = 0; e <= 1; ++e)
    for (int a = 0;; ++a) {
      KDiffMonomial m{a, e, k};
      if (kdiff_order_at_infinity(c, m) < 0) break;
      out.push_back(m);
    }
  return out;
}

/// Rank formula for holomorphic k-differentials.
inline int kdiff_rank(int g, int k) { return k == 1 ? g : (2 * k - 1) * (g - 1); }

}  // namespace prymtau
