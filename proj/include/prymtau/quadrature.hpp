#pragma once

// Adaptive Gauss-Legendre quadrature for complex integrands on straight
// segments and circular arcs, with algebraic endpoint singularities removed
// by the substitution 1 - lambda = mu^q.

#include <array>
#include <cmath>
#include <functional>

#include "prymtau/core.hpp"

namespace prymtau {

struct QuadResult {
  cplx value{};
  double error = 0.0;
  long evaluations = 0;
};

template <int N>
struct GaussLegendre {
  std::array<double, N> x{};
  std::array<double, N> w{};
  GaussLegendre() {
    for (int i = 0; i < N; ++i) {
      double z = std::cos(pi * (i + 0.75) / (N + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < N; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        const double dp = N * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) {
          x[i] = z;
          w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
          break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
      }
    }
  }
};

inline const GaussLegendre<20>& gl20() {
  static const GaussLegendre<20> rule;
  return rule;
}

using RealIntegrand = std::function<cplx(double)>;

inline cplx gl_panel(const RealIntegrand& f, double a, double b) {
  const auto& r = gl20();
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  cplx s = 0.0;
  for (int i = 0; i < 20; ++i) s += r.w[i] * f(m + h * r.x[i]);
  return s * h;
}

namespace detail {
inline void adapt(const RealIntegrand& f, double a, double b, cplx whole, double tol, int depth,
                  QuadResult& out) {
  const double m = 0.5 * (a + b);
  const cplx left = gl_panel(f, a, m), right = gl_panel(f, m, b);
  out.evaluations += 40;
  const double err = std::abs(left + right - whole);
  if (err <= tol || depth <= 0 || b - a < 1e-15 || out.evaluations > 4000000) {
    out.value += left + right;
    out.error += err;
    return;
  }
  adapt(f, a, m, left, 0.5 * tol, depth - 1, out);
  adapt(f, m, b, right, 0.5 * tol, depth - 1, out);
}
}  // namespace detail

/// Integral of f over [a,b] to absolute tolerance max(abs_tol, rel_tol * int |f|).
inline QuadResult adaptive_gl(const RealIntegrand& f, double a, double b, double rel_tol = 1e-12,
                              double abs_tol = 1e-300, int max_depth = 40) {
  QuadResult out;
  // coarse estimate of |I| on four panels for the relative target
  // the relative target uses the L1 norm so that cancelling integrals terminate
  double l1 = 0.0;
  cplx panels[4];
  const auto& r = gl20();
  for (int i = 0; i < 4; ++i) {
    const double lo = a + (b - a) * i / 4.0, hi = a + (b - a) * (i + 1) / 4.0;
    const double h = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
    cplx s = 0.0;
    for (int k = 0; k < 20; ++k) {
      const cplx fk = f(m + h * r.x[k]);
      s += r.w[k] * fk;
      l1 += r.w[k] * std::abs(fk) * std::abs(h);
    }
    panels[i] = s * h;
  }
  out.evaluations = 80;
  const double tol = std::max(abs_tol, rel_tol * l1);
  for (int i = 0; i < 4; ++i) {
    const double lo = a + (b - a) * i / 4.0, hi = a + (b - a) * (i + 1) / 4.0;
    detail::adapt(f, lo, hi, panels[i], tol / 4.0, max_depth, out);
  }
  return out;
}

/// Integrand on a segment: F(x, end, offset) where `end` is -1 (interior), 0
/// or 1 for the singular endpoint nearest to x and offset = x - endpoint is
/// exact (not rounded through x).
using SegmentIntegrand = std::function<cplx(cplx, int, cplx)>;

/// Integral of F dx along the segment a -> b.  An endpoint flagged singular
/// may carry a branch-type singularity (x - end)^{j/q}, j > -q.
inline QuadResult integrate_segment(const SegmentIntegrand& F, cplx a, cplx b, bool sing_a, bool sing_b,
                                    int q = 2, double rel_tol = 1e-12, double abs_tol = 1e-300) {
  if (sing_a && sing_b) {
    const cplx m = 0.5 * (a + b);
    QuadResult r1 = integrate_segment(F, a, m, true, false, q, rel_tol, abs_tol);
    SegmentIntegrand Fb = [&](cplx x, int end, cplx off) { return F(x, end < 0 ? -1 : 1, off); };
    QuadResult r2 = integrate_segment(Fb, m, b, false, true, q, rel_tol, abs_tol);
    return {r1.value + r2.value, r1.error + r2.error, r1.evaluations + r2.evaluations};
  }
  if (!sing_a && !sing_b) {
    const cplx d = b - a;
    return adaptive_gl([&](double l) { return F(a + l * d, -1, 0.0) * d; }, 0.0, 1.0, rel_tol, abs_tol);
  }
  // singular end e, regular end o; x = e + (o - e) mu^q, mu in [0,1]
  const cplx e = sing_a ? a : b, o = sing_a ? b : a;
  const cplx d = o - e;
  const double sign = sing_a ? 1.0 : -1.0;
  const int end = sing_a ? 0 : 1;
  auto G = [&](double mu) -> cplx {
    if (mu <= 0.0) return 0.0;
    const double mq1 = std::pow(mu, q - 1);
    const cplx off = d * (mq1 * mu);
    return F(e + off, end, off) * d * (q * mq1) * sign;
  };
  return adaptive_gl(G, 0.0, 1.0, rel_tol, abs_tol);
}

inline QuadResult integrate_segment(const std::function<cplx(cplx)>& F, cplx a, cplx b, bool sing_a,
                                    bool sing_b, int q = 2, double rel_tol = 1e-12, double abs_tol = 1e-300) {
  SegmentIntegrand G = [&](cplx x, int, cplx) { return F(x); };
  return integrate_segment(G, a, b, sing_a, sing_b, q, rel_tol, abs_tol);
}

/// Integral of F(phi) dx along the arc x = c + r e^{i(theta0 + phi)}, phi in [0, sweep].
/// F receives phi so that callers can continue branches by argument tracking.
inline QuadResult integrate_arc(const std::function<cplx(double, cplx)>& F, cplx c, double r,
                                double theta0, double sweep, double rel_tol = 1e-12,
                                double abs_tol = 1e-300) {
  auto G = [&](double phi) -> cplx {
    const cplx x = c + std::polar(r, theta0 + phi);
    return F(phi, x) * (I * (x - c));
  };
  return adaptive_gl(G, 0.0, sweep, rel_tol, abs_tol);
}

}  // namespace prymtau
