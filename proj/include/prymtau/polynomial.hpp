#pragma once

// Dense complex polynomials, coefficients stored lowest degree first.

#include <algorithm>
#include <cmath>
#include <vector>

#include "prymtau/core.hpp"

namespace prymtau {

class Poly {
public:
  Poly() = default;
  explicit Poly(std::vector<cplx> c) : c_(std::move(c)) { trim(); }

  static Poly from_roots(const std::vector<cplx>& roots, cplx lead = 1.0) {
    std::vector<cplx> c{lead};
    for (const cplx& r : roots) {
      std::vector<cplx> next(c.size() + 1, 0.0);
      for (std::size_t i = 0; i < c.size(); ++i) {
        next[i + 1] += c[i];
        next[i] -= r * c[i];
      }
      c = std::move(next);
    }
    return Poly(std::move(c));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx coeff(int i) const { return i < static_cast<int>(c_.size()) ? c_[i] : cplx{}; }
  cplx leading() const { return c_.back(); }

  cplx operator()(cplx x) const {
    cplx r = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly({0.0});
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
    return Poly(std::move(d));
  }

  /// Taylor coefficients at x0 up to order `order` (inclusive).
  std::vector<cplx> taylor(cplx x0, int order) const {
    std::vector<cplx> out(order + 1, 0.0);
    Poly d = *this;
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) fact *= k;
      out[k] = d(x0) / fact;
      d = d.derivative();
    }
    return out;
  }

  Poly operator*(const Poly& o) const {
    std::vector<cplx> r(c_.size() + o.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Poly(std::move(r));
  }
  Poly operator*(cplx s) const {
    auto r = c_;
    for (auto& v : r) v *= s;
    return Poly(std::move(r));
  }

  /// All roots by Aberth-Ehrlich iteration followed by Newton polishing.
  std::vector<cplx> roots() const {
    const int n = degree();
    std::vector<cplx> z(n);
    if (n <= 0) return z;
    double radius = 0.0;
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::pow(std::abs(c_[i] / leading()), 1.0 / (n - i)));
    radius = std::max(radius, 1e-3);
    for (int i = 0; i < n; ++i)
      z[i] = radius * std::polar(1.0, 2.0 * pi * (i + 0.25) / n + 0.4);
    const Poly d = derivative();
    for (int it = 0; it < 500; ++it) {
      double change = 0.0;
      for (int i = 0; i < n; ++i) {
        const cplx ratio = (*this)(z[i]) / d(z[i]);
        cplx sum = 0.0;
        for (int j = 0; j < n; ++j)
          if (j != i) sum += 1.0 / (z[i] - z[j]);
        const cplx step = ratio / (1.0 - ratio * sum);
        if (std::isfinite(step.real()) && std::isfinite(step.imag())) {
          z[i] -= step;
          change = std::max(change, std::abs(step) / std::max(1.0, std::abs(z[i])));
        }
      }
      if (change < 1e-15) break;
    }
    for (auto& r : z) {
      for (int it = 0; it < 3; ++it) {
        const cplx dv = d(r);
        if (std::abs(dv) == 0.0) break;
        const cplx step = (*this)(r) / dv;
        if (!std::isfinite(step.real())) break;
        r -= step;
      }
    }
    return z;
  }

private:
  void trim() {
    while (c_.size() > 1 && c_.back() == cplx{}) c_.pop_back();
    if (c_.empty()) c_.push_back(0.0);
  }
  std::vector<cplx> c_{0.0};
};

/// Resultant by the determinant of the Sylvester matrix (floating point).
inline cplx resultant(const Poly& a, const Poly& b) {
  const int m = a.degree(), n = b.degree();
  CMat S = CMat::Zero(m + n, m + n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= m; ++j) S(i, i + j) = a.coeff(m - j);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j) S(n + i, i + j) = b.coeff(n - j);
  return S.determinant();
}

/// Smallest pairwise distance between the given points (infinity if < 2).
inline double min_separation(const std::vector<cplx>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, std::abs(pts[i] - pts[j]));
  return best;
}

}  // namespace prymtau
