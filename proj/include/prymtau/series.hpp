#pragma once

// Truncated power series in a local variable h = x - x0.

#include <vector>

#include "prymtau/core.hpp"

namespace prymtau {

struct Series {
  std::vector<cplx> c;  // c[k] multiplies h^k

  Series() = default;
  explicit Series(std::vector<cplx> coeffs) : c(std::move(coeffs)) {}
  static Series constant(cplx a, int order) {
    Series s;
    s.c.assign(order + 1, 0.0);
    s.c[0] = a;
    return s;
  }

  int order() const { return static_cast<int>(c.size()) - 1; }

  cplx operator()(cplx h) const {
    cplx r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * h + *it;
    return r;
  }

  Series derivative() const {
    Series d;
    d.c.assign(c.size(), 0.0);
    for (std::size_t k = 1; k < c.size(); ++k) d.c[k - 1] = c[k] * static_cast<double>(k);
    return d;
  }

  Series operator*(const Series& o) const {
    const std::size_t n = std::min(c.size(), o.c.size());
    Series r;
    r.c.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; i + j < n; ++j) r.c[i + j] += c[i] * o.c[j];
    return r;
  }
  Series operator*(cplx s) const {
    Series r = *this;
    for (auto& v : r.c) v *= s;
    return r;
  }
  Series operator+(const Series& o) const {
    Series r;
    r.c.assign(std::min(c.size(), o.c.size()), 0.0);
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }

  /// A^alpha for A(0) != 0, principal branch for the constant term.
  Series pow(cplx alpha) const {
    const std::size_t n = c.size();
    Series b;
    b.c.assign(n, 0.0);
    b.c[0] = std::pow(c[0], alpha);
    for (std::size_t k = 1; k < n; ++k) {
      cplx acc = 0.0;
      for (std::size_t j = 1; j <= k; ++j)
        acc += (alpha * static_cast<double>(j) - static_cast<double>(k - j)) * c[j] * b.c[k - j];
      b.c[k] = acc / (static_cast<double>(k) * c[0]);
    }
    return b;
  }

  /// Drops the first `m` coefficients (division by h^m); requires them to vanish.
  Series shift_down(int m) const {
    Series r;
    r.c.assign(c.begin() + m, c.end());
    return r;
  }
};

/// Taylor series of a polynomial given by ascending coefficients.
inline Series poly_series(const std::vector<cplx>& coeffs, cplx x0, int order) {
  Series s;
  s.c.assign(order + 1, 0.0);
  // repeated synthetic division
  std::vector<cplx> work = coeffs;
  for (int k = 0; k <= order && !work.empty(); ++k) {
    cplx r = 0.0;
    std::vector<cplx> q(work.size() > 1 ? work.size() - 1 : 0, 0.0);
    for (int i = static_cast<int>(work.size()) - 1; i >= 0; --i) {
      const cplx nr = r * x0 + work[i];
      if (i > 0) q[i - 1] = nr;
      r = nr;
    }
    s.c[k] = r;
    work = std::move(q);
  }
  return s;
}

}  // namespace prymtau
