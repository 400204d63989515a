#pragma once

// Shared generic curve/differential fixtures for the test suite.

#include <random>

#include "prymtau/curve.hpp"

namespace fixtures {

using prymtau::cplx;

inline std::vector<cplx> real_coeffs(std::initializer_list<double> c) {
  std::vector<cplx> out;
  for (double v : c) out.emplace_back(v, 0.0);
  return out;
}

/// Monic polynomial with random roots in an annulus, separated from each
/// other and from `avoid`.
inline std::vector<cplx> random_roots(int count, std::mt19937_64& rng, double rmin, double rmax,
                                      const std::vector<cplx>& avoid = {}, double sep = 0.35) {
  std::uniform_real_distribution<double> R(rmin, rmax), A(0, 2 * prymtau::pi);
  std::vector<cplx> out;
  while (static_cast<int>(out.size()) < count) {
    const cplx z = std::polar(R(rng), A(rng));
    bool ok = true;
    for (const auto& o : out) ok = ok && std::abs(o - z) > sep;
    for (const auto& o : avoid) ok = ok && std::abs(o - z) > sep;
    if (ok) out.push_back(z);
  }
  return out;
}

/// Generic split n-differential on a curve of genus g with deg p = 2g+1.
inline prymtau::NDifferential generic_ndiff(int g, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pr = random_roots(2 * g + 1, rng, 0.6, 1.4);
  auto C = prymtau::build_curve(prymtau::Poly::from_roots(pr).coeffs());
  auto qr = random_roots(n * (g - 1), rng, 0.3, 1.8, pr, 0.25);
  return prymtau::build_ndifferential(C, n, prymtau::Poly::from_roots(qr).coeffs());
}

}  // namespace fixtures
