#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

#include <Eigen/Cholesky>

#include "prymtau/core.hpp"
#include "prymtau/quadrature.hpp"

namespace prymtau {

/// Theta characteristic [a; b] with entries in {0, 1/2}.
struct Characteristic {
  RVec a, b;

  static Characteristic zero(int g) { return {RVec::Zero(g), RVec::Zero(g)}; }
  int genus() const { return static_cast<int>(a.size()); }
  /// 4 a.b mod 2: 1 for odd characteristics.
  int parity() const {
    const long v = std::lround(4.0 * a.dot(b));
    return static_cast<int>(((v % 2) + 2) % 2);
  }
  bool odd() const { return parity() == 1; }
  /// Shift a*Omega + b added to the argument.
  CVec shift(const CMat& Omega) const { return Omega * a.cast<cplx>() + b.cast<cplx>(); }
};

/// All 4^g half-integer characteristics.
inline std::vector<Characteristic> half_characteristics(int g) {
  std::vector<Characteristic> out;
  const int total = 1 << (2 * g);
  for (int mask = 0; mask < total; ++mask) {
    Characteristic c = Characteristic::zero(g);
    for (int i = 0; i < g; ++i) {
      c.a(i) = (mask >> i) & 1 ? 0.5 : 0.0;
      c.b(i) = (mask >> (g + i)) & 1 ? 0.5 : 0.0;
    }
    out.push_back(c);
  }
  return out;
}

/// Value S with theta = S * exp(log_scale); `bound` limits the truncation error of S.
struct ThetaValue {
  cplx value{0.0};
  double log_scale = 0.0;
  double bound = 0.0;
  std::size_t terms = 0;
  cplx full() const { return value * std::exp(log_scale); }
};

namespace detail {

/// Integer points n with |T (n + shift)| < R, T upper triangular.
inline void enumerate_ellipsoid(const RMat& T, const RVec& shift, double R, std::vector<IVec>& out) {
  const int g = static_cast<int>(T.rows());
  IVec n(g);
  std::function<void(int, double)> rec = [&](int i, double rem) {
    double p = 0.0;
    for (int j = i + 1; j < g; ++j) p += T(i, j) * (static_cast<double>(n(j)) + shift(j));
    const double c = -p / T(i, i) - shift(i);
    const double w = std::sqrt(std::max(rem, 0.0)) / T(i, i);
    const auto lo = static_cast<std::int64_t>(std::ceil(c - w));
    const auto hi = static_cast<std::int64_t>(std::floor(c + w));
    for (std::int64_t k = lo; k <= hi; ++k) {
      n(i) = k;
      const double t = T(i, i) * (static_cast<double>(k) + shift(i)) + p;
      const double r2 = rem - t * t;
      if (r2 < 0) continue;
      if (i == 0)
        out.push_back(n);
      else
        rec(i - 1, r2);
    }
  };
  rec(g - 1, R * R);
}

}  // namespace detail

/// Riemann theta functions with characteristics and directional derivatives.
///
/// The sum is centered at the minimum of the Gaussian modulus, so large Im z only
/// contributes an explicit log scale.  The point set is enumerated once.
class ThetaEvaluator {
public:
  explicit ThetaEvaluator(CMat Omega, double eps = 1e-12, int max_order = -1, double box = 2.0)
      : Omega_(std::move(Omega)), eps_(eps), box_(box) {
    g_ = static_cast<int>(Omega_.rows());
    if (g_ == 0 || Omega_.cols() != g_) throw DimensionMismatch("theta: Omega must be square");
    if (max_order < 0) max_order = g_ + 2;
    max_order_ = max_order;
    X_ = Omega_.real();
    Y_ = 0.5 * (Omega_.imag() + Omega_.imag().transpose());
    Eigen::LLT<RMat> llt(Y_);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("theta: Im Omega is not positive definite");
    T_ = llt.matrixL().transpose();
    Yinv_ = llt.solve(RMat::Identity(g_, g_));
    Tinv_norm_ = T_.inverse().norm();
    rho_ = shortest_vector();
    radius_.resize(max_order_ + 1);
    bound_.resize(max_order_ + 1);
    for (int k = 0; k <= max_order_; ++k) {
      radius_[k] = radius_for(k, box_);
      bound_[k] = tail_bound(radius_[k], k, box_);
    }
    const double Rmax = *std::max_element(radius_.begin(), radius_.end());
    cover_ = Rmax + T_.norm() * std::sqrt(static_cast<double>(g_)) / 2.0;
    detail::enumerate_ellipsoid(T_, RVec::Constant(g_, 0.5), cover_, points_);
    ++enumerations_;
  }

  int genus() const { return g_; }
  const CMat& Omega() const { return Omega_; }
  double epsilon() const { return eps_; }
  double shortest_length() const { return rho_; }
  double radius(int order = 0) const { return radius_.at(order); }
  std::size_t cached_points() const { return points_.size(); }
  /// Number of lattice enumerations performed so far.
  std::size_t enumerations() const { return enumerations_.load(); }

  /// Tail bound for sum over |T(v+c)| >= R of |weight| * prod |2 pi v.d|, per unit directions.
  double tail_bound(double R, int order, double cnorm) const {
    if (R < rho_) return std::numeric_limits<double>::infinity();
    const double A = Tinv_norm_, B = cnorm;
    const double L = R - rho_ / 2.0;
    const double gd = static_cast<double>(g_);
    auto f = [&](double r) {
      return std::pow(r, gd - 1.0) * std::exp(-pi * (r - rho_ / 2.0) * (r - rho_ / 2.0)) *
             std::pow(2.0 * pi * (A * (r + rho_ / 2.0) + B), order);
    };
    const double integral = adaptive_gl([&](double r) { return f(r); }, L, L + 16.0, 1e-6).value.real();
    return gd * std::pow(2.0 / rho_, gd) * integral;
  }

  /// Sum with optional directional derivatives; `radius_override` > 0 forces a fresh enumeration.
  ThetaValue evaluate(const CVec& z, const Characteristic& ch, const std::vector<CVec>& dirs = {},
                      double radius_override = 0.0) const {
    if (z.size() != g_ || ch.genus() != g_) throw DimensionMismatch("theta: argument size");
    const int order = static_cast<int>(dirs.size());
    if (order > max_order_) throw DimensionMismatch("theta: too many directions");
    const RVec y = z.imag();
    const RVec c = Yinv_ * y;
    const RVec ac = ch.a + c;
    RVec frac(g_);
    IVec fl(g_);
    for (int i = 0; i < g_; ++i) {
      const double f = std::floor(ac(i));
      fl(i) = static_cast<std::int64_t>(f);
      frac(i) = ac(i) - f;
    }
    double dnorm = 1.0;
    for (const CVec& d : dirs) dnorm *= d.norm();

    double R = radius_override > 0 ? radius_override : radius_[order];
    const double cnorm = c.norm() + ch.a.norm();
    const bool in_box = cnorm <= box_;
    if (!in_box && radius_override <= 0) R = radius_for(order, cnorm);

    std::vector<IVec> fresh;
    const std::vector<IVec>* pts = &points_;
    if (radius_override > 0 || R > radius_[order] + 1e-12) {
      detail::enumerate_ellipsoid(T_, frac, R, fresh);
      ++enumerations_;
      pts = &fresh;
    }

    ThetaValue out;
    out.log_scale = pi * y.dot(c);
    const RVec x = z.real() + ch.b;
    const double R2 = R * R;
    cplx sum(0.0);
    for (const IVec& n : *pts) {
      RVec nf(g_);
      for (int i = 0; i < g_; ++i) nf(i) = static_cast<double>(n(i)) + frac(i);
      const RVec Tn = T_ * nf;
      const double q = Tn.squaredNorm();
      if (q >= R2) continue;
      RVec v(g_);
      for (int i = 0; i < g_; ++i) v(i) = static_cast<double>(n(i) - fl(i)) + ch.a(i);
      const double phase = pi * v.dot(X_ * v) + 2.0 * pi * v.dot(x);
      cplx term = std::exp(-pi * q) * std::polar(1.0, phase);
      for (const CVec& d : dirs) {
        cplx vd(0.0);
        for (int i = 0; i < g_; ++i) vd += v(i) * d(i);
        term *= 2.0 * pi * I * vd;
      }
      sum += term;
      ++out.terms;
    }
    out.value = sum;
    out.bound = dnorm * (pts == &points_ ? bound_[order] : tail_bound(R, order, std::max(cnorm, box_)));
    return out;
  }

  cplx theta(const CVec& z, const Characteristic& ch) const { return evaluate(z, ch).full(); }
  cplx theta(const CVec& z) const { return theta(z, Characteristic::zero(g_)); }

  cplx derivative(const CVec& z, const Characteristic& ch, const std::vector<CVec>& dirs) const {
    return evaluate(z, ch, dirs).full();
  }

  /// Gradient of theta[ch] at z.
  CVec gradient(const CVec& z, const Characteristic& ch) const {
    CVec out(g_);
    for (int i = 0; i < g_; ++i) out(i) = derivative(z, ch, {CVec::Unit(g_, i)});
    return out;
  }

  /// Batched evaluation over many points on `jobs` threads.
  std::vector<ThetaValue> evaluate_batch(const std::vector<CVec>& zs, const Characteristic& ch,
                                         const std::vector<CVec>& dirs = {}, int jobs = 1) const {
    std::vector<ThetaValue> out(zs.size());
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(zs.size())));
    auto work = [&](int t) {
      for (std::size_t i = t; i < zs.size(); i += jobs) out[i] = evaluate(zs[i], ch, dirs);
    };
    if (jobs == 1) {
      work(0);
      return out;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
    return out;
  }

private:
  double shortest_vector() const {
    double R = T_.colwise().norm().minCoeff() * (1.0 + 1e-12);
    std::vector<IVec> pts;
    detail::enumerate_ellipsoid(T_, RVec::Zero(g_), R, pts);
    double best = R;
    for (const IVec& n : pts) {
      if (n.cwiseAbs().maxCoeff() == 0) continue;
      best = std::min(best, (T_ * n.cast<double>()).norm());
    }
    return best;
  }

  double radius_for(int order, double cnorm) const {
    double R = std::max(rho_, 1.0);
    while (tail_bound(R, order, cnorm) > eps_) R += 0.05;
    return R;
  }

  CMat Omega_;
  double eps_, box_;
  int g_ = 0, max_order_ = 0;
  RMat X_, Y_, T_, Yinv_;
  double Tinv_norm_ = 0.0, rho_ = 0.0, cover_ = 0.0;
  std::vector<double> radius_, bound_;
  std::vector<IVec> points_;
  mutable std::atomic<std::size_t> enumerations_{0};
};

}  // namespace prymtau
