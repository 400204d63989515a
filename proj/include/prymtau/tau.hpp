#pragma once

#include <random>

#include "prymtau/curve.hpp"
#include "prymtau/periods.hpp"
#include "prymtau/series.hpp"
#include "prymtau/theta.hpp"

namespace prymtau {

/// Odd half-characteristic with the largest gradient at 0.
inline Characteristic select_odd_characteristic(const ThetaEvaluator& th) {
  const int g = th.genus();
  Characteristic best;
  double best_norm = -1.0;
  for (const auto& ch : half_characteristics(g)) {
    if (!ch.odd()) continue;
    const double nrm = th.gradient(CVec::Zero(g), ch).norm();
    if (nrm > best_norm) {
      best_norm = nrm;
      best = ch;
    }
  }
  if (best_norm < 1e-8) throw SingularOddCharacteristic("all odd characteristics are singular");
  return best;
}

/// Random point (x, s) on the curve inside a box, away from branch points.
inline std::pair<cplx, cplx> random_curve_point(const HyperellipticCurve& C, std::mt19937_64& rng, double box = 1.2,
                                                double clearance = 0.15) {
  std::uniform_real_distribution<double> u(-box, box);
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    const cplx x(u(rng), u(rng));
    bool ok = true;
    for (cplx b : C.branch_points) ok = ok && std::abs(x - b) > clearance;
    if (!ok) continue;
    const cplx s = C.s_principal(x);
    return {x, coin(rng) ? s : -s};
  }
}

struct RiemannConstants {
  CVec K;                 // vector for the Abel map based at the map's basepoint
  Characteristic half;    // K = Omega a + b
  double residual = 0.0;  // max |theta(A(D) + K)| / typical |theta|
};

/// Vector of Riemann constants for a Weierstrass basepoint, found among the half periods
/// by the vanishing of theta on Abel images of effective divisors of degree g - 1.
inline RiemannConstants riemann_constants(const ThetaEvaluator& th, const AbelMap& A, const HyperellipticCurve& C,
                                          int samples = 10, std::uint64_t seed = 11) {
  const int g = th.genus();
  std::mt19937_64 rng(seed);
  std::vector<CVec> images;
  for (int r = 0; r < samples; ++r) {
    CVec d = CVec::Zero(g);
    for (int k = 0; k < g - 1; ++k) {
      auto [x, s] = random_curve_point(C, rng);
      d += A(x, s);
    }
    images.push_back(d);
  }
  RiemannConstants best;
  best.residual = std::numeric_limits<double>::infinity();
  for (const auto& ch : half_characteristics(g)) {
    const CVec K = ch.shift(th.Omega());
    double worst = 0.0, scale = 0.0;
    for (const CVec& d : images) {
      // theta(d + K) relative to theta at a generic nearby point
      const auto v = th.evaluate(d + K, Characteristic::zero(g));
      const auto w = th.evaluate(d + K + CVec::Constant(g, cplx(0.13, 0.07)), Characteristic::zero(g));
      worst = std::max(worst, std::abs(v.value) * std::exp(v.log_scale - w.log_scale));
      scale = std::max(scale, std::abs(w.value));
    }
    const double res = worst / std::max(scale, 1e-300);
    if (res < best.residual) {
      best.residual = res;
      best.K = K;
      best.half = ch;
    }
  }
  if (best.residual > 1e-7) throw VanishingTestFailed("no half period satisfies the vanishing criterion");
  return best;
}

/// Taylor coefficients of the normalized holomorphic differentials at (x, s), per dx.
inline std::vector<CVec> normalized_diff_series(const HyperellipticCurve& C, const PeriodData& P, cplx x, cplx s,
                                                int order) {
  Series inv = poly_series(C.p.coeffs(), x, order).pow(-0.5);
  if (std::abs(inv.c[0] * s - 1.0) > 1e-6) inv = inv * cplx(-1.0);
  const int g = P.genus;
  std::vector<CVec> out(order + 1, CVec::Zero(g));
  for (std::size_t k = 0; k < P.diffs.size(); ++k) {
    const Series u = poly_series(P.diffs[k].f.coeffs(), x, order) * inv;
    for (int j = 0; j <= order; ++j)
      for (int i = 0; i < g; ++i) out[j](i) += P.normalizer(i, k) * u.c[j];
  }
  return out;
}

/// Wronskian det[v_i^{(j)}] of the normalized differentials in the x coordinate.
inline cplx wronskian(const HyperellipticCurve& C, const PeriodData& P, cplx x, cplx s) {
  const int g = P.genus;
  const auto ser = normalized_diff_series(C, P, x, s, g);
  CMat W(g, g);
  double fact = 1.0;
  for (int j = 0; j < g; ++j) {
    if (j > 0) fact *= j;
    W.col(j) = ser[j] * fact;
  }
  return W.determinant();
}

struct TauOptions {
  double theta_eps = 1e-13;
  IntegrationOptions integration{};
  std::uint64_t seed = 11;
  RVec k_shift_a, k_shift_b;  // lattice representative of K^e: K + Omega a + b
};

/// A point of the curve given by x and the value of s.
struct CurvePt {
  cplx x, s;
};

/// Ingredients of the tau function for one n-differential, one marking and one auxiliary point.
class TauContext {
public:
  TauContext(const NDifferential& w, const PeriodData& P, CurvePt aux, cplx hub, const TauOptions& opt = {})
      : w_(w), P_(P), theta_(P.Omega, opt.theta_eps), abel_(w.curve, P, hub, 0, opt.integration), aux_(aux) {
    const int g = P.genus;
    delta_ = select_odd_characteristic(theta_);
    grad_delta_ = theta_.gradient(CVec::Zero(g), delta_);
    rc_ = riemann_constants(theta_, abel_, w.curve, 10, opt.seed);
    if (opt.k_shift_a.size() == g) rc_.K += P.Omega * opt.k_shift_a.cast<cplx>();
    if (opt.k_shift_b.size() == g) rc_.K += opt.k_shift_b.cast<cplx>();
    Ax_ = abel_(aux.x, aux.s);
    Kx_ = rc_.K + static_cast<double>(g - 1) * Ax_;
    for (std::size_t i = 0; i < w.zeros.size(); ++i) {
      const WZero& z = w.zeros[i];
      if (z.at_branch_point) throw OutsideChart("tau: zero of w on a branch point");
      CurvePt p{z.x, static_cast<double>(z.sheet) * w.curve.s_principal(z.x)};
      zeros_.push_back(p);
      zero_abel_.push_back(abel_(p.x, p.s));
      frame_.push_back(distinguished_frame_derivative(zero_chart(w, i, 4)));
    }
    solve_Z();
  }

  int genus() const { return P_.genus; }
  const ThetaEvaluator& theta() const { return theta_; }
  const AbelMap& abel() const { return abel_; }
  const Characteristic& odd_characteristic() const { return delta_; }
  const RiemannConstants& riemann() const { return rc_; }
  const CVec& K_aux() const { return Kx_; }
  const RVec& Z() const { return Z_; }
  const RVec& Zp() const { return Zp_; }
  double quantization_residual() const { return quant_res_; }
  double relation_residual() const { return rel_res_; }
  const std::vector<CurvePt>& zero_points() const { return zeros_; }
  const std::vector<cplx>& frames() const { return frame_; }

  /// Normalized differentials at a point, per dx.
  CVec v(CurvePt p) const { return P_.v_values(p.x, p.s); }
  /// h(x)^2 = grad theta[delta](0) . v(x).
  cplx h2(CurvePt p) const { return (grad_delta_.transpose() * v(p))(0, 0); }

  /// Prime form in x coordinates given Abel images.
  cplx prime_form_dx(CurvePt p, const CVec& Ap, CurvePt q, const CVec& Aq) const {
    const cplx th = theta_.evaluate(Aq - Ap, delta_).full();
    return th / (std::sqrt(h2(p)) * std::sqrt(h2(q)));
  }
  cplx prime_form_dx(CurvePt p, CurvePt q) const { return prime_form_dx(p, abel_(p.x, p.s), q, abel_(q.x, q.s)); }

  /// log|E(y, x_i)|, distinguished frame at the zero x_i and x coordinate at y.
  double log_abs_prime_form_at_zero(CurvePt y, const CVec& Ay, std::size_t i) const {
    return std::log(std::abs(prime_form_dx(y, Ay, zeros_[i], zero_abel_[i]))) + 0.5 * std::log(std::abs(frame_[i]));
  }
  /// log|E(x_i, x_j)| in the distinguished frames.
  double log_abs_prime_form_zeros(std::size_t i, std::size_t j) const {
    return std::log(std::abs(prime_form_dx(zeros_[i], zero_abel_[i], zeros_[j], zero_abel_[j]))) +
           0.5 * std::log(std::abs(frame_[i])) + 0.5 * std::log(std::abs(frame_[j]));
  }

  /// Bergman kernel B(p, q) per dx dy, given Abel images.
  cplx bergman(CurvePt p, const CVec& Ap, CurvePt q, const CVec& Aq) const {
    const CVec z = Aq - Ap, vp = v(p), vq = v(q);
    const cplx th = theta_.evaluate(z, delta_).value;
    const cplx tp = theta_.evaluate(z, delta_, {vp}).value;
    const cplx tq = theta_.evaluate(z, delta_, {vq}).value;
    const cplx tpq = theta_.evaluate(z, delta_, {vp, vq}).value;
    return -(th * tpq - tp * tq) / (th * th);
  }
  cplx bergman(CurvePt p, CurvePt q) const { return bergman(p, abel_(p.x, p.s), q, abel_(q.x, q.s)); }

  /// Bergman projective connection in the x coordinate.
  cplx bergman_connection(CurvePt p) const {
    const int g = P_.genus;
    const auto ser = normalized_diff_series(w_.curve, P_, p.x, p.s, 2);
    const cplx H = (grad_delta_.transpose() * ser[0])(0, 0);
    const cplx H1 = (grad_delta_.transpose() * ser[1])(0, 0);
    const cplx H2 = 2.0 * (grad_delta_.transpose() * ser[2])(0, 0);
    const cplx T = theta_.evaluate(CVec::Zero(g), delta_, {ser[0], ser[0], ser[0]}).full();
    return H2 / H - 1.5 * (H1 / H) * (H1 / H) - 2.0 * T / H;
  }

  /// Schwarzian of the abelian integral of v = w^{1/n}, in the x coordinate.
  cplx abelian_connection(cplx x) const {
    const Poly& p = w_.curve.p;
    const Poly& q = w_.q;
    const cplx lq = q.derivative()(x) / q(x), lp = p.derivative()(x) / p(x);
    const cplx lq2 = q.derivative().derivative()(x) / q(x), lp2 = p.derivative().derivative()(x) / p(x);
    const double n = w_.n;
    const cplx L = lq / n - 0.5 * lp;
    const cplx dL = (lq2 - lq * lq) / n - 0.5 * (lp2 - lp * lp);
    return dL - 0.5 * L * L;
  }

  /// log|c(x)| at the auxiliary point.
  double log_abs_c() const {
    const int g = P_.genus;
    const CVec dir = v(aux_);
    const std::vector<CVec> dirs(g, dir);
    const ThetaValue tv = theta_.evaluate(Kx_, Characteristic::zero(g), dirs);
    return std::log(std::abs(tv.value)) + tv.log_scale - std::log(std::abs(wronskian(w_.curve, P_, aux_.x, aux_.s)));
  }

  /// log|tau(C, w)|.
  double log_abs_tau() const {
    const int g = P_.genus, n = w_.n;
    const CVec Zc = Z_.cast<cplx>();
    const cplx ex = -I * pi / 6.0 * Zc.dot(P_.Omega * Zc) + 2.0 * I * pi / 3.0 * Zc.dot(Kx_);
    double out = (2.0 / 3.0) * log_abs_c() + ex.real();
    double mid = std::log(std::abs(w_.value(aux_.x, aux_.s)));
    for (std::size_t i = 0; i < zeros_.size(); ++i)
      mid -= w_.zeros[i].multiplicity * log_abs_prime_form_at_zero(aux_, Ax_, i);
    out += static_cast<double>(g - 1) / (3.0 * n) * mid;
    for (std::size_t i = 0; i < zeros_.size(); ++i)
      for (std::size_t j = i + 1; j < zeros_.size(); ++j)
        out += static_cast<double>(w_.zeros[i].multiplicity * w_.zeros[j].multiplicity) / (6.0 * n * n) *
               log_abs_prime_form_zeros(i, j);
    return out;
  }

private:
  void solve_Z() {
    const int g = P_.genus, n = w_.n;
    CVec L = 2.0 * Kx_;
    for (std::size_t i = 0; i < zeros_.size(); ++i)
      L += static_cast<double>(w_.zeros[i].multiplicity) / n * (zero_abel_[i] - Ax_);
    const RMat Y = P_.Omega.imag(), X = P_.Omega.real();
    const RVec z = Y.ldlt().solve(L.imag());
    const RVec zp = L.real() - X * z;
    Z_.resize(g);
    Zp_.resize(g);
    quant_res_ = 0.0;
    for (int i = 0; i < g; ++i) {
      Z_(i) = std::round(z(i) * n) / n;
      Zp_(i) = std::round(zp(i) * n) / n;
      quant_res_ = std::max({quant_res_, std::abs(z(i) - Z_(i)), std::abs(zp(i) - Zp_(i))});
    }
    rel_res_ = (P_.Omega * Z_.cast<cplx>() + Zp_.cast<cplx>() - L).cwiseAbs().maxCoeff();
  }

  NDifferential w_;
  PeriodData P_;
  ThetaEvaluator theta_;
  AbelMap abel_;
  CurvePt aux_;
  Characteristic delta_;
  CVec grad_delta_;
  RiemannConstants rc_;
  CVec Ax_, Kx_;
  std::vector<CurvePt> zeros_;
  std::vector<CVec> zero_abel_;
  std::vector<cplx> frame_;
  RVec Z_, Zp_;
  double quant_res_ = 0.0, rel_res_ = 0.0;
};

}  // namespace prymtau
