#pragma once

#include <optional>
#include <vector>

#include "prymtau/cover.hpp"
#include "prymtau/periods.hpp"
#include "prymtau/tau.hpp"

namespace prymtau {

struct VariationalOptions {
  double step = 1e-4;           // finite-difference step in P_i
  double jacobian_step = 1e-4;  // step in the (p, q) coefficients
  double prefactor_scale = 1.0; // multiplies -1/(12 pi i n), for wiring checks
  double radius_fraction = 0.3; // arc radius relative to star clearance
  cplx aux{0.3, 0.2};
  cplx hub{0.05, 0.11};
  std::optional<cplx> base_center, cover_center;
  TauOptions tau{};
  IntegrationOptions integration{};
};

struct VariationalResult {
  int coordinate = 0;
  cplx finite_difference{0.0};
  cplx contour{0.0};
  double residual = 0.0;  // |fd - contour| / |contour|
};

/// d log tau / dP_i by deformation against the contour integral over s_i^*.
class VariationalProblem {
public:
  VariationalProblem(const NDifferential& w, const VariationalOptions& opt = {}) : w_(w), opt_(opt) {
    np_ = w.curve.p.degree() + 1;
    for (cplx c : w.curve.p.coeffs()) params_.push_back(c);
    for (cplx c : w.q.coeffs()) params_.push_back(c);
    base_center_ = opt.base_center.value_or(choose_star_center(w.curve.branch_points));
    std::vector<cplx> pts = w.curve.branch_points;
    for (const auto& [r, m] : w.q_roots()) pts.push_back(r);
    cover_center_ = opt.cover_center.value_or(choose_star_center(pts));
    const CoverPeriods R = cover_periods(build_cover(w), cover_center_, opt.integration);
    cover_ = R;
    P0_ = homological_coordinates(R).P;
  }

  int dimension() const { return static_cast<int>(P0_.size()); }
  const CVec& coordinates() const { return P0_; }

  /// Homological coordinates of the differential with coefficients `x`.
  CVec coordinates_at(const std::vector<cplx>& x) const {
    return homological_coordinates(cover_periods(build_cover(member(x)), cover_center_, opt_.integration)).P;
  }

  double log_abs_tau_at(const std::vector<cplx>& x) const {
    const NDifferential w = member(x);
    const PeriodData P = period_matrix(w.curve, base_center_, {}, opt_.integration);
    const CurvePt aux{opt_.aux, w.curve.s_principal(opt_.aux)};
    return TauContext(w, P, aux, opt_.hub, opt_.tau).log_abs_tau();
  }

  /// dP / d(coefficients), central differences.
  const CMat& jacobian() const {
    if (J_.size()) return J_;
    const int d = dimension(), m = static_cast<int>(params_.size());
    J_.resize(d, m);
    const double h = opt_.jacobian_step;
    for (int j = 0; j < m; ++j) {
      std::vector<cplx> xp = params_, xm = params_;
      xp[j] += h;
      xm[j] -= h;
      J_.col(j) = (coordinates_at(xp) - coordinates_at(xm)) / (2.0 * h);
    }
    return J_;
  }

  /// Least-norm coefficient direction moving P_i alone.
  CVec deformation(int i) const {
    const CMat& J = jacobian();
    const CMat JJ = J * J.adjoint();
    Eigen::FullPivLU<CMat> lu(JJ);
    if (lu.rank() < dimension()) throw DeformationSolveFailed("period Jacobian is rank deficient");
    return J.adjoint() * lu.solve(CVec::Unit(dimension(), i));
  }

  /// Holomorphic derivative of log tau in P_i from log|tau| along P_i + h and P_i + i h.
  cplx finite_difference(int i) const {
    const CVec dir = deformation(i);
    const double h = opt_.step;
    auto f = [&](cplx t) {
      std::vector<cplx> x = params_;
      for (std::size_t j = 0; j < x.size(); ++j) x[j] += t * dir(j);
      return log_abs_tau_at(x);
    };
    const double dre = (f(h) - f(-h)) / (2.0 * h);
    const double dim = (f(I * h) - f(-I * h)) / (2.0 * h);
    return cplx(dre, -dim);
  }

  /// Dual classes s_j^* in H_{n-1} with s_j^* . s_i = delta_ij, as columns over (a, b).
  CMat dual_basis() const {
    const int n = cover_.cover.n;
    const CMat& S1 = cover_.H[1 % n].basis;
    const CMat& S2 = cover_.H[(n - 1) % n].basis;
    const CMat J = to_complex(standard_J(cover_.cover.genus_hat));
    const CMat M = S2.transpose() * J * S1;
    return S2 * M.transpose().inverse();
  }

  /// Integrals of (S_B - S_v)/v over the symplectic basis (a_1.., b_1..) of the cover.
  const CVec& contour_periods() const {
    if (Q_.size()) return Q_;
    const CyclicCover& cov = cover_.cover;
    const StarGraph G = cover_star(cov, cover_center_);
    const Continuation K = cover_continuation(cov, G.center);
    const PeriodData P = period_matrix(w_.curve, base_center_, {}, opt_.integration);
    const CurvePt aux{opt_.aux, w_.curve.s_principal(opt_.aux)};
    const TauContext ctx(w_, P, aux, opt_.hub, opt_.tau);
    CurveIntegrand F = [&](cplx x, cplx s, cplx t) {
      return (ctx.bergman_connection({x, s}) - ctx.abelian_connection(x)) * s / t;
    };
    const double radius = opt_.radius_fraction * star_clearance(G.center, G.points);
    std::vector<cplx> loops(G.num_edges());
    for (int e = 0; e < G.num_edges(); ++e)
      loops[e] = general_loop_integral(G, K, F, G.edge_loop(e), G.sheet_of(G.edge_tail(e)), radius, opt_.integration);
    const int gh = cov.genus_hat;
    Q_.resize(2 * gh);
    auto chain = [&](const IVec& z) {
      cplx s = 0.0;
      for (int e = 0; e < G.num_edges(); ++e) s += static_cast<double>(z(e)) * loops[e];
      return s;
    };
    for (int j = 0; j < gh; ++j) {
      Q_(j) = chain(cover_.marking.a(j));
      Q_(gh + j) = chain(cover_.marking.b(j));
    }
    return Q_;
  }

  /// -1/(12 pi i n) int_{s_i^*} (S_B - S_v)/v.
  cplx contour(int i) const {
    const CVec D = dual_basis().col(i);
    const cplx integral = (D.transpose() * contour_periods())(0, 0);
    return -opt_.prefactor_scale / (12.0 * pi * I * static_cast<double>(cover_.cover.n)) * integral;
  }

  VariationalResult check(int i) const {
    VariationalResult r;
    r.coordinate = i;
    r.finite_difference = finite_difference(i);
    r.contour = contour(i);
    r.residual = std::abs(r.finite_difference - r.contour) / std::abs(r.contour);
    return r;
  }

private:
  NDifferential member(const std::vector<cplx>& x) const {
    const std::vector<cplx> p(x.begin(), x.begin() + np_), q(x.begin() + np_, x.end());
    return build_ndifferential(build_curve(p), w_.n, q);
  }

  NDifferential w_;
  VariationalOptions opt_;
  int np_ = 0;
  std::vector<cplx> params_;
  cplx base_center_, cover_center_;
  CoverPeriods cover_;
  CVec P0_;
  mutable CMat J_;
  mutable CVec Q_;
};

}  // namespace prymtau
