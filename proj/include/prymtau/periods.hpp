#pragma once

// Integration of differentials on the base curve and on the cover along the
// star loops, period matrices, homological coordinates and Abel maps.

#include <functional>

#include "prymtau/homology.hpp"
#include "prymtau/quadrature.hpp"

namespace prymtau {

/// Analytic continuation of (s, t) from a center c by the product formula
/// s(x) = s_c prod sqrt((x-e)/(c-e)), t(x) = t_c prod ((x-r)/(c-r))^{mu/n}.
/// Continuous on the plane minus the rays from each special point away from c.
struct Continuation {
  cplx c{};
  cplx s_c{1.0}, t_c{1.0};
  int n = 1;
  std::vector<cplx> proots;
  std::vector<std::pair<cplx, int>> qroots;

  Continuation() = default;
  Continuation(cplx center, const Poly& p, const Poly& q, int n_, const std::vector<cplx>& pr,
               const std::vector<std::pair<cplx, int>>& qr)
      : c(center), n(n_), proots(pr), qroots(qr) {
    s_c = std::sqrt(p(center));
    t_c = std::pow(q(center), 1.0 / n_);
  }

  /// (s, t) at x on sheet 0.  For the special point `special` (index into
  /// proots, then qroots) the factor is computed from the exact offset
  /// x - point; with `tracked` its argument is `arc_arg` instead of principal.
  std::pair<cplx, cplx> at(cplx x, int special = -1, cplx offset = 0.0, bool tracked = false,
                           double arc_arg = 0.0) const {
    cplx s = s_c, t = t_c;
    const int np = static_cast<int>(proots.size());
    for (int i = 0; i < np; ++i) {
      const cplx ratio = (i == special ? offset : x - proots[i]) / (c - proots[i]);
      s *= (i == special && tracked) ? std::polar(std::sqrt(std::abs(ratio)), 0.5 * arc_arg) : std::sqrt(ratio);
    }
    for (int i = 0; i < static_cast<int>(qroots.size()); ++i) {
      const bool sp = (np + i == special);
      const cplx ratio = (sp ? offset : x - qroots[i].first) / (c - qroots[i].first);
      const double e = static_cast<double>(qroots[i].second) / n;
      t *= (sp && tracked) ? std::polar(std::pow(std::abs(ratio), e), e * arc_arg) : std::pow(ratio, e);
    }
    return {s, t};
  }
};

inline Continuation base_continuation(const HyperellipticCurve& C, cplx center) {
  return Continuation(center, C.p, Poly({1.0}), 1, C.branch_points, {});
}

inline Continuation cover_continuation(const CyclicCover& cov, cplx center) {
  return Continuation(center, cov.curve().p, cov.base.q, cov.n, cov.curve().branch_points, cov.base.q_roots());
}

/// Index of a star point inside the continuation's special-point list.
inline int continuation_index(const Continuation& K, cplx b) {
  for (std::size_t i = 0; i < K.proots.size(); ++i)
    if (K.proots[i] == b) return static_cast<int>(i);
  for (std::size_t i = 0; i < K.qroots.size(); ++i)
    if (K.qroots[i].first == b) return static_cast<int>(K.proots.size() + i);
  throw SheetJump("point is not special for this continuation");
}

/// Integrand F(x, s, t) dx on the curve or cover.
using CurveIntegrand = std::function<cplx(cplx, cplx, cplx)>;

/// Character of a sheet h = (a, c) for f s^{-eps} t^{-b} dx.
inline cplx sheet_character(const CharDiff& u, Sheet h, int n) {
  const cplx rho = std::polar(1.0, 2 * pi / n);
  return ((u.eps * h[0]) % 2 ? -1.0 : 1.0) * std::pow(rho, -u.b * h[1]);
}

struct IntegrationOptions {
  double rel_tol = 1e-12;
};

/// int_{center}^{b_j} u on sheet 0 (endpoint singular at b_j).
inline cplx star_segment_integral(const StarGraph& G, const Continuation& K, const CurveIntegrand& F, int j,
                                  const IntegrationOptions& opt = {}) {
  const int idx = continuation_index(K, G.points[j]);
  SegmentIntegrand f = [&](cplx x, int end, cplx off) {
    auto [s, t] = end == 1 ? K.at(x, idx, off) : K.at(x);
    return F(x, s, t);
  };
  return integrate_segment(f, G.center, G.points[j], false, true, 2 * G.N, opt.rel_tol).value;
}

/// Periods of a character differential over the star: returns the loop
/// integrals L_j = (1 - chi(phi_j)) int_seg u on sheet 0.
inline CVec star_loop_integrals(const StarGraph& G, const Continuation& K, const CharDiff& u,
                                const IntegrationOptions& opt = {}) {
  CVec L(G.m());
  CurveIntegrand F = [&](cplx x, cplx s, cplx t) { return u.coefficient(x, s, t); };
  for (int j = 0; j < G.m(); ++j)
    L(j) = (1.0 - sheet_character(u, G.phi[j], G.N)) * star_segment_integral(G, K, F, j, opt);
  return L;
}

/// Integral of a character differential over an edge chain, given its loop integrals.
inline cplx chain_integral(const StarGraph& G, const CharDiff& u, const CVec& loops, const IVec& z) {
  cplx total = 0.0;
  for (int e = 0; e < G.num_edges(); ++e)
    if (z(e) != 0)
      total += static_cast<double>(z(e)) * sheet_character(u, G.sheet_of(G.edge_tail(e)), G.N) * loops(G.edge_loop(e));
  return total;
}

/// Loop integral of an arbitrary integrand over gamma_j lifted to sheet h.
/// With radius > 0 the loop runs to distance `radius` from b_j and closes by
/// an explicit circle (for integrands not integrable at b_j).
inline cplx general_loop_integral(const StarGraph& G, const Continuation& K, const CurveIntegrand& F, int j,
                                  Sheet h, double radius = 0.0, const IntegrationOptions& opt = {}) {
  const cplx rho = std::polar(1.0, 2 * pi / G.N);
  const cplx b = G.points[j];
  const Sheet h2 = G.add(h, G.phi[j]);
  auto on_sheet = [&](Sheet hh, cplx s, cplx t) {
    return std::pair<cplx, cplx>{(hh[0] ? -1.0 : 1.0) * s, std::pow(rho, hh[1]) * t};
  };
  const int idx = continuation_index(K, b);
  auto seg = [&](Sheet hh) {
    SegmentIntegrand f = [&](cplx x, int end, cplx off) {
      auto [s0, t0] = end == 1 ? K.at(x, idx, off) : K.at(x);
      auto [s, t] = on_sheet(hh, s0, t0);
      return F(x, s, t);
    };
    if (radius <= 0.0) return integrate_segment(f, G.center, b, false, true, 2 * G.N, opt.rel_tol).value;
    const cplx end = b - radius * (b - G.center) / std::abs(b - G.center);
    return integrate_segment(f, G.center, end, false, false, 2, opt.rel_tol).value;
  };
  cplx total = seg(h) - seg(h2);
  if (radius > 0.0) {
    const double theta0 = std::arg(G.center - b);
    auto g = [&](double phi, cplx x) {
      auto [s0, t0] = K.at(x, idx, x - b, true, phi);
      auto [s, t] = on_sheet(h, s0, t0);
      return F(x, s, t);
    };
    total += integrate_arc(g, b, radius, theta0, 2 * pi, opt.rel_tol).value;
  }
  return total;
}

/// Integral of an arbitrary integrand over an edge chain.
inline cplx general_chain_integral(const StarGraph& G, const Continuation& K, const CurveIntegrand& F,
                                   const IVec& z, double radius = 0.0, const IntegrationOptions& opt = {}) {
  cplx total = 0.0;
  for (int e = 0; e < G.num_edges(); ++e)
    if (z(e) != 0)
      total += static_cast<double>(z(e)) *
               general_loop_integral(G, K, F, G.edge_loop(e), G.sheet_of(G.edge_tail(e)), radius, opt);
  return total;
}

/// Period data of a list of holomorphic differentials with respect to a marking.
struct PeriodData {
  SymplecticBasis marking;
  Continuation cont;
  std::vector<CharDiff> diffs;  // differential basis u_1..u_g
  CMat loops;                   // per-differential star loop integrals (rows)
  CMat A, B;                    // A(i,j) = int_{a_j} u_i, B(i,j) = int_{b_j} u_i
  CMat normalizer;              // v = normalizer * u has A-periods = identity
  CMat Omega;
  int genus = 0;

  double min_imag_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<RMat> es(Omega.imag());
    return es.eigenvalues().minCoeff();
  }
  double symmetry_residual() const { return (Omega - Omega.transpose()).cwiseAbs().maxCoeff(); }
  /// Normalized differential coefficients: v_i = sum_k normalizer(i,k) u_k.
  CVec v_values(cplx x, cplx s, cplx t = 1.0) const {
    CVec u(diffs.size());
    for (std::size_t k = 0; k < diffs.size(); ++k) u(k) = diffs[k].coefficient(x, s, t);
    return normalizer * u;
  }
  /// Integral of u_i over any edge chain.
  CVec chain_periods(const IVec& z) const {
    CVec out(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) out(i) = chain_integral(marking.star, diffs[i], loops.row(i).transpose(), z);
    return out;
  }
};

/// Periods of `diffs` over a marking.  Omega = A^{-1} B when the differentials
/// span the holomorphic differentials.
inline PeriodData assemble_periods(const SymplecticBasis& S, const Continuation& K, const std::vector<CharDiff>& diffs,
                                   CMat loops) {
  PeriodData P;
  P.marking = S;
  P.cont = K;
  P.diffs = diffs;
  P.genus = S.genus;
  const int nd = static_cast<int>(diffs.size()), g = S.genus;
  if (loops.rows() != nd || loops.cols() != S.star.m()) throw SizeMismatch("loop table shape");
  P.loops = std::move(loops);
  P.A.resize(nd, g);
  P.B.resize(nd, g);
  for (int i = 0; i < nd; ++i)
    for (int j = 0; j < g; ++j) {
      P.A(i, j) = chain_integral(S.star, diffs[i], P.loops.row(i).transpose(), S.a(j));
      P.B(i, j) = chain_integral(S.star, diffs[i], P.loops.row(i).transpose(), S.b(j));
    }
  if (nd == g) {
    P.normalizer = P.A.inverse();
    P.Omega = P.normalizer * P.B;
  }
  return P;
}

/// Star loop integrals of each differential (rows).
inline CMat loop_table(const SymplecticBasis& S, const Continuation& K, const std::vector<CharDiff>& diffs,
                       const IntegrationOptions& opt = {}) {
  CMat L(diffs.size(), S.star.m());
  for (std::size_t i = 0; i < diffs.size(); ++i) L.row(i) = star_loop_integrals(S.star, K, diffs[i], opt).transpose();
  return L;
}

inline PeriodData periods_of(const SymplecticBasis& S, const Continuation& K, const std::vector<CharDiff>& diffs,
                             const IntegrationOptions& opt = {}) {
  return assemble_periods(S, K, diffs, loop_table(S, K, diffs, opt));
}

/// Holomorphic differentials x^k dx/s on the base curve.
inline std::vector<CharDiff> base_differentials(const HyperellipticCurve& C) {
  std::vector<CharDiff> out;
  for (const auto& m : ndiff_basis(C, 1)) {
    std::vector<cplx> c(m.a + 1, 0.0);
    c[m.a] = 1.0;
    out.push_back({Poly(c), 1, 0});
  }
  return out;
}

/// Period matrix of the base curve.  A seed edge chain becomes a_1.
inline PeriodData period_matrix(const HyperellipticCurve& C, std::optional<cplx> star_center = {},
                                std::optional<IVec> seed = {}, const IntegrationOptions& opt = {}) {
  StarGraph G = base_star(C, star_center);
  SymplecticBasis S = symplectic_basis(G, C.genus, seed);
  PeriodData P = periods_of(S, base_continuation(C, G.center), base_differentials(C), opt);
  if (P.min_imag_eigenvalue() <= 0.0) throw NotPositiveDefinite("Im Omega is not positive definite");
  return P;
}

/// Same data in a new marking given by an integer symplectic matrix T acting
/// on the (a, b) cycle vector.
inline PeriodData remark(const PeriodData& P, const IMat& T) {
  SymplecticBasis S = change_marking(P.marking, T);
  PeriodData Q = P;
  Q.marking = S;
  const int nd = static_cast<int>(P.diffs.size()), g = S.genus;
  for (int i = 0; i < nd; ++i)
    for (int j = 0; j < g; ++j) {
      Q.A(i, j) = chain_integral(S.star, P.diffs[i], P.loops.row(i).transpose(), S.a(j));
      Q.B(i, j) = chain_integral(S.star, P.diffs[i], P.loops.row(i).transpose(), S.b(j));
    }
  Q.normalizer = Q.A.inverse();
  Q.Omega = Q.normalizer * Q.B;
  return Q;
}

/// Riemann bilinear residual max |A_u . B_w - B_u . A_w| over pairs of differentials.
inline double bilinear_residual(const PeriodData& P) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < P.A.rows(); ++i)
    for (Eigen::Index j = 0; j < P.A.rows(); ++j) {
      const cplx r = (P.A.row(i).cwiseProduct(P.B.row(j))).sum() - (P.B.row(i).cwiseProduct(P.A.row(j))).sum();
      worst = std::max(worst, std::abs(r));
    }
  return worst;
}

/// Hodge Gram matrix (i/2) int u_i ^ conj(u_j) from periods.
inline CMat hodge_gram(const PeriodData& P) {
  const int nd = static_cast<int>(P.A.rows());
  CMat G(nd, nd);
  for (int i = 0; i < nd; ++i)
    for (int j = 0; j < nd; ++j) {
      cplx s = 0.0;
      for (int l = 0; l < P.genus; ++l)
        s += P.A(i, l) * std::conj(P.B(j, l)) - P.B(i, l) * std::conj(P.A(j, l));
      G(i, j) = 0.5 * I * s;
    }
  return G;
}

/// Decomposes v = Omega m + m' with real m, m'.
inline std::pair<RVec, RVec> lattice_coordinates(const CMat& Omega, const CVec& v) {
  const RMat Y = Omega.imag();
  RVec m = Y.ldlt().solve(v.imag());
  RVec mp = (v - Omega * m.cast<cplx>()).real();
  return {m, mp};
}

/// Distance of v from the period lattice Z^g + Omega Z^g (in lattice units).
inline double lattice_residual(const CMat& Omega, const CVec& v) {
  auto [m, mp] = lattice_coordinates(Omega, v);
  double r = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    r = std::max(r, std::abs(m(i) - std::round(m(i))));
    r = std::max(r, std::abs(mp(i) - std::round(mp(i))));
  }
  return r;
}

/// Homology, deck action, eigenspaces and periods of a cyclic cover.
struct CoverPeriods {
  CyclicCover cover;
  SymplecticBasis marking;
  IMat deck;
  std::vector<EigenHomology> H;
  std::vector<EigenDifferentialBasis> Lambda;
  PeriodData periods;  // all eigen monomials, ordered by k
  CVec v_periods;      // periods of v over (a_1..a_gh, b_1..b_gh)
  CVec v_loops;
};

inline CoverPeriods cover_periods(const CyclicCover& cov, std::optional<cplx> star_center = {},
                                  const IntegrationOptions& opt = {}) {
  CoverPeriods R;
  R.cover = cov;
  StarGraph G = cover_star(cov, star_center);
  R.marking = symplectic_basis(G, cov.genus_hat);
  R.deck = deck_action_h1(R.marking, cov.n);
  std::vector<CharDiff> diffs;
  for (int k = 0; k < cov.n; ++k) {
    R.H.push_back(eigen_homology(R.deck, cov.n, k, eigen_homology_dim(cov.genus(), cov.n, k)));
    R.Lambda.push_back(eigen_basis(cov, k));
    for (const auto& m : R.Lambda.back().elements) diffs.push_back(m.as_diff());
  }
  Continuation K = cover_continuation(cov, G.center);
  R.periods = periods_of(R.marking, K, diffs, opt);
  const CharDiff v = canonical_v(cov);
  R.v_loops = star_loop_integrals(G, K, v, opt);
  const int gh = cov.genus_hat;
  R.v_periods.resize(2 * gh);
  for (int j = 0; j < gh; ++j) {
    R.v_periods(j) = chain_integral(G, v, R.v_loops, R.marking.a(j));
    R.v_periods(gh + j) = chain_integral(G, v, R.v_loops, R.marking.b(j));
  }
  return R;
}

/// Integral of a character differential with given loop integrals over a
/// complex class with coefficients over (a, b).
inline cplx class_integral(const CVec& basis_periods, const CVec& cls) { return (cls.transpose() * basis_periods)(0, 0); }

struct HomologicalCoordinates {
  CVec P;                 // P_i = int_{s_i} v over the H_1 basis
  double max_other = 0.0; // largest |int_s v| over unit s in H_l, l != 1
};

inline HomologicalCoordinates homological_coordinates(const CoverPeriods& R) {
  HomologicalCoordinates hc;
  const int n = R.cover.n;
  hc.P = R.H[1 % n].basis.transpose() * R.v_periods;
  for (int l = 0; l < n; ++l) {
    if (l == 1 % n) continue;
    const CVec o = R.H[l].basis.transpose() * R.v_periods;
    if (o.size()) hc.max_other = std::max(hc.max_other, o.cwiseAbs().maxCoeff());
  }
  return hc;
}

/// Abel map A_e(P) = int_e^P (v_1..v_g) on the base curve with basepoint a
/// finite branch point e.  Paths run straight from a hub point c; the cut
/// system is the set of rays from each branch point away from c.
class AbelMap {
public:
  AbelMap(const HyperellipticCurve& C, const PeriodData& P, cplx hub, int base_branch = 0,
          const IntegrationOptions& opt = {})
      : C_(C), N_(P.normalizer), diffs_(P.diffs), hub_(hub), opt_(opt),
        K_(base_continuation(C, hub)), e_(C.branch_points.at(base_branch)) {
    hub_to_e_ = leg_to_branch(base_branch, 1.0);
  }

  cplx hub() const { return hub_; }
  cplx basepoint() const { return e_; }
  const Continuation& continuation() const { return K_; }

  /// A_e(P) for P = (x, s).
  CVec operator()(cplx x, cplx s) const {
    double sigma = 1.0;
    const CVec h = from_hub(x, s, &sigma);
    return h - sigma * hub_to_e_;
  }

  /// Integral from the hub to (x, s) along the cut-system path.
  CVec from_hub(cplx x, cplx s, double* sheet = nullptr) const {
    const int nb = static_cast<int>(C_.branch_points.size());
    double sep = std::numeric_limits<double>::infinity();
    int near = -1;
    double dnear = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb; ++k) {
      const double d = std::abs(x - C_.branch_points[k]);
      if (d < dnear) {
        dnear = d;
        near = k;
      }
      for (int l = 0; l < nb; ++l)
        if (l != k) sep = std::min(sep, std::abs(C_.branch_points[k] - C_.branch_points[l]));
    }
    if (dnear == 0.0) return leg_to_branch(near, 1.0);
    const cplx s_hub_path = K_.at(x).first;
    const double sigma = std::abs(s_hub_path - s) < std::abs(s_hub_path + s) ? 1.0 : -1.0;
    if (sheet) *sheet = sigma;
    if (std::abs(s) > 0 && std::abs(s_hub_path - sigma * s) > 1e-6 * std::abs(s))
      throw SheetJump("point does not lie on the curve");
    if (dnear > 0.1 * sep) return sigma * segment(hub_, x, false);
    // two legs: hub -> e_k on the sheet of the target, then e_k -> x
    return leg_to_branch(near, sigma) + from_branch(near, x, s);
  }

private:
  CVec integrand(cplx x, cplx s) const {
    CVec u(diffs_.size());
    for (std::size_t k = 0; k < diffs_.size(); ++k) u(k) = diffs_[k].coefficient(x, s, 1.0);
    return N_ * u;
  }

  // int_hub^x on sheet 0 of the hub continuation, componentwise
  CVec segment(cplx a, cplx b, bool sing_b, int special = -1) const {
    const int g = static_cast<int>(N_.rows());
    CVec out(g);
    for (int i = 0; i < g; ++i) {
      SegmentIntegrand f = [&](cplx y, int end, cplx off) {
        auto [s, t] = (end == 1 && special >= 0) ? K_.at(y, special, off) : K_.at(y);
        return integrand(y, s)(i);
      };
      out(i) = integrate_segment(f, a, b, false, sing_b, 2, opt_.rel_tol).value;
    }
    return out;
  }

  CVec leg_to_branch(int k, double sigma) const { return sigma * segment(hub_, C_.branch_points[k], true, k); }

  // int_{e_k}^{(x,s)} with s continued back from the target along the segment
  CVec from_branch(int k, cplx x, cplx s) const {
    const cplx e = C_.branch_points[k];
    const int g = static_cast<int>(N_.rows());
    CVec out(g);
    for (int i = 0; i < g; ++i) {
      SegmentIntegrand f = [&](cplx y, int end, cplx off) {
        cplx sv = s;
        for (std::size_t l = 0; l < C_.branch_points.size(); ++l) {
          const cplx b = C_.branch_points[l];
          const cplx num = (static_cast<int>(l) == k && end == 0) ? off : y - b;
          sv *= std::sqrt(num / (x - b));
        }
        return integrand(y, sv)(i);
      };
      out(i) = integrate_segment(f, e, x, true, false, 2, opt_.rel_tol).value;
    }
    return out;
  }

  HyperellipticCurve C_;
  CMat N_;
  std::vector<CharDiff> diffs_;
  cplx hub_;
  IntegrationOptions opt_;
  Continuation K_;
  cplx e_;
  CVec hub_to_e_;
};

}  // namespace prymtau
