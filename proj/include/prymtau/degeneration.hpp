#pragma once

#include <cmath>
#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "prymtau/cover.hpp"
#include "prymtau/rational.hpp"
#include "prymtau/tau.hpp"

namespace prymtau {

/// Least-squares line through (x_i, y_i) compared with an expected slope.
struct ExponentFit {
  double slope = 0.0, intercept = 0.0, stderr_ = 0.0, r2 = 0.0;
  double expected = 0.0;
  double rel_tol = 0.02;
  double abs_tol = 0.0;
  bool conclusive = false;
  bool pass = false;
};

inline ExponentFit fit_exponent(const std::vector<double>& xs, const std::vector<double>& ys, double expected,
                                double rel_tol = 0.02, double abs_tol = 0.0, double min_r2 = 0.999) {
  if (xs.size() != ys.size() || xs.size() < 3) throw InconclusiveFit("need at least three points");
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  ExponentFit f;
  f.expected = expected;
  f.rel_tol = rel_tol;
  f.abs_tol = abs_tol;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - f.intercept - f.slope * xs[i];
    rss += r * r;
  }
  // Data constant to rounding is an exact fit.
  const double flat = 1e-24 * m * std::max(1.0, my * my);
  f.r2 = syy > flat ? 1.0 - rss / syy : 1.0;
  f.stderr_ = std::sqrt(rss / std::max(m - 2.0, 1.0) / sxx);
  f.conclusive = f.r2 >= min_r2;
  const double tol = std::max({rel_tol * std::abs(expected), 2.0 * f.stderr_, abs_tol});
  f.pass = f.conclusive && std::abs(f.slope - expected) <= tol;
  return f;
}

/// Geometric grid eps0, eps0 r, ..., M points.
inline std::vector<double> geometric_grid(double eps0, int M = 12, double ratio = 0.8) {
  std::vector<double> g;
  for (int i = 0; i < M; ++i) g.push_back(eps0 * std::pow(ratio, i));
  return g;
}

/// Homogeneity exponent kappa = (1/12n^2) sum k(k+2n)/(k+n).
inline Rational kappa_exact(const std::vector<int>& signature, int n) {
  Rational s(0);
  for (int k : signature) s += Rational(k * (k + 2 * n), k + n);
  return s / Rational(12 * n * n);
}

/// psi-coefficient (g-1)(2n+1)/(6n(n+1)).
inline Rational psi_coefficient(int g, int n) { return Rational((g - 1) * (2 * n + 1), 6 * n * (n + 1)); }

inline NDifferential scaled(const NDifferential& w, cplx delta) {
  std::vector<cplx> c = w.q.coeffs();
  for (auto& v : c) v *= delta;
  return build_ndifferential(w.curve, w.n, c);
}

struct HomogeneityResult {
  std::vector<double> deltas, log_tau;
  ExponentFit fit;
  Rational expected;
  double rel_error() const { return std::abs(fit.slope - expected.value()) / expected.value(); }
};

/// Regression of log|tau(C, delta w)| against log delta.
inline HomogeneityResult measure_homogeneity(const NDifferential& w, const PeriodData& P, CurvePt aux, cplx hub,
                                             int points = 7, const TauOptions& opt = {}) {
  HomogeneityResult R;
  R.expected = kappa_exact(w.signature(), w.n);
  std::vector<double> xs;
  for (int i = 0; i < points; ++i) {
    const double d = 0.5 * std::pow(4.0, static_cast<double>(i) / (points - 1));
    R.deltas.push_back(d);
    xs.push_back(std::log(d));
    R.log_tau.push_back(TauContext(scaled(w, d), P, aux, hub, opt).log_abs_tau());
  }
  R.fit = fit_exponent(xs, R.log_tau, R.expected.value(), 1e-6);
  return R;
}

struct FamilyMember {
  double eps = 0.0;
  double log_transverse = 0.0;  // log |t|
  double log_observable = 0.0;  // log |tau| or log |det|
};

struct DegenerationFamily {
  std::string kind;
  int g = 0, n = 0;
  std::vector<FamilyMember> members;
  ExponentFit fit;
};

/// |int_a^b f^{1/n} dx| for f = q / p^{n/2}, with integrable singularities at both ends.
/// `za`, `zb` are roots of q or p located exactly at a and b.
inline double abs_v_integral(const HyperellipticCurve& C, const Poly& q, int n, cplx a, cplx b) {
  // separate the local factors at the endpoints, the remainder is smooth and nonzero
  auto local = [&](cplx y, int end, cplx off) {
    const cplx da = end == 0 ? off : y - a, db = end == 1 ? off : y - b;
    return std::pair<cplx, cplx>{da, db};
  };
  const cplx qa = q(a), qb = q(b), pa = C.p(a), pb = C.p(b);
  const bool a_q = std::abs(qa) < 1e-13 * std::max(1.0, std::abs(q.leading())),
             b_q = std::abs(qb) < 1e-13 * std::max(1.0, std::abs(q.leading()));
  const bool a_p = std::abs(pa) < 1e-13, b_p = std::abs(pb) < 1e-13;
  auto deflate = [](const Poly& P, cplx r) {
    // P / (x - r) by synthetic division
    const auto& c = P.coeffs();
    std::vector<cplx> out(c.size() - 1);
    cplx acc = 0.0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
      acc = acc * r + c[k];
      out[k - 1] = acc;
    }
    return Poly(out);
  };
  Poly qr = q, pr = C.p;
  if (a_q) qr = deflate(qr, a);
  if (b_q) qr = deflate(qr, b);
  if (a_p) pr = deflate(pr, a);
  if (b_p) pr = deflate(pr, b);
  const double dn = n;
  auto smooth = [&](cplx y) { return qr(y) / std::pow(pr(y), 0.5 * dn); };
  const cplx mid = 0.5 * (a + b);
  const cplx s_mid = smooth(mid), root_mid = std::pow(s_mid, 1.0 / dn);
  SegmentIntegrand F = [&](cplx y, int end, cplx off) {
    auto [da, db] = local(y, end, off);
    cplx v = root_mid * std::pow(smooth(y) / s_mid, 1.0 / dn);
    if (a_q) v *= std::pow(da, 1.0 / dn);
    if (b_q) v *= std::pow(db, 1.0 / dn);
    if (a_p) v *= std::pow(da, -0.5);
    if (b_p) v *= std::pow(db, -0.5);
    return v;
  };
  return std::abs(integrate_segment(F, a, b, true, true, 2 * n, 1e-12).value);
}

/// q_eps = (x - e - eps u) c(x): a root of q approaching the branch point e.
inline NDifferential weierstrass_collision(const HyperellipticCurve& C, int n, const Poly& cofactor, int branch,
                                           cplx u, double eps) {
  const cplx r = C.branch_points.at(branch) + eps * u;
  return build_ndifferential(C, n, (Poly::from_roots({r}) * cofactor).coeffs(), std::min(1e-6, 0.1 * eps));
}

/// log|t_deg| for the Weierstrass collision: t_deg = (int_{x1}^{x2} v)^{2n/(n+2)}, the path
/// running through the branch point, so the integral is twice int_r^e v.
inline double log_t_deg_weierstrass(const NDifferential& w, cplx r, cplx e) {
  const double I1 = 2.0 * abs_v_integral(w.curve, w.q, w.n, r, e);
  return 2.0 * w.n / (w.n + 2.0) * std::log(I1);
}

/// log|t_deg| for one pair of zeros at r - eps and r + eps on the same sheet.
inline double log_t_deg_pair(const NDifferential& w, cplx a, cplx b) {
  return 2.0 * w.n / (w.n + 2.0) * std::log(abs_v_integral(w.curve, w.q, w.n, a, b));
}

/// Default grid start: 1/20 of the distance from x0 to the nearest other special point.
inline double default_eps0(const HyperellipticCurve& C, const Poly& cofactor, cplx x0) {
  double d = std::numeric_limits<double>::infinity();
  for (cplx b : C.branch_points)
    if (std::abs(b - x0) > 1e-12) d = std::min(d, std::abs(b - x0));
  if (cofactor.degree() > 0)
    for (cplx r : cofactor.roots()) d = std::min(d, std::abs(r - x0));
  return d / 20.0;
}

struct CollisionOptions {
  int branch = 0;
  std::optional<cplx> direction;  // default: perpendicular to (e - hub)
  std::vector<double> grid;
  bool symmetric = false;         // r +- eps collision of two roots of q instead
  cplx symmetric_center{0.0};
  cplx aux{0.3, 0.2};
  cplx hub{0.05, 0.11};
  TauOptions tau{};
  int jobs = 1;
};

/// Collision of zeros of w (boundary divisor D_deg) and the fit of log|tau| against log|t_deg|.
inline DegenerationFamily collide_zeros_family(const HyperellipticCurve& C, int n, const Poly& cofactor,
                                               const CollisionOptions& opt) {
  DegenerationFamily F;
  F.kind = opt.symmetric ? "collide-symmetric" : "collide-weierstrass";
  F.g = C.genus;
  F.n = n;
  const PeriodData P = period_matrix(C);
  const CurvePt aux{opt.aux, C.s_principal(opt.aux)};
  const cplx e = C.branch_points.at(opt.branch);
  cplx u = opt.direction.value_or(I * (e - opt.hub) / std::abs(e - opt.hub));
  F.members.resize(opt.grid.size());
  parallel_for(opt.grid.size(), opt.jobs, [&](std::size_t i) {
    const double eps = opt.grid[i];
    FamilyMember m;
    m.eps = eps;
    NDifferential w;
    if (opt.symmetric) {
      const cplx a = opt.symmetric_center - eps * u, b = opt.symmetric_center + eps * u;
      w = build_ndifferential(C, n, (Poly::from_roots({a, b}) * cofactor).coeffs());
      m.log_transverse = 2.0 * log_t_deg_pair(w, a, b);
    } else {
      w = weierstrass_collision(C, n, cofactor, opt.branch, u, eps);
      m.log_transverse = log_t_deg_weierstrass(w, e + eps * u, e);
    }
    if (!w.simple_stratum) throw GridTooCoarse("family member left the simple stratum");
    m.log_observable = TauContext(w, P, aux, opt.hub, opt.tau).log_abs_tau();
    F.members[i] = m;
  });
  std::vector<double> xs, ys;
  for (const auto& m : F.members) {
    xs.push_back(m.log_transverse);
    ys.push_back(m.log_observable);
  }
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] < xs[i - 1])) throw GridTooCoarse("|t_deg| is not monotone along the grid");
  F.fit = fit_exponent(xs, ys, 1.0 / (12.0 * n * (n + 1)));
  return F;
}

struct PinchOptions {
  std::vector<double> grid;
  cplx center{0.0};                // midpoint the two branch points collide at
  std::optional<cplx> star_center; // fixed for the whole family
  std::optional<cplx> direction;   // default: perpendicular to (center - star center)
  cplx aux{0.3, 0.2};
  cplx hub{0.05, 0.11};
  TauOptions tau{};
  IntegrationOptions integration{};
  int jobs = 1;
};

struct PinchData {
  cplx P_alpha, P_beta;
  double log_t0 = 0.0;  // log |exp(2 pi i P_beta / P_alpha)|
};

/// Index pair of the colliding points in a star, first one earlier in angle.
inline std::pair<int, int> pinch_indices(const StarGraph& G, cplx a, cplx b) {
  auto nearest = [&](cplx z) {
    int best = 0;
    for (int j = 1; j < G.m(); ++j)
      if (std::abs(G.points[j] - z) < std::abs(G.points[best] - z)) best = j;
    return best;
  };
  int ia = nearest(a), ib = nearest(b);
  if (ia == ib) throw CycleTrackingLost("pinching points not resolved by the star");
  if (std::abs(ia - ib) != 1 && std::abs(ia - ib) != G.m() - 1)
    throw CycleTrackingLost("pinching points are not adjacent around the star");
  if (ia > ib) std::swap(ia, ib);
  if (ib - ia != 1) std::swap(ia, ib);  // wrap-around pair
  return {ia, ib};
}

/// Edge chain of the vanishing cycle starting on sheet h: gamma_a then gamma_b.
inline IVec vanishing_chain(const StarGraph& G, int ja, int jb, Sheet h = {0, 0}) {
  IVec z = IVec::Zero(G.num_edges());
  const int h0 = G.sheet_index(h);
  z(G.edge(h0, ja)) += 1;
  z(G.edge(G.edge_head(G.edge(h0, ja)), jb)) += 1;
  return z;
}

/// P_alpha, P_beta on the cover for a nonseparating pinch of two branch points a, b.
/// Both classes are rho-weighted sums over the n lifts, so each period is n times
/// the period of one lift.
inline PinchData pinch_periods(const CyclicCover& cov, cplx a, cplx b, cplx star_center,
                               const IntegrationOptions& opt = {}) {
  const StarGraph G = cover_star(cov, star_center);
  const auto [ja, jb] = pinch_indices(G, a, b);
  const IVec va = vanishing_chain(G, ja, jb);
  const SymplecticBasis S = symplectic_basis(G, cov.genus_hat, va);
  const Continuation K = cover_continuation(cov, G.center);
  const CharDiff v = canonical_v(cov);
  const CVec loops = star_loop_integrals(G, K, v, opt);
  const int n = cov.n, gh = cov.genus_hat;
  // <sigma^m a, beta> = delta_{m0}
  IMat M(n, 2 * gh);
  IVec z = va;
  for (int m = 0; m < n; ++m) {
    M.row(m) = (z.transpose() * S.form * S.cycles);
    z = deck_push(G, z);
  }
  IVec rhs = IVec::Zero(n);
  rhs(0) = 1;
  const auto y = solve_integer(M, rhs);
  if (!y) throw CycleTrackingLost("no integral dual class to the vanishing cycle");
  const IVec beta = S.cycles * *y;
  PinchData d;
  d.P_alpha = static_cast<double>(n) * chain_integral(G, v, loops, va);
  d.P_beta = static_cast<double>(n) * chain_integral(G, v, loops, beta);
  d.log_t0 = std::real(2.0 * pi * I * d.P_beta / d.P_alpha);
  return d;
}

/// Nonseparating pinch (boundary divisor D_0): two roots of p collide, q fixed.
inline DegenerationFamily pinch_family(const std::vector<cplx>& p_roots, int ia, int ib, int n,
                                       const Poly& q, const PinchOptions& opt) {
  DegenerationFamily F;
  F.kind = "pinch-nonseparating";
  F.n = n;
  cplx sc = opt.star_center.value_or(0.0);
  if (!opt.star_center) {
    std::vector<cplx> pts = p_roots;
    pts[ia] = opt.center;
    pts.erase(pts.begin() + ib);
    for (cplx r : q.roots()) pts.push_back(r);
    sc = choose_star_center(pts);
  }
  const cplx u = opt.direction.value_or(I * (opt.center - sc) / std::abs(opt.center - sc));
  F.g = (static_cast<int>(p_roots.size()) - 1) / 2;
  F.members.resize(opt.grid.size());
  parallel_for(opt.grid.size(), opt.jobs, [&](std::size_t i) {
    const double eps = opt.grid[i];
    std::vector<cplx> roots = p_roots;
    roots[ia] = opt.center - eps * u;
    roots[ib] = opt.center + eps * u;
    const HyperellipticCurve C = build_curve_from_roots(roots);
    const NDifferential w = build_ndifferential(C, n, q.coeffs());
    const StarGraph G = base_star(C, sc);
    const auto [ja, jb] = pinch_indices(G, roots[ia], roots[ib]);
    const SymplecticBasis S = symplectic_basis(G, C.genus, vanishing_chain(G, ja, jb));
    const PeriodData P = periods_of(S, base_continuation(C, sc), base_differentials(C), opt.integration);
    const CurvePt aux{opt.aux, C.s_principal(opt.aux)};
    FamilyMember m;
    m.eps = eps;
    m.log_observable = TauContext(w, P, aux, opt.hub, opt.tau).log_abs_tau();
    m.log_transverse = pinch_periods(build_cover(w), roots[ia], roots[ib], sc, opt.integration).log_t0;
    F.members[i] = m;
  });
  std::vector<double> xs, ys;
  for (const auto& m : F.members) {
    xs.push_back(m.log_transverse);
    ys.push_back(m.log_observable);
  }
  F.fit = fit_exponent(xs, ys, 1.0 / 12.0);
  return F;
}


// ---------------------------------------------------------------------------
// Phi_k near a Weierstrass collision

/// Exact frame data of the monomial basis of Lambda^(k) at a collision point.
struct FrameValuation {
  std::vector<Rational> exponents;  // tau-orders m_j of the monomials, x - e = tau^2
  Rational c_frame{0};              // sum of min(0, m_j + 1)
  int rank_drop = 0;                // number of m_j + 1 < 0
};

/// Valuations of Lambda^(k) monomials at a branch point where one root of q lands.
inline FrameValuation frame_valuation(const CyclicCover& cov, int k) {
  const EigenDifferentialBasis L = eigen_basis(cov, k);
  std::map<std::pair<int, int>, int> groups;
  for (const auto& m : L.elements) ++groups[{m.eps, m.b}];
  FrameValuation F;
  for (const auto& [key, count] : groups) {
    const Rational m0 = Rational(1 - key.first) - Rational(2 * key.second, cov.n);
    for (int j = 0; j < count; ++j) {
      const Rational mj = m0 + Rational(2 * j);
      F.exponents.push_back(mj);
      const Rational s = mj + Rational(1);
      if (s < Rational(0)) {
        F.c_frame += s;
        ++F.rank_drop;
      }
    }
  }
  return F;
}

struct PhiMember {
  double eps = 0.0;
  double log_gap = 0.0;          // log|zeta_1 - zeta_2|, taken as log|t_deg| / 2
  double log_det_monomial = 0.0;
  double log_det_hodge = 0.0;
  std::vector<double> log_singular;  // Hodge-normalized, descending
};

struct PhiDegeneration {
  int g = 0, n = 0, k = 0;
  FrameValuation frame;
  double intrinsic = 0.0;
  std::vector<PhiMember> members;
  ExponentFit monomial_fit, hodge_fit;
  std::vector<double> singular_slopes;
  int measured_rank_drop = 0;
  double final_gap = 0.0;  // sigma_{r-d} / sigma_{r-d+1} at the smallest eps
  bool rank_ok() const { return measured_rank_drop == frame.rank_drop; }
};

struct PhiOptions {
  int branch = 0;
  std::optional<cplx> direction;
  std::optional<cplx> star_center;
  std::vector<double> grid;
  std::optional<double> intrinsic;  // defaults to -c_frame
  int jobs = 1;
  double slope_threshold = -1.0;    // defaults to 1/(2n)
  IntegrationOptions integration{};
};

/// log|det| through pivoted LU.
inline double log_abs_det(const CMat& M) {
  Eigen::PartialPivLU<CMat> lu(M);
  const CMat& U = lu.matrixLU();
  double s = 0.0;
  for (int i = 0; i < U.rows(); ++i) s += std::log(std::abs(U(i, i)));
  return s;
}

/// Hodge Gram (i/2) int u_i ^ conj(u_j) of a block of rows of cover periods.
inline CMat hodge_gram_rows(const PeriodData& P, int row0, int count) {
  CMat G(count, count);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j) {
      cplx s = 0.0;
      for (int l = 0; l < P.genus; ++l)
        s += P.A(row0 + i, l) * std::conj(P.B(row0 + j, l)) - P.B(row0 + i, l) * std::conj(P.A(row0 + j, l));
      G(i, j) = 0.5 * I * s;
    }
  return 0.5 * (G + G.adjoint());
}


/// Phi_k along a Weierstrass collision family, in monomial and Hodge-normalized frames.
inline PhiDegeneration phi_k_degeneration(const HyperellipticCurve& C, int n, const Poly& cofactor, int k,
                                          const PhiOptions& opt) {
  PhiDegeneration R;
  R.g = C.genus;
  R.n = n;
  R.k = k;
  const cplx e = C.branch_points.at(opt.branch);
  std::vector<cplx> special = C.branch_points;
  if (cofactor.degree() > 0)
    for (cplx r : cofactor.roots()) special.push_back(r);
  const cplx sc = opt.star_center.value_or(choose_star_center(special));
  const cplx u = opt.direction.value_or(I * (e - sc) / std::abs(e - sc));
  const std::vector<KDiffMonomial> dst = ndiff_basis(C, n - k + 1);
  if (opt.grid.empty()) throw InconclusiveFit("empty grid");
  R.frame = frame_valuation(build_cover(weierstrass_collision(C, n, cofactor, opt.branch, u, opt.grid.front())), k);
  R.members.resize(opt.grid.size());
  parallel_for(opt.grid.size(), opt.jobs, [&](std::size_t idx) {
    const double eps = opt.grid[idx];
    const NDifferential w = weierstrass_collision(C, n, cofactor, opt.branch, u, eps);
    if (!w.simple_stratum) throw GridTooCoarse("family member left the simple stratum");
    const CyclicCover cov = build_cover(w);
    const CoverPeriods CP = cover_periods(cov, sc, opt.integration);
    int row0 = 0;
    for (int l = 0; l < k; ++l) row0 += CP.Lambda[l].rank();
    const EigenDifferentialBasis& src = CP.Lambda[k];
    const CMat Phi = phi_k_matrix(cov, k, src, dst);
    const CMat G = hodge_gram_rows(CP.periods, row0, src.rank());
    Eigen::LLT<CMat> llt(G);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("Hodge Gram of Lambda^(k)");
    const CMat M = llt.matrixL().solve(CMat(Phi.adjoint())).adjoint();
    PhiMember m;
    m.eps = eps;
    m.log_gap = 0.5 * log_t_deg_weierstrass(w, e + eps * u, e);
    m.log_det_monomial = log_abs_det(Phi);
    m.log_det_hodge = log_abs_det(M);
    const RVec sv = Eigen::JacobiSVD<CMat>(M).singularValues();
    for (int i = 0; i < sv.size(); ++i) m.log_singular.push_back(std::log(sv(i)));
    R.members[idx] = m;
  });
  for (std::size_t i = 1; i < R.members.size(); ++i)
    if (!(R.members[i].log_gap < R.members[i - 1].log_gap)) throw GridTooCoarse("|t_deg| is not monotone along the grid");

  R.intrinsic = opt.intrinsic.value_or(-R.frame.c_frame.value());
  const double expected_mono = R.intrinsic + R.frame.c_frame.value();
  std::vector<double> xs, ym, yh;
  for (const auto& m : R.members) {
    xs.push_back(m.log_gap);
    ym.push_back(m.log_det_monomial);
    yh.push_back(m.log_det_hodge);
  }
  // Zero expectations are judged against 2% of the intrinsic order.
  const double abs_tol = 0.02 * std::max(std::abs(R.intrinsic), 1.0 / n);
  // R^2 carries no information about a zero slope.
  const double r2_mono = expected_mono == 0.0 ? 0.0 : 0.999;
  const double r2_hodge = R.intrinsic == 0.0 ? 0.0 : 0.999;
  R.monomial_fit = fit_exponent(xs, ym, expected_mono, 0.02, abs_tol, r2_mono);
  R.hodge_fit = fit_exponent(xs, yh, R.intrinsic, 0.02, abs_tol, r2_hodge);

  const double thr = opt.slope_threshold > 0 ? opt.slope_threshold : 0.5 / n;
  const std::size_t r = R.members.front().log_singular.size();
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<double> yi;
    for (const auto& m : R.members) yi.push_back(m.log_singular[i]);
    const double sl = fit_exponent(xs, yi, 0.0, 0.0, 0.0, 0.0).slope;
    R.singular_slopes.push_back(sl);
    if (sl > thr) ++R.measured_rank_drop;
  }
  const int d = R.measured_rank_drop;
  if (d > 0 && d < static_cast<int>(r)) {
    const auto& ls = R.members.back().log_singular;
    R.final_gap = std::exp(ls[r - d - 1] - ls[r - d]);
  }
  return R;
}

// ---------------------------------------------------------------------------
// Limit cover y^n = (zeta - z1)(zeta - z2) over the bubble

struct LimitCoverModel {
  int n = 0;
  cplx z1{0.0}, z2{1.0};
  int genus = 0;              // floor((n-1)/2)
  int nodes = 0;              // points over infinity: gcd(n, 2)
  std::vector<int> eigen_k;   // k with q^(k) = dzeta / y^(n-k) holomorphic
  /// Coefficient of q^(k) against dzeta at (zeta, y).
  cplx differential(int k, cplx y) const { return std::pow(y, -(n - k)); }
  /// Genus of the other component given the total cover genus.
  int complement_genus(int genus_hat) const { return genus_hat - n / 2; }
  /// Total genus from the two components and the node count.
  int glued_genus(int genus_hat) const { return genus + complement_genus(genus_hat) + nodes - 1; }
};

inline LimitCoverModel limit_cover_model(int n, cplx z1 = 0.0, cplx z2 = 1.0) {
  if (n < 2) throw DimensionMismatch("n must be at least 2");
  LimitCoverModel M;
  M.n = n;
  M.z1 = z1;
  M.z2 = z2;
  M.nodes = std::gcd(n, 2);
  M.genus = (n - M.nodes) / 2;
  // dzeta / y^l: order n-1-l at z1, z2; at infinity order (2l - n)/gcd - 1 in the local parameter.
  for (int l = 1; l < n; ++l) {
    const int ord_inf = (2 * l - n) / M.nodes - 1;
    if (n - 1 - l >= 0 && ord_inf >= 0) M.eigen_k.push_back(n - l);
  }
  std::sort(M.eigen_k.begin(), M.eigen_k.end());
  return M;
}

}  // namespace prymtau
