#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "prymtau/io.hpp"
#include "prymtau/variational.hpp"

namespace prymtau {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"ranks",         "homology",       "periods",
                                              "tau-homogeneity", "tau-modular",  "degenerate-deg",
                                              "degenerate-d0", "phi-k",          "variational"};
  return names;
}

struct GridConfig {
  std::optional<double> eps0;
  std::optional<int> points;
  std::optional<double> ratio;
};

struct ExperimentTolerances {
  double slope_rel = 0.02;
  double r2 = 0.999;
  double kappa_rel = 1e-6;
  double modular = 1e-6;
  double riemann = 1e-8;
  double selection = 1e-10;
  double variational = 1e-3;
};

struct ExperimentConfig {
  std::string experiment;
  std::string spec;
  std::optional<int> g, n;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool no_cache = false;
  std::string out = ".";
  std::string cache_dir = ".prymtau-cache";
  int branch = 0;
  GridConfig grid;
  ExperimentTolerances tolerances;
};

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown field '" + key + "' in " + where);
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
void take(const json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  T v{};
  take(j, key, v);
  dst = v;
}

}  // namespace detail

/// Applies the fields of a JSON config object; unknown fields are rejected.
inline void apply_config(const json& j, ExperimentConfig& c) {
  detail::reject_unknown(j,
                         {"experiment", "spec", "g", "n", "seed", "jobs", "no_cache", "out", "cache_dir", "branch",
                          "grid", "tolerances"},
                         "config");
  detail::take(j, "experiment", c.experiment);
  detail::take(j, "spec", c.spec);
  detail::take(j, "g", c.g);
  detail::take(j, "n", c.n);
  detail::take(j, "seed", c.seed);
  detail::take(j, "jobs", c.jobs);
  detail::take(j, "no_cache", c.no_cache);
  detail::take(j, "out", c.out);
  detail::take(j, "cache_dir", c.cache_dir);
  detail::take(j, "branch", c.branch);
  if (j.contains("grid")) {
    const json& gj = j["grid"];
    detail::reject_unknown(gj, {"eps0", "points", "ratio"}, "grid");
    detail::take(gj, "eps0", c.grid.eps0);
    detail::take(gj, "points", c.grid.points);
    detail::take(gj, "ratio", c.grid.ratio);
  }
  if (j.contains("tolerances")) {
    const json& tj = j["tolerances"];
    auto& t = c.tolerances;
    detail::reject_unknown(tj, {"slope_rel", "r2", "kappa_rel", "modular", "riemann", "selection", "variational"},
                           "tolerances");
    detail::take(tj, "slope_rel", t.slope_rel);
    detail::take(tj, "r2", t.r2);
    detail::take(tj, "kappa_rel", t.kappa_rel);
    detail::take(tj, "modular", t.modular);
    detail::take(tj, "riemann", t.riemann);
    detail::take(tj, "selection", t.selection);
    detail::take(tj, "variational", t.variational);
  }
}

inline void validate(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  if (c.spec.empty() && (!c.g || !c.n)) throw ConfigError("need --spec or both --g and --n");
  if (c.g && *c.g < 1) throw ConfigError("g must be positive");
  if (c.n && *c.n < 1) throw ConfigError("n must be positive");
  if (c.jobs < 1) throw ConfigError("jobs must be positive");
  if (c.grid.points && *c.grid.points < 3) throw ConfigError("grid needs at least 3 points");
  if (c.grid.ratio && (*c.grid.ratio <= 0.0 || *c.grid.ratio >= 1.0)) throw ConfigError("grid ratio must lie in (0, 1)");
  if (c.grid.eps0 && *c.grid.eps0 <= 0.0) throw ConfigError("grid eps0 must be positive");
}

inline json to_json(const ExperimentTolerances& t) {
  return {{"slope_rel", t.slope_rel}, {"r2", t.r2},           {"kappa_rel", t.kappa_rel},
          {"modular", t.modular},     {"riemann", t.riemann}, {"selection", t.selection},
          {"variational", t.variational}};
}

/// Generic spec from seeded random roots: p of degree 2g+1, q of degree n(g-1) away from p.
inline CurveSpec synthetic_spec(int g, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto draw = [&](double rmin, double rmax, const std::vector<cplx>& avoid, double sep) {
    for (;;) {
      const cplx z = std::polar(rmin + (rmax - rmin) * U(rng), 2.0 * pi * U(rng));
      bool ok = true;
      for (cplx a : avoid) ok = ok && std::abs(a - z) > sep;
      if (ok) return z;
    }
  };
  std::vector<cplx> pr, qr, all;
  for (int i = 0; i < 2 * g + 1; ++i) {
    pr.push_back(draw(0.6, 1.4, pr, 0.25));
  }
  all = pr;
  for (int i = 0; i < n * (g - 1); ++i) {
    qr.push_back(draw(0.3, 1.8, all, 0.25));
    all.push_back(qr.back());
  }
  CurveSpec s;
  s.n = n;
  s.p = Poly::from_roots(pr).coeffs();
  s.q = qr.empty() ? std::vector<cplx>{1.0} : Poly::from_roots(qr).coeffs();
  return s;
}

/// Base period matrices cached on disk by content hash; entries hold the loop table only.
struct PeriodCache {
  std::string dir;
  bool enabled = false;
  std::function<std::string(const std::string&)> hash;

  std::string marking_key(const HyperellipticCurve& C, const SymplecticBasis& S) const {
    json k = {{"p", json::array()}, {"center", to_json(S.star.center)}, {"cycles", json::array()}};
    for (cplx c : C.p.coeffs()) k["p"].push_back(to_json(c));
    for (Eigen::Index j = 0; j < S.cycles.cols(); ++j)
      for (Eigen::Index e = 0; e < S.cycles.rows(); ++e) k["cycles"].push_back(S.cycles(e, j));
    return hash ? hash(k.dump()) : std::string();
  }

  PeriodData get(const HyperellipticCurve& C, const IntegrationOptions& opt = {}) const {
    const StarGraph G = base_star(C);
    const SymplecticBasis S = symplectic_basis(G, C.genus);
    const Continuation K = base_continuation(C, G.center);
    const std::vector<CharDiff> diffs = base_differentials(C);
    const std::string key = marking_key(C, S);
    const std::filesystem::path file = std::filesystem::path(dir) / (key + ".json");
    CMat loops;
    if (enabled && !key.empty() && std::filesystem::exists(file)) {
      loops = cmat_from_json(read_json_file(file.string())["loops"]);
    } else {
      loops = loop_table(S, K, diffs, opt);
      if (enabled && !key.empty()) {
        std::filesystem::create_directories(dir);
        std::ofstream(file) << json{{"loops", to_json(loops)}}.dump();
      }
    }
    PeriodData P = assemble_periods(S, K, diffs, loops);
    if (P.min_imag_eigenvalue() <= 0.0) throw NotPositiveDefinite("Im Omega is not positive definite");
    return P;
  }
};


struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline json to_json(const Check& c) {
  return {{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}};
}

struct ExperimentReport {
  json payload = json::object();
  json marking = nullptr;  // cycles and star center of the base marking, when one is used
  std::vector<Check> checks;
  std::string csv;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  void check_le(const std::string& name, double value, double tol) { checks.push_back({name, value, tol, value <= tol}); }
  void check_eq(const std::string& name, long got, long want) {
    checks.push_back({name, static_cast<double>(got), static_cast<double>(want), got == want});
  }
};

inline json marking_json(const PeriodData& P) {
  const json j = to_json(P);
  return {{"star_center", j["star_center"]}, {"cycles", j["cycles"]}};
}

namespace detail {

inline std::vector<double> grid_from(const GridConfig& g, double eps0, int points, double ratio) {
  return geometric_grid(g.eps0.value_or(eps0), g.points.value_or(points), g.ratio.value_or(ratio));
}

/// q with its root nearest to x0 removed.
inline std::pair<Poly, cplx> split_nearest_root(const Poly& q, cplx x0) {
  std::vector<cplx> r = q.roots();
  if (r.empty()) throw ConfigError("q has no roots to collide");
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (std::abs(r[i] - x0) < std::abs(r[best] - x0)) best = i;
  const cplx removed = r[best];
  r.erase(r.begin() + static_cast<std::ptrdiff_t>(best));
  std::vector<cplx> c = Poly::from_roots(r).coeffs();
  for (auto& v : c) v *= q.leading();
  return {Poly(c), removed};
}

inline ExponentFit refit(const std::vector<double>& xs, const std::vector<double>& ys, double expected,
                         const ExperimentTolerances& t, double abs_tol = 0.0, std::optional<double> min_r2 = {}) {
  return fit_exponent(xs, ys, expected, t.slope_rel, abs_tol, min_r2.value_or(t.r2));
}

inline void fit_check(ExperimentReport& R, const std::string& name, const ExponentFit& f) {
  const double tol = std::max({f.rel_tol * std::abs(f.expected), 2.0 * f.stderr_, f.abs_tol});
  R.checks.push_back({name + ".slope", f.slope, tol, f.pass});
  R.checks.push_back({name + ".r2", f.r2, 0.0, f.conclusive});
}

}  // namespace detail


// ---------------------------------------------------------------------------
// Runners

inline ExperimentReport run_ranks(const NDifferential& w) {
  ExperimentReport R;
  const CyclicCover cov = build_cover(w);
  const int g = w.curve.genus, n = w.n;
  R.check_eq("genus_hat", cov.genus_hat, n * n * (g - 1) + 1);
  R.check_eq("genus_hat_riemann_hurwitz", cov.genus_hat_rh, cov.genus_hat);
  json ranks = json::array(), expected = json::array();
  int total = 0;
  for (int k = 0; k < n; ++k) {
    int r = -1;
    try {
      r = eigen_basis(cov, k).rank();
    } catch (const RankMismatch&) {
      r = -1;
    }
    ranks.push_back(r);
    expected.push_back(eigen_rank_formula(g, n, k));
    R.check_eq("rank_k" + std::to_string(k), r, eigen_rank_formula(g, n, k));
    total += r;
  }
  R.check_eq("rank_total", total, cov.genus_hat);
  R.payload = {{"g", g}, {"n", n}, {"genus_hat", cov.genus_hat}, {"genus_hat_rh", cov.genus_hat_rh},
               {"eigen_ranks", ranks}, {"expected_ranks", expected}};
  return R;
}

inline ExperimentReport run_homology(const NDifferential& w, const ExperimentTolerances& t) {
  ExperimentReport R;
  const CyclicCover cov = build_cover(w);
  const int g = w.curve.genus, n = w.n;
  const SymplecticBasis S = symplectic_basis(cover_star(cov), cov.genus_hat);
  const IMat deck = deck_action_h1(S, n);
  std::vector<EigenHomology> H;
  json dims = json::array();
  for (int k = 0; k < n; ++k) {
    H.push_back(eigen_homology(deck, n, k));
    dims.push_back(H.back().dimension());
    R.check_eq("dim_H" + std::to_string(k), H.back().dimension(), eigen_homology_dim(g, n, k));
  }
  const PairingReport P = pairing_vanishing_check(H, n, cov.genus_hat);
  R.check_le("selection_rule_residual", P.max_offblock, t.selection);
  R.checks.push_back({"dual_blocks_nondegenerate", P.dual_blocks_nondegenerate ? 1.0 : 0.0, 1.0,
                      P.dual_blocks_nondegenerate});
  R.payload = {{"g", g}, {"n", n}, {"genus_hat", cov.genus_hat}, {"dimensions", dims},
               {"selection_residual", P.max_offblock}, {"dual_condition", P.dual_condition}};
  return R;
}

inline ExperimentReport run_periods(const NDifferential& w, const PeriodData& P, const ExperimentTolerances& t) {
  ExperimentReport R;
  R.marking = marking_json(P);
  R.check_le("base.symmetry", P.symmetry_residual(), t.riemann);
  R.checks.push_back({"base.im_positive", P.min_imag_eigenvalue(), 0.0, P.min_imag_eigenvalue() > 0.0});
  const CoverPeriods CP = cover_periods(build_cover(w));
  R.check_le("cover.symmetry", CP.periods.symmetry_residual(), t.riemann);
  R.checks.push_back(
      {"cover.im_positive", CP.periods.min_imag_eigenvalue(), 0.0, CP.periods.min_imag_eigenvalue() > 0.0});
  R.payload = {{"base", to_json(P)}, {"cover", to_json(CP.periods)}, {"genus_hat", CP.cover.genus_hat}};
  return R;
}

struct TauSetup {
  cplx aux{0.3, 0.2};
  cplx hub{0.05, 0.11};
};

inline ExperimentReport run_tau_homogeneity(const NDifferential& w, const PeriodData& P,
                                            const ExperimentTolerances& t, TauSetup ts = {}) {
  ExperimentReport R;
  R.marking = marking_json(P);
  const CurvePt aux{ts.aux, w.curve.s_principal(ts.aux)};
  const HomogeneityResult H = measure_homogeneity(w, P, aux, ts.hub);
  const double log_tau = TauContext(w, P, aux, ts.hub).log_abs_tau();
  R.check_le("kappa_rel_error", H.rel_error(), t.kappa_rel);
  std::ostringstream ks;
  ks << H.expected;
  R.payload = {{"abs_tau", std::exp(log_tau)},        {"log_abs_tau", log_tau},
               {"kappa_measured", H.fit.slope},       {"kappa_expected", H.expected.value()},
               {"kappa_expected_exact", ks.str()},    {"modular_residuals", json::array()},
               {"signature", w.signature()}};
  return R;
}

inline ExperimentReport run_tau_modular(const NDifferential& w, const PeriodData& P, std::uint64_t seed,
                                        const ExperimentTolerances& t, TauSetup ts = {}) {
  ExperimentReport R;
  R.marking = marking_json(P);
  const CurvePt aux{ts.aux, w.curve.s_principal(ts.aux)};
  const double ref = TauContext(w, P, aux, ts.hub).log_abs_tau();
  const int g = P.genus;
  std::mt19937_64 rng(seed);
  json res = json::array();
  for (int r = 0; r < 3; ++r) {
    const IMat T = random_symplectic(g, rng);
    const PeriodData Q = remark(P, T);
    const CMat C = to_complex(T.block(0, g, g, g)), D = to_complex(T.block(0, 0, g, g));
    const double expected = std::log(std::abs((C * P.Omega + D).determinant()));
    const double got = TauContext(w, Q, aux, ts.hub).log_abs_tau() - ref;
    const double resid = std::abs(std::exp(got - expected) - 1.0);
    res.push_back(resid);
    R.check_le("modular_" + std::to_string(r), resid, t.modular);
  }
  R.payload = {{"abs_tau", std::exp(ref)},  {"log_abs_tau", ref},  {"kappa_measured", nullptr},
               {"kappa_expected", nullptr}, {"modular_residuals", res}};
  return R;
}


inline ExperimentReport run_degenerate_deg(const NDifferential& w, const ExperimentConfig& c) {
  ExperimentReport R;
  const HyperellipticCurve& C = w.curve;
  const cplx e = C.branch_points.at(c.branch);
  const auto [cof, removed] = detail::split_nearest_root(w.q, e);
  CollisionOptions o;
  o.branch = c.branch;
  o.jobs = c.jobs;
  o.grid = detail::grid_from(c.grid, default_eps0(C, cof, e), 12, 0.8);
  DegenerationFamily F = collide_zeros_family(C, w.n, cof, o);
  std::vector<double> xs, ys;
  for (const auto& m : F.members) {
    xs.push_back(m.log_transverse);
    ys.push_back(m.log_observable);
  }
  F.fit = detail::refit(xs, ys, F.fit.expected, c.tolerances);
  detail::fit_check(R, "deg", F.fit);
  R.payload = to_json(F);
  R.payload["collided_root"] = to_json(removed);
  R.csv = family_csv(F);
  return R;
}

inline ExperimentReport run_degenerate_d0(const NDifferential& w, const ExperimentConfig& c) {
  ExperimentReport R;
  const std::vector<cplx>& roots = w.curve.branch_points;
  std::size_t ia = 0, ib = 1;
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (std::abs(roots[i] - roots[j]) < std::abs(roots[ia] - roots[ib])) {
        ia = i;
        ib = j;
      }
  PinchOptions o;
  o.jobs = c.jobs;
  o.center = 0.5 * (roots[ia] + roots[ib]);
  double clear = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roots.size(); ++i)
    if (i != ia && i != ib) clear = std::min(clear, std::abs(roots[i] - o.center));
  o.grid = detail::grid_from(c.grid, clear / 20.0, 12, 0.8);
  DegenerationFamily F = pinch_family(roots, static_cast<int>(ia), static_cast<int>(ib), w.n, w.q, o);
  std::vector<double> xs, ys;
  for (const auto& m : F.members) {
    xs.push_back(m.log_transverse);
    ys.push_back(m.log_observable);
  }
  F.fit = detail::refit(xs, ys, F.fit.expected, c.tolerances);
  detail::fit_check(R, "d0", F.fit);
  R.payload = to_json(F);
  R.payload["pinched_roots"] = {to_json(roots[ia]), to_json(roots[ib])};
  R.csv = family_csv(F);
  return R;
}

inline ExperimentReport run_phi_k(const NDifferential& w, const ExperimentConfig& c) {
  ExperimentReport R;
  const HyperellipticCurve& C = w.curve;
  const cplx e = C.branch_points.at(c.branch);
  const auto [cof, removed] = detail::split_nearest_root(w.q, e);
  R.payload = {{"families", json::array()}, {"collided_root", to_json(removed)}};
  std::ostringstream csv;
  csv.precision(17);
  csv << "k,eps,log_gap,log_det_monomial,log_det_hodge\n";
  for (int k = 1; k < w.n; ++k) {
    PhiOptions o;
    o.branch = c.branch;
    o.jobs = c.jobs;
    o.grid = detail::grid_from(c.grid, 2e-4, 12, 0.5);
    const PhiDegeneration P = phi_k_degeneration(C, w.n, cof, k, o);
    const std::string tag = "phi" + std::to_string(k);
    R.check_eq(tag + ".rank_drop", P.measured_rank_drop, P.frame.rank_drop);
    detail::fit_check(R, tag + ".monomial", P.monomial_fit);
    if (P.intrinsic != 0.0) detail::fit_check(R, tag + ".hodge", P.hodge_fit);
    R.payload["families"].push_back(to_json(P));
    for (const auto& m : P.members)
      csv << k << ',' << m.eps << ',' << m.log_gap << ',' << m.log_det_monomial << ',' << m.log_det_hodge << '\n';
  }
  R.csv = csv.str();
  return R;
}

inline ExperimentReport run_variational(const NDifferential& w, const ExperimentConfig& c) {
  ExperimentReport R;
  const VariationalProblem V(w);
  json rows = json::array();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < V.dimension(); ++i) {
    const VariationalResult r = V.check(i);
    best = std::min(best, r.residual);
    rows.push_back({{"coordinate", i},
                    {"finite_difference", to_json(r.finite_difference)},
                    {"contour", to_json(r.contour)},
                    {"residual", r.residual}});
  }
  R.check_le("best_residual", best, c.tolerances.variational);
  R.payload = {{"coordinates", rows}, {"dimension", V.dimension()}};
  return R;
}

/// Resolves the curve of a config: the spec file, or a seeded synthetic curve.
inline CurveSpec resolve_spec(const ExperimentConfig& c) {
  if (!c.spec.empty()) {
    CurveSpec s = load_curve_spec(c.spec);
    if (c.n && *c.n != s.n) throw ConfigError("--n disagrees with the spec");
    return s;
  }
  return synthetic_spec(*c.g, *c.n, c.seed);
}

inline ExperimentReport run_experiment(const ExperimentConfig& c, const CurveSpec& spec, const PeriodCache& cache) {
  NDifferential w;
  try {
    w = spec.ndifferential();
  } catch (const DegenerateCurve& e) {
    throw ConfigError(e.what());
  } catch (const WrongDegree& e) {
    throw ConfigError(e.what());
  }
  if (c.branch < 0 || c.branch >= static_cast<int>(w.curve.branch_points.size()))
    throw ConfigError("branch index out of range");
  const std::string& x = c.experiment;
  if (x == "ranks") return run_ranks(w);
  if (x == "homology") return run_homology(w, c.tolerances);
  if (x == "degenerate-deg") return run_degenerate_deg(w, c);
  if (x == "degenerate-d0") return run_degenerate_d0(w, c);
  if (x == "phi-k") return run_phi_k(w, c);
  if (x == "variational") return run_variational(w, c);
  const PeriodData P = cache.get(w.curve);
  if (x == "periods") return run_periods(w, P, c.tolerances);
  if (x == "tau-homogeneity") return run_tau_homogeneity(w, P, c.tolerances);
  if (x == "tau-modular") return run_tau_modular(w, P, c.seed, c.tolerances);
  throw ConfigError("unknown experiment '" + x + "'");
}

}  // namespace prymtau
