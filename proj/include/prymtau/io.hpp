#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prymtau/curve.hpp"
#include "prymtau/degeneration.hpp"
#include "prymtau/periods.hpp"

namespace prymtau {

using json = nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const CMat& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(to_json(M(i, j)));
    rows.push_back(r);
  }
  return rows;
}

inline CMat cmat_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  CMat M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) throw ConfigError("ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = complex_from_json(j[i][k]);
  }
  return M;
}

/// Curve spec {"p": [...], "q": [...], "n": int}, coefficients in increasing degree.
struct CurveSpec {
  std::vector<cplx> p, q;
  int n = 2;

  NDifferential ndifferential() const { return build_ndifferential(build_curve(p), n, q); }
  HyperellipticCurve curve() const { return build_curve(p); }
};

inline CurveSpec parse_curve_spec(const json& j) {
  if (!j.is_object()) throw ConfigError("curve spec must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "p" && key != "q" && key != "n") throw ConfigError("unknown curve-spec field '" + key + "'");
  if (!j.contains("p") || !j.contains("n")) throw ConfigError("curve spec needs 'p' and 'n'");
  CurveSpec s;
  if (!j["n"].is_number_integer() || j["n"].get<int>() < 1) throw ConfigError("'n' must be a positive integer");
  s.n = j["n"].get<int>();
  if (!j["p"].is_array()) throw ConfigError("'p' must be an array");
  for (const auto& c : j["p"]) s.p.push_back(complex_from_json(c));
  if (j.contains("q")) {
    if (!j["q"].is_array()) throw ConfigError("'q' must be an array");
    for (const auto& c : j["q"]) s.q.push_back(complex_from_json(c));
  }
  return s;
}

inline json to_json(const CurveSpec& s) {
  json p = json::array(), q = json::array();
  for (cplx c : s.p) p.push_back(to_json(c));
  for (cplx c : s.q) q.push_back(to_json(c));
  return {{"p", p}, {"q", q}, {"n", s.n}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline CurveSpec load_curve_spec(const std::string& path) { return parse_curve_spec(read_json_file(path)); }

inline json to_json(const ExponentFit& f) {
  return {{"slope", f.slope}, {"stderr", f.stderr_}, {"r2", f.r2}, {"expected", f.expected}, {"pass", f.pass}};
}

/// {kind, n, g, grid, observable, transverse, fit}.
inline json to_json(const DegenerationFamily& F) {
  json grid = json::array(), obs = json::array(), tr = json::array();
  for (const auto& m : F.members) {
    grid.push_back(m.eps);
    obs.push_back(m.log_observable);
    tr.push_back(m.log_transverse);
  }
  return {{"kind", F.kind}, {"n", F.n}, {"g", F.g}, {"grid", grid}, {"observable", obs}, {"transverse", tr},
          {"fit", to_json(F.fit)}};
}

inline std::string family_csv(const DegenerationFamily& F) {
  std::ostringstream os;
  os.precision(17);
  os << "eps,log_transverse,log_observable\n";
  for (const auto& m : F.members) os << m.eps << ',' << m.log_transverse << ',' << m.log_observable << '\n';
  return os.str();
}

inline json to_json(const PhiDegeneration& R) {
  json grid = json::array(), gap = json::array(), mono = json::array(), hodge = json::array();
  for (const auto& m : R.members) {
    grid.push_back(m.eps);
    gap.push_back(m.log_gap);
    mono.push_back(m.log_det_monomial);
    hodge.push_back(m.log_det_hodge);
  }
  std::ostringstream cf;
  cf << R.frame.c_frame;
  return {{"kind", "phi-k"},
          {"n", R.n},
          {"g", R.g},
          {"k", R.k},
          {"grid", grid},
          {"transverse", gap},
          {"observable", mono},
          {"observable_hodge", hodge},
          {"c_frame", cf.str()},
          {"rank_drop_expected", R.frame.rank_drop},
          {"rank_drop_measured", R.measured_rank_drop},
          {"singular_slopes", R.singular_slopes},
          {"singular_gap", R.final_gap},
          {"fit", to_json(R.monomial_fit)},
          {"fit_hodge", to_json(R.hodge_fit)}};
}

/// Omega, marking cycles and error estimates of a period computation.
inline json to_json(const PeriodData& P) {
  json cyc = json::array();
  for (Eigen::Index j = 0; j < P.marking.cycles.cols(); ++j) {
    json c = json::array();
    for (Eigen::Index e = 0; e < P.marking.cycles.rows(); ++e) c.push_back(P.marking.cycles(e, j));
    cyc.push_back(c);
  }
  return {{"genus", P.genus},
          {"star_center", to_json(P.marking.star.center)},
          {"cycles", cyc},
          {"Omega", to_json(P.Omega)},
          {"symmetry_residual", P.symmetry_residual()},
          {"min_imag_eigenvalue", P.min_imag_eigenvalue()},
          {"bilinear_residual", bilinear_residual(P)}};
}

}  // namespace prymtau
