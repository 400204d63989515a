#pragma once

// Homology of the base curve and of the cyclic cover from the abelian
// monodromy of a star of loops around the finite special points.
//
// Sheets over the star center are labelled by h = (a, c) in Z_2 x Z_N:
// s = (-1)^a s_0, t = rho^c t_0.  The loop gamma_j leaves the center slightly
// clockwise of the ray to b_j, encircles b_j counterclockwise and returns
// slightly counterclockwise of the ray; lifted to sheet h it ends on sheet
// h + phi_j.  These lifts are the edges of a ribbon graph whose cycle space
// surjects onto H_1.

#include <algorithm>
#include <array>
#include <optional>
#include <queue>
#include <random>

#include "prymtau/cover.hpp"

namespace prymtau {

using Sheet = std::array<int, 2>;

struct StarGraph {
  cplx center{};
  std::vector<cplx> points;  // finite special points, sorted by angle around center
  std::vector<int> kind;     // 0: root of p, 1: root of q
  std::vector<double> angle;
  std::vector<Sheet> phi;    // monodromy of gamma_j in Z_2 x Z_N
  int N = 1;                 // number of t-sheets (1 for the base curve)
  int n = 1;                 // cover degree for t; N == n on covers

  int m() const { return static_cast<int>(points.size()); }
  int num_sheets() const { return 2 * N; }
  int num_edges() const { return num_sheets() * m(); }
  int sheet_index(Sheet h) const { return ((h[0] % 2 + 2) % 2) * N + ((h[1] % N) + N) % N; }
  Sheet sheet_of(int idx) const { return {idx / N, idx % N}; }
  Sheet add(Sheet h, Sheet g) const { return {(h[0] + g[0]) % 2, (h[1] + g[1]) % N}; }
  int edge(int h, int j) const { return h * m() + j; }
  int edge_tail(int e) const { return e / m(); }
  int edge_loop(int e) const { return e % m(); }
  int edge_head(int e) const { return sheet_index(add(sheet_of(edge_tail(e)), phi[edge_loop(e)])); }
};

/// Distance from point z to the segment [a, b].
inline double point_segment_distance(cplx z, cplx a, cplx b) {
  const cplx d = b - a;
  double t = std::real((z - a) * std::conj(d)) / std::norm(d);
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

/// Clearance of a star center: smallest distance from a special point to a
/// segment joining the center to a different special point, or to the center.
inline double star_clearance(cplx c, const std::vector<cplx>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pts.size(); ++j) {
    best = std::min(best, std::abs(pts[j] - c));
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (i != j) best = std::min(best, point_segment_distance(pts[i], c, pts[j]));
  }
  return best;
}

/// Picks a star center maximizing clearance among seeded random candidates.
inline cplx choose_star_center(const std::vector<cplx>& pts, std::uint64_t seed = 1) {
  cplx mean = 0.0;
  double spread = 0.0;
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  for (const auto& p : pts) spread = std::max(spread, std::abs(p - mean));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  cplx best = mean + cplx(0.013, 0.021) * spread;
  double score = star_clearance(best, pts);
  for (int it = 0; it < 400; ++it) {
    const cplx c = mean + 0.9 * spread * cplx(U(rng), U(rng));
    const double s = star_clearance(c, pts);
    if (s > score) {
      score = s;
      best = c;
    }
  }
  return best;
}

inline StarGraph make_star(cplx center, const std::vector<cplx>& pts, const std::vector<int>& kinds, int N) {
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  auto ang = [&](int i) { return std::arg(pts[i] - center); };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return ang(a) < ang(b); });
  StarGraph G;
  G.center = center;
  G.N = N;
  G.n = N;
  for (int i : order) {
    G.points.push_back(pts[i]);
    G.kind.push_back(kinds[i]);
    G.angle.push_back(ang(i));
    G.phi.push_back(kinds[i] == 0 ? Sheet{1, 0} : Sheet{0, N > 1 ? 1 : 0});
  }
  return G;
}

/// Star graph for the base curve (roots of p only).
inline StarGraph base_star(const HyperellipticCurve& C, std::optional<cplx> center = {}, std::uint64_t seed = 1) {
  std::vector<int> kinds(C.branch_points.size(), 0);
  const cplx c = center ? *center : choose_star_center(C.branch_points, seed);
  return make_star(c, C.branch_points, kinds, 1);
}

/// Star graph for the cover (roots of p and roots of q).
inline StarGraph cover_star(const CyclicCover& cov, std::optional<cplx> center = {}, std::uint64_t seed = 1) {
  if (!cov.simple) throw NonSimpleStratum("cover homology requires simple zeros");
  std::vector<cplx> pts = cov.curve().branch_points;
  std::vector<int> kinds(pts.size(), 0);
  for (const auto& [r, m] : cov.base.q_roots()) {
    pts.push_back(r);
    kinds.push_back(1);
  }
  const cplx c = center ? *center : choose_star_center(pts, seed);
  return make_star(c, pts, kinds, cov.n);
}

struct Monodromy {
  StarGraph star;
  std::vector<std::vector<int>> permutations;  // sheet permutation of each gamma_j
  std::vector<int> at_infinity;                // permutation of the loop around infinity
  bool sphere_relation = false;                // composite of all loops is the identity
};

namespace detail {

// Continues (s, t) numerically along a polyline with nearest-root tracking.
inline std::pair<cplx, cplx> track(const std::vector<cplx>& path, const Poly& p, const Poly& q, int n,
                                   cplx s, cplx t) {
  const cplx rho = std::polar(1.0, 2 * pi / n);
  for (std::size_t k = 1; k < path.size(); ++k) {
    const cplx a = path[k - 1], b = path[k];
    double lam = 0.0, h = 1.0;
    int guard = 0;
    while (lam < 1.0) {
      h = std::min(h, 1.0 - lam);
      const cplx x = a + (lam + h) * (b - a);
      const cplx s1 = std::sqrt(p(x));
      const cplx sc = std::abs(s1 - s) < std::abs(-s1 - s) ? s1 : -s1;
      const cplx t1 = std::pow(q(x), 1.0 / n);
      cplx tc = t1;
      for (int m = 1; m < n; ++m) {
        const cplx cand = t1 * std::pow(rho, m);
        if (std::abs(cand - t) < std::abs(tc - t)) tc = cand;
      }
      const bool ok_s = std::abs(sc - s) < 0.25 * std::abs(2.0 * sc);
      const bool ok_t = n == 1 || std::abs(tc - t) < 0.25 * std::abs(tc) * std::abs(1.0 - rho);
      if (ok_s && ok_t) {
        s = sc;
        t = tc;
        lam += h;
        h *= 1.5;
      } else {
        h *= 0.5;
        if (h < 1e-12 || ++guard > 1000000) throw SheetTrackingFailure("continuation step rejected");
      }
    }
  }
  return {s, t};
}

}  // namespace detail

/// Sheet permutations of every loop, verified by numerical continuation.
inline Monodromy monodromy(const StarGraph& G, const Poly& p, const Poly& q) {
  Monodromy M;
  M.star = G;
  const int n = G.N;
  const cplx rho = std::polar(1.0, 2 * pi / n);
  const cplx s0 = std::sqrt(p(G.center)), t0 = std::pow(q(G.center), 1.0 / n);
  for (int j = 0; j < G.m(); ++j) {
    const cplx b = G.points[j];
    double r = std::abs(b - G.center);
    for (int i = 0; i < G.m(); ++i)
      if (i != j) r = std::min(r, std::abs(G.points[i] - b));
    r *= 0.3;
    const cplx dir = (b - G.center) / std::abs(b - G.center);
    std::vector<cplx> path{G.center, b - r * dir};
    for (int k = 1; k <= 64; ++k) path.push_back(b - r * dir * std::polar(1.0, 2 * pi * k / 64.0));
    path.push_back(G.center);
    auto [s1, t1] = detail::track(path, p, q, n, s0, t0);
    Sheet obs{std::abs(s1 - s0) < std::abs(s1 + s0) ? 0 : 1, 0};
    for (int m = 0; m < n; ++m)
      if (std::abs(t1 - t0 * std::pow(rho, m)) < std::abs(t1 - t0 * std::pow(rho, obs[1]))) obs[1] = m;
    if (obs != G.phi[j]) throw SheetTrackingFailure("observed monodromy differs from the branch type");
    std::vector<int> perm(G.num_sheets());
    for (int h = 0; h < G.num_sheets(); ++h) perm[h] = G.sheet_index(G.add(G.sheet_of(h), G.phi[j]));
    M.permutations.push_back(perm);
  }
  // loop around infinity: -(deg p mod 2, deg q mod N)
  const Sheet inf{(2 - p.degree() % 2) % 2, ((n - q.degree() % n) % n)};
  M.at_infinity.resize(G.num_sheets());
  for (int h = 0; h < G.num_sheets(); ++h) M.at_infinity[h] = G.sheet_index(G.add(G.sheet_of(h), inf));
  std::vector<int> comp(G.num_sheets());
  std::iota(comp.begin(), comp.end(), 0);
  for (const auto& perm : M.permutations)
    for (auto& c : comp) c = perm[c];
  for (auto& c : comp) c = M.at_infinity[c];
  M.sphere_relation = true;
  for (int h = 0; h < G.num_sheets(); ++h) M.sphere_relation = M.sphere_relation && comp[h] == h;
  return M;
}

/// Crossing table for the local intersection at a vertex with 2m half-edge
/// slots (out_j, in_j in counterclockwise order).
inline IMat local_crossing_table(int m) {
  const int S = 2 * m;
  const double spacing = 2 * pi / S, delta = 0.1 * spacing;
  const cplx c1 = 0.0, c2 = 1e-3 * std::polar(1.0, 0.7316);
  IMat X = IMat::Zero(S, S);
  auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
  for (int a = 0; a < S; ++a) {
    const cplx P = std::polar(1.0, spacing * a);
    for (int b = 0; b < S; ++b) {
      const double side = (b % 2 == 0) ? 1.0 : -1.0;
      const cplx Q = std::polar(1.0, spacing * b + delta * side);
      const cplx d1 = P - c1, d2 = Q - c2;
      const double den = cross(d1, d2);
      if (std::abs(den) < 1e-14) continue;
      const double t1 = cross(c2 - c1, d2) / den, t2 = cross(c2 - c1, d1) / den;
      if (t1 > 0 && t1 < 1 && t2 > 0 && t2 < 1) X(a, b) = den > 0 ? 1 : -1;
    }
  }
  return X;
}

/// Bilinear intersection form on edge chains (meaningful on cycles).
inline IMat edge_intersection_form(const StarGraph& G) {
  const IMat X = local_crossing_table(G.m());
  const int E = G.num_edges(), S = 2 * G.m();
  IMat Q = IMat::Zero(E, E);
  for (int h = 0; h < G.num_sheets(); ++h) {
    std::vector<int> edge(S), sgn(S);
    for (int j = 0; j < G.m(); ++j) {
      edge[2 * j] = G.edge(h, j);
      sgn[2 * j] = 1;
      const Sheet back{(G.sheet_of(h)[0] + 2 - G.phi[j][0]) % 2, (G.sheet_of(h)[1] + G.N - G.phi[j][1]) % G.N};
      edge[2 * j + 1] = G.edge(G.sheet_index(back), j);
      sgn[2 * j + 1] = -1;
    }
    for (int a = 0; a < S; ++a)
      for (int b = 0; b < S; ++b)
        if (X(a, b) != 0) Q(edge[a], edge[b]) += sgn[a] * sgn[b] * X(a, b);
  }
  return Q;
}

/// Fundamental cycles of a BFS spanning tree rooted at sheet 0, as columns.
/// `preferred` edges enter the tree first.
inline IMat cycle_basis(const StarGraph& G, const std::vector<int>& preferred = {},
                        std::vector<int>* nontree = nullptr) {
  const int V = G.num_sheets(), E = G.num_edges();
  std::vector<int> parent_edge(V, -1), parent_dir(V, 0);
  std::vector<bool> seen(V, false), in_tree(E, false);
  seen[0] = true;
  for (int e : preferred) {
    const int u = G.edge_tail(e), v = G.edge_head(e);
    if (seen[u] && !seen[v]) { seen[v] = true; parent_edge[v] = e; parent_dir[v] = 1; in_tree[e] = true; }
    else if (seen[v] && !seen[u]) { seen[u] = true; parent_edge[u] = e; parent_dir[u] = -1; in_tree[e] = true; }
  }
  std::queue<int> Qu;
  for (int v = 0; v < V; ++v)
    if (seen[v]) Qu.push(v);
  while (!Qu.empty()) {
    const int u = Qu.front();
    Qu.pop();
    for (int e = 0; e < E; ++e) {
      const int a = G.edge_tail(e), b = G.edge_head(e);
      if (a == u && !seen[b]) { seen[b] = true; parent_edge[b] = e; parent_dir[b] = 1; in_tree[e] = true; Qu.push(b); }
      else if (b == u && !seen[a]) { seen[a] = true; parent_edge[a] = e; parent_dir[a] = -1; in_tree[e] = true; Qu.push(a); }
    }
  }
  for (int v = 0; v < V; ++v)
    if (!seen[v]) throw RankDeficient("sheet graph is disconnected");
  // path from root to v as an edge chain
  auto root_path = [&](int v) {
    IVec z = IVec::Zero(E);
    while (parent_edge[v] >= 0) {
      const int e = parent_edge[v];
      z(e) += parent_dir[v];
      v = parent_dir[v] == 1 ? G.edge_tail(e) : G.edge_head(e);
    }
    return z;
  };
  std::vector<IVec> cols;
  for (int e = 0; e < E; ++e) {
    if (in_tree[e]) continue;
    if (nontree) nontree->push_back(e);
    IVec z = root_path(G.edge_tail(e)) - root_path(G.edge_head(e));
    z(e) += 1;
    cols.push_back(z);
  }
  IMat Z(E, cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) Z.col(i) = cols[i];
  return Z;
}

/// Symplectic basis a_1..a_g, b_1..b_g of H_1 realized as integer edge chains.
struct SymplecticBasis {
  StarGraph star;
  IMat form;       // edge intersection form
  IMat cycles;     // E x 2g, columns a_1..a_g, b_1..b_g
  IMat radical;    // cycles pairing trivially with everything
  IMat intersection;
  int genus = 0;

  std::int64_t pair(const IVec& z1, const IVec& z2) const { return z1.dot(form * z2); }
  /// Integer coordinates of a cycle in the basis: z = sum <z,b_i> a_i - <z,a_i> b_i.
  IVec coords(const IVec& z) const {
    IVec c(2 * genus);
    const IVec Fz = form.transpose() * z;  // Fz(e) = <z, e>
    for (int i = 0; i < genus; ++i) {
      c(i) = cycles.col(genus + i).dot(Fz);
      c(genus + i) = -cycles.col(i).dot(Fz);
    }
    return c;
  }
  IVec a(int i) const { return cycles.col(i); }
  IVec b(int i) const { return cycles.col(genus + i); }
};

inline IMat standard_J(int g) {
  IMat J = IMat::Zero(2 * g, 2 * g);
  for (int i = 0; i < g; ++i) {
    J(i, g + i) = 1;
    J(g + i, i) = -1;
  }
  return J;
}

namespace detail {
inline std::int64_t round_div(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(std::llround(static_cast<double>(a) / static_cast<double>(b)));
}
}  // namespace detail

/// Integer symplectic reduction of the cycle space.  An optional seed cycle
/// (edge chain) becomes a_1.
inline SymplecticBasis symplectic_basis(const StarGraph& G, int expected_genus,
                                        std::optional<IVec> seed = {}) {
  SymplecticBasis S;
  S.star = G;
  S.form = edge_intersection_form(G);
  std::vector<int> nontree;
  IMat Z = cycle_basis(G, {}, &nontree);
  const int r = static_cast<int>(Z.cols());
  int forced = -1;
  if (seed) {
    IVec c(r);
    for (int i = 0; i < r; ++i) c(i) = (*seed)(nontree[i]);
    if (Z * c != *seed) throw RankDeficient("seed is not a cycle");
    for (int i = 0; i < r && forced < 0; ++i)
      if (std::abs(c(i)) == 1) forced = i;
    if (forced < 0) throw RankDeficient("seed cycle is not primitive in the cycle basis");
    Z.col(forced) = *seed;
  }
  IMat K = Z.transpose() * S.form * Z;
  if (K != -K.transpose()) throw RankDeficient("intersection form is not antisymmetric");
  IMat B = IMat::Identity(r, r);
  std::vector<int> active(r);
  std::iota(active.begin(), active.end(), 0);
  std::vector<IVec> as, bs;
  auto row_op = [&](int k, std::int64_t q, int j) {  // e_k -= q e_j
    if (q == 0) return;
    B.row(k) -= q * B.row(j);
    K.row(k) -= q * K.row(j);
    K.col(k) -= q * K.col(j);
  };
  for (int guard = 0; guard < 100000; ++guard) {
    int bi = -1, bj = -1;
    std::int64_t best = 0;
    for (int i : active) {
      if (forced >= 0 && i != forced) continue;
      for (int j : active)
        if (i != j && K(i, j) != 0 && (best == 0 || std::abs(K(i, j)) < best)) {
          best = std::abs(K(i, j));
          bi = i;
          bj = j;
        }
    }
    if (bi < 0) {
      if (forced >= 0) throw RankDeficient("seed cycle lies in the radical");
      break;
    }
    const std::int64_t d = K(bi, bj);
    bool changed = false;
    for (int k : active) {
      if (k == bi || k == bj) continue;
      row_op(k, detail::round_div(K(bi, k), d), bj);
      row_op(k, detail::round_div(K(bj, k), K(bj, bi)), bi);
      changed = changed || K(bi, k) != 0 || K(bj, k) != 0;
    }
    if (changed) continue;
    if (std::abs(d) != 1) throw RankDeficient("intersection form is not unimodular");
    as.push_back(B.row(bi).transpose());
    bs.push_back(d * B.row(bj).transpose());
    active.erase(std::remove_if(active.begin(), active.end(), [&](int k) { return k == bi || k == bj; }),
                 active.end());
    forced = -1;
  }
  S.genus = static_cast<int>(as.size());
  if (S.genus != expected_genus)
    throw RankDeficient("found " + std::to_string(S.genus) + " handles, expected " + std::to_string(expected_genus));
  S.cycles.resize(G.num_edges(), 2 * S.genus);
  for (int i = 0; i < S.genus; ++i) {
    S.cycles.col(i) = Z * as[i];
    S.cycles.col(S.genus + i) = Z * bs[i];
  }
  S.radical.resize(G.num_edges(), active.size());
  for (std::size_t i = 0; i < active.size(); ++i) S.radical.col(i) = Z * B.row(active[i]).transpose();
  S.intersection = S.cycles.transpose() * S.form * S.cycles;
  if (S.intersection != standard_J(S.genus)) throw RankDeficient("reduction did not reach J");
  return S;
}

/// Applies a symplectic change of marking: new cycles = cycles * T^T where the
/// rows of T express (a~, b~) in (a, b).
inline SymplecticBasis change_marking(const SymplecticBasis& S, const IMat& T) {
  SymplecticBasis R = S;
  R.cycles = S.cycles * T.transpose();
  R.intersection = R.cycles.transpose() * R.form * R.cycles;
  if (R.intersection != standard_J(S.genus)) throw RankDeficient("marking change is not symplectic");
  return R;
}

/// Integer solution y of M y = rhs by column Hermite reduction, if one exists.
inline std::optional<IVec> solve_integer(IMat M, const IVec& rhs) {
  const Eigen::Index rows = M.rows(), cols = M.cols();
  IMat U = IMat::Identity(cols, cols);
  std::vector<Eigen::Index> pivot(rows, -1);
  Eigen::Index p = 0;
  for (Eigen::Index r = 0; r < rows && p < cols; ++r) {
    for (Eigen::Index c = p + 1; c < cols; ++c) {
      while (M(r, c) != 0) {
        const std::int64_t q = M(r, p) / M(r, c);
        M.col(p) -= q * M.col(c);
        U.col(p) -= q * U.col(c);
        M.col(p).swap(M.col(c));
        U.col(p).swap(U.col(c));
      }
    }
    if (M(r, p) != 0) pivot[r] = p++;
  }
  IVec w = IVec::Zero(cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    std::int64_t acc = rhs(r);
    for (Eigen::Index c = 0; c < cols; ++c)
      if (pivot[r] < 0 || c < pivot[r]) acc -= M(r, c) * w(c);
    if (pivot[r] < 0) {
      if (acc != 0) return std::nullopt;
      continue;
    }
    if (acc % M(r, pivot[r]) != 0) return std::nullopt;
    w(pivot[r]) = acc / M(r, pivot[r]);
  }
  return IVec(U * w);
}

/// Random element of Sp(2g, Z) acting on (a; b), as a product of elementary generators.
inline IMat random_symplectic(int g, std::mt19937_64& rng, int steps = 6) {
  std::uniform_int_distribution<int> kind(0, 2), idx(0, g - 1), val(-1, 1);
  IMat T = IMat::Identity(2 * g, 2 * g);
  for (int s = 0; s < steps; ++s) {
    IMat E = IMat::Identity(2 * g, 2 * g);
    const int i = idx(rng), j = idx(rng);
    int c = val(rng);
    if (c == 0) c = 1;
    switch (kind(rng)) {
      case 0:  // a_i += c b_j, a_j += c b_i
        E(i, g + j) += c;
        if (i != j) E(j, g + i) += c;
        break;
      case 1:  // b_i += c a_j, b_j += c a_i
        E(g + i, j) += c;
        if (i != j) E(g + j, i) += c;
        break;
      default:  // a_i += c a_j, b_j -= c b_i
        if (i == j) break;
        E(i, j) += c;
        E(g + j, g + i) -= c;
    }
    T = E * T;
  }
  return T;
}

/// Edge chain image under the deck transformation t -> rho t.
inline IVec deck_push(const StarGraph& G, const IVec& z) {
  IVec out = IVec::Zero(z.size());
  for (int e = 0; e < G.num_edges(); ++e) {
    if (z(e) == 0) continue;
    const Sheet h = G.add(G.sheet_of(G.edge_tail(e)), Sheet{0, 1});
    out(G.edge(G.sheet_index(h), G.edge_loop(e))) += z(e);
  }
  return out;
}

/// Integer matrix of sigma_* on H_1 in the symplectic basis (columns = images).
inline IMat deck_action_h1(const SymplecticBasis& S, int n) {
  const int d = 2 * S.genus;
  IMat M(d, d);
  for (int k = 0; k < d; ++k) M.col(k) = S.coords(deck_push(S.star, S.cycles.col(k)));
  IMat P = IMat::Identity(d, d);
  for (int i = 0; i < n; ++i) P = M * P;
  if (P != IMat::Identity(d, d)) throw NonPeriodic("sigma_*^n differs from the identity");
  const IMat J = standard_J(S.genus);
  if (M.transpose() * J * M != J) throw NonPeriodic("deck action does not preserve the intersection form");
  return M;
}

struct EigenHomology {
  int k = 0;
  CMat basis;  // 2g_hat x dim, coefficients over the symplectic basis
  int dimension() const { return static_cast<int>(basis.cols()); }
};

inline CMat to_complex(const IMat& M) { return M.cast<double>().cast<cplx>(); }

inline EigenHomology eigen_homology(const IMat& M, int n, int k, int expected_dim = -1, double tol = 1e-8) {
  const int d = static_cast<int>(M.rows());
  const cplx rho = std::polar(1.0, 2 * pi / n);
  const CMat Mc = to_complex(M);
  CMat P = CMat::Zero(d, d), Mm = CMat::Identity(d, d);
  for (int m = 0; m < n; ++m) {
    P += std::pow(rho, -k * m) * Mm;
    Mm = Mc * Mm;
  }
  P /= static_cast<double>(n);
  Eigen::JacobiSVD<CMat> svd(P, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) r += sv(i) > tol;
  EigenHomology H;
  H.k = k;
  H.basis = svd.matrixU().leftCols(r);
  if ((Mc * H.basis - std::pow(rho, k) * H.basis).norm() > 1e-10 * std::max(1.0, H.basis.norm()))
    throw DimensionMismatch("eigenspace residual too large");
  if (expected_dim >= 0 && r != expected_dim)
    throw DimensionMismatch("dim H_" + std::to_string(k) + " = " + std::to_string(r) + ", expected " +
                            std::to_string(expected_dim));
  return H;
}

inline int eigen_homology_dim(int g, int n, int k) { return k == 0 ? 2 * g : (2 * n + 2) * (g - 1); }

struct PairingReport {
  double max_offblock = 0.0;                // largest |block| entry with k + l != 0 mod n
  std::vector<double> dual_condition;       // condition numbers of the H_k x H_{n-k} blocks
  bool dual_blocks_nondegenerate = true;
};

inline PairingReport pairing_vanishing_check(const std::vector<EigenHomology>& H, int n, int g_hat) {
  const CMat J = to_complex(standard_J(g_hat));
  PairingReport R;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const CMat blk = H[k].basis.transpose() * J * H[l].basis;
      if ((k + l) % n != 0) {
        if (blk.size() > 0) R.max_offblock = std::max(R.max_offblock, blk.cwiseAbs().maxCoeff());
      } else if (k <= l) {
        Eigen::JacobiSVD<CMat> svd(blk);
        const auto& sv = svd.singularValues();
        const double cond = sv.size() ? sv(0) / sv(sv.size() - 1) : 1.0;
        R.dual_condition.push_back(cond);
        R.dual_blocks_nondegenerate = R.dual_blocks_nondegenerate && blk.rows() == blk.cols() && cond < 1e8;
      }
    }
  return R;
}

}  // namespace prymtau
