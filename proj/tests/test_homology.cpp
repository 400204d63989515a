#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "prymtau/homology.hpp"

using namespace prymtau;
using fixtures::generic_ndiff;
using fixtures::real_coeffs;

namespace {
IMat power(const IMat& M, int n) {
  IMat P = IMat::Identity(M.rows(), M.cols());
  for (int i = 0; i < n; ++i) P = M * P;
  return P;
}
}  // namespace

TEST(Monodromy, BaseTranspositions) {
  auto C = build_curve(real_coeffs({-1, 0, 0, 0, 0, 1}));
  auto G = base_star(C);
  auto M = monodromy(G, C.p, Poly({1.0}));
  ASSERT_EQ(M.permutations.size(), 5u);
  for (const auto& perm : M.permutations) EXPECT_EQ(perm, (std::vector<int>{1, 0}));
  EXPECT_TRUE(M.sphere_relation);
}

TEST(Monodromy, CoverCycleAtZerosOfQ) {
  auto w = generic_ndiff(2, 3, 31);
  auto c = build_cover(w);
  auto G = cover_star(c);
  auto M = monodromy(G, w.curve.p, w.q);
  EXPECT_TRUE(M.sphere_relation);
  for (int j = 0; j < G.m(); ++j) {
    const auto& perm = M.permutations[j];
    if (G.kind[j] == 1) {
      // n-cycle on t-sheets, s-sheet fixed
      int h = 0, len = 0;
      do { h = perm[h]; ++len; } while (h != 0);
      EXPECT_EQ(len, 3);
      EXPECT_EQ(perm[0] / 3, 0);
    } else {
      EXPECT_EQ(perm[0], 3);
    }
  }
}

TEST(SymplecticBasis, BaseGenusTwo) {
  auto C = build_curve(real_coeffs({-1, 0, 0, 0, 0, 1}));
  auto S = symplectic_basis(base_star(C), 2);
  EXPECT_EQ(S.cycles.cols(), 4);
  EXPECT_EQ(S.intersection, standard_J(2));
}

TEST(SymplecticBasis, EllipticFixture) {
  auto C = build_curve(real_coeffs({0, -1, 0, 1}));
  auto S = symplectic_basis(base_star(C), 1);
  EXPECT_EQ(S.intersection, standard_J(1));
}

TEST(SymplecticBasis, CoverSizes) {
  for (auto [n, gh] : std::vector<std::pair<int, int>>{{2, 5}, {3, 10}}) {
    auto c = build_cover(generic_ndiff(2, n, 40 + n));
    auto S = symplectic_basis(cover_star(c), gh);
    EXPECT_EQ(S.cycles.cols(), 2 * gh);
    EXPECT_EQ(S.intersection, standard_J(gh));
  }
}

TEST(SymplecticBasis, SeedBecomesFirstACycle) {
  auto C = build_curve(real_coeffs({-1, 0, 0, 0, 0, 1}));
  auto G = base_star(C);
  IVec seed = IVec::Zero(G.num_edges());
  seed(G.edge(0, 1)) = 1;
  seed(G.edge(1, 2)) = 1;
  auto S = symplectic_basis(G, 2, seed);
  EXPECT_EQ(S.a(0), seed);
}

TEST(DeckAction, PeriodicAndSymplectic) {
  for (int n : {2, 3}) {
    auto c = build_cover(generic_ndiff(2, n, 50 + n));
    auto S = symplectic_basis(cover_star(c), c.genus_hat);
    IMat M = deck_action_h1(S, n);
    EXPECT_EQ(power(M, n), IMat::Identity(M.rows(), M.cols()));
    EXPECT_EQ(M.transpose() * standard_J(c.genus_hat) * M, standard_J(c.genus_hat));
    // trace of M^j for 0<j<n equals sum_k dim H_k rho^{jk}: 2g + (2n+2)(g-1) * sum_{k>=1} rho^{jk} = 2g - (2n+2)(g-1)
    for (int j = 1; j < n; ++j) EXPECT_EQ(power(M, j).trace(), 4 - (2 * n + 2));
  }
}

TEST(EigenHomology, DimensionsAndSelectionRule) {
  for (int n : {2, 3}) {
    auto c = build_cover(generic_ndiff(2, n, 60 + n));
    auto S = symplectic_basis(cover_star(c), c.genus_hat);
    IMat M = deck_action_h1(S, n);
    std::vector<EigenHomology> H;
    int total = 0;
    for (int k = 0; k < n; ++k) {
      H.push_back(eigen_homology(M, n, k, eigen_homology_dim(2, n, k)));
      total += H.back().dimension();
    }
    EXPECT_EQ(total, 2 * c.genus_hat);
    auto R = pairing_vanishing_check(H, n, c.genus_hat);
    EXPECT_LT(R.max_offblock, 1e-10);
    EXPECT_TRUE(R.dual_blocks_nondegenerate);
  }
}

TEST(EigenHomology, DimensionMismatchThrows) {
  auto c = build_cover(generic_ndiff(2, 2, 70));
  auto S = symplectic_basis(cover_star(c), c.genus_hat);
  IMat M = deck_action_h1(S, 2);
  EXPECT_THROW(eigen_homology(M, 2, 1, 5), DimensionMismatch);
}

TEST(IntegerSolve, FindsSolutionAndDetectsNone) {
  IMat M(2, 4);
  M << 2, 4, 6, 3, 0, 5, 10, 5;
  IVec rhs(2);
  rhs << 1, 5;
  auto y = solve_integer(M, rhs);
  ASSERT_TRUE(y.has_value());
  EXPECT_EQ(M * *y, rhs);
  IMat N(1, 2);
  N << 2, 4;
  IVec r1(1);
  r1 << 1;
  EXPECT_FALSE(solve_integer(N, r1).has_value());
}
