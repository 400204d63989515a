#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "prymtau/cover.hpp"

using namespace prymtau;
using fixtures::generic_ndiff;

TEST(Cover, GenusFormulaAndRiemannHurwitz) {
  const std::vector<std::pair<int, int>> cases{{2, 2}, {2, 3}, {3, 2}, {2, 4}};
  const std::vector<int> expected{5, 10, 9, 17};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    auto c = build_cover(generic_ndiff(cases[i].first, cases[i].second, 11 + i));
    EXPECT_EQ(c.genus_hat, expected[i]);
    EXPECT_EQ(c.genus_hat_rh, expected[i]);
  }
}

TEST(Cover, EigenRankTable) {
  for (int g : {2, 3})
    for (int n : {2, 3, 4}) {
      auto c = build_cover(generic_ndiff(g, n, 100 + 10 * g + n));
      int total = 0;
      for (int k = 0; k < n; ++k) {
        auto B = eigen_basis(c, k);
        EXPECT_EQ(B.rank(), eigen_rank_formula(g, n, k)) << "g=" << g << " n=" << n << " k=" << k;
        EXPECT_EQ(evaluation_rank(c, B.elements, 2 * c.genus_hat, 5 + k), B.rank());
        total += B.rank();
      }
      EXPECT_EQ(total, c.genus_hat);
    }
}

TEST(Cover, RanksTwoThree) {
  auto c = build_cover(generic_ndiff(2, 3, 1));
  EXPECT_EQ(eigen_basis(c, 0).rank(), 2);
  EXPECT_EQ(eigen_basis(c, 1).rank(), 5);
  EXPECT_EQ(eigen_basis(c, 2).rank(), 3);
}

TEST(Cover, InvariantSpaceIsPullbackOfBase) {
  auto c = build_cover(generic_ndiff(2, 3, 2));
  auto B = eigen_basis(c, 0);
  ASSERT_EQ(B.rank(), 2);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(B.elements[i].a, i);
    EXPECT_EQ(B.elements[i].eps, 1);
    EXPECT_EQ(B.elements[i].b, 0);
  }
}

TEST(Cover, AllElementsHaveExactCharacter) {
  auto c = build_cover(generic_ndiff(2, 3, 3));
  std::mt19937_64 rng(9);
  for (int k = 0; k < 3; ++k)
    for (const auto& m : eigen_basis(c, k).elements)
      for (int j = 0; j < 5; ++j) {
        auto P = random_cover_point(c, rng);
        const cplx ratio = m.coefficient(P.x, P.s, c.rho * P.t) / m.coefficient(P.x, P.s, P.t);
        EXPECT_LT(std::abs(ratio - std::pow(c.rho, k)), 1e-12);
      }
}

TEST(Cover, CanonicalDifferential) {
  auto w = generic_ndiff(2, 3, 4);
  auto c = build_cover(w);
  const CharDiff v = canonical_v(c);
  EXPECT_EQ(v.character(c.n), 1);
  std::mt19937_64 rng(21);
  for (int j = 0; j < 20; ++j) {
    auto P = random_cover_point(c, rng);
    const cplx vv = v.coefficient(P.x, P.s, P.t);
    EXPECT_LT(std::abs(v.coefficient(P.x, P.s, c.rho * P.t) / vv - c.rho), 1e-12);
    EXPECT_LT(std::abs(std::pow(vv, c.n) / w.value(P.x, P.s) - 1.0), 1e-10);
    EXPECT_LT(std::abs(vv - P.t / P.s), 1e-10 * std::abs(vv));
  }
  for (const auto& f : c.fibers) {
    const Rational o = v_order(c, f);
    if (f.mu_q > 0) EXPECT_EQ(o, Rational(c.n));
    else EXPECT_EQ(o, Rational(0));
  }
}

TEST(Cover, DeckOrder) {
  auto c = build_cover(generic_ndiff(2, 4, 5));
  EXPECT_LT(std::abs(std::pow(c.rho, c.n) - 1.0), 1e-14);
}

TEST(Cover, RankSumIdentity) {
  for (int g = 1; g <= 5; ++g)
    for (int n = 1; n <= 5; ++n) EXPECT_TRUE(rank_sum_identity(g, n));
}

TEST(PhiK, InvertibleOnSimpleStratum) {
  for (int n : {2, 3}) {
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
      auto c = build_cover(generic_ndiff(2, n, 1000 + 7 * trial + n));
      for (int k = 1; k < n; ++k) {
        auto src = eigen_basis(c, k);
        auto dst = ndiff_basis(c.curve(), n - k + 1);
        CMat Phi = phi_k_matrix(c, k, src, dst, trial);
        ASSERT_EQ(Phi.rows(), (2 * n - 2 * k + 1) * 1);
        ok += std::abs(Phi.determinant()) > 1e-6;
      }
    }
    EXPECT_EQ(ok, 100 * (n - 1));
  }
}

TEST(PhiK, DescentWitness) {
  auto c = build_cover(generic_ndiff(2, 3, 8));
  const CharDiff v = canonical_v(c);
  std::mt19937_64 rng(4);
  for (int k = 1; k < 3; ++k)
    for (const auto& u : eigen_basis(c, k).elements)
      for (int j = 0; j < 5; ++j) {
        auto P = random_cover_point(c, rng);
        const cplx base = u.coefficient(P.x, P.s, P.t) * std::pow(v.coefficient(P.x, P.s, P.t), 3 - k);
        for (int m = 1; m < 3; ++m) {
          const cplx t = std::pow(c.rho, m) * P.t;
          const cplx other = u.coefficient(P.x, P.s, t) * std::pow(v.coefficient(P.x, P.s, t), 3 - k);
          EXPECT_LT(std::abs(other - base), 1e-10 * std::abs(base));
        }
      }
}

TEST(PhiK, SizeMismatch) {
  auto c = build_cover(generic_ndiff(2, 3, 9));
  auto src = eigen_basis(c, 1);
  EXPECT_THROW(phi_k_matrix(c, 1, src, ndiff_basis(c.curve(), 2)), SizeMismatch);
}
