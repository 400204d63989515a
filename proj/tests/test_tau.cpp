#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "prymtau/tau.hpp"

using namespace prymtau;

namespace {

struct TauFixture {
  NDifferential w;
  PeriodData P;
  explicit TauFixture(int g = 2, int n = 2, std::uint64_t seed = 21)
      : w(fixtures::generic_ndiff(g, n, seed)), P(period_matrix(w.curve)) {}
  CurvePt pt(cplx x, int sheet = 1) const { return {x, static_cast<double>(sheet) * w.curve.s_principal(x)}; }
};

}  // namespace

TEST(Tau, OddCharacteristicIsNonsingular) {
  TauFixture F;
  ThetaEvaluator th(F.P.Omega);
  const Characteristic d = select_odd_characteristic(th);
  EXPECT_TRUE(d.odd());
  EXPECT_GT(th.gradient(CVec::Zero(2), d).norm(), 1e-3);
}

TEST(Tau, RiemannConstantsVanishOnDivisors) {
  for (int g : {2, 3}) {
    TauFixture F(g, 2, 30 + g);
    ThetaEvaluator th(F.P.Omega);
    AbelMap A(F.w.curve, F.P, cplx(0.05, 0.11));
    const RiemannConstants rc = riemann_constants(th, A, F.w.curve, 10, 99);
    EXPECT_LT(rc.residual, 1e-7) << g;
    // K is a half period
    auto [a, b] = lattice_coordinates(F.P.Omega, 2.0 * rc.K);
    EXPECT_LT((a - a.array().round().matrix()).norm() + (b - b.array().round().matrix()).norm(), 1e-10);
  }
}

TEST(Tau, BasepointChangeOfRiemannConstants) {
  // theta(A_x(D) + K^x) = 0 with K^x = K^e + (g-1) A_e(x), for g = 3
  TauFixture F(3, 2, 33);
  ThetaEvaluator th(F.P.Omega);
  AbelMap A(F.w.curve, F.P, cplx(0.05, 0.11));
  const RiemannConstants rc = riemann_constants(th, A, F.w.curve);
  std::mt19937_64 rng(5);
  auto [x, s] = random_curve_point(F.w.curve, rng);
  const CVec Kx = rc.K + 2.0 * A(x, s);
  for (int r = 0; r < 5; ++r) {
    auto [x1, s1] = random_curve_point(F.w.curve, rng);
    auto [x2, s2] = random_curve_point(F.w.curve, rng);
    const CVec D = A(x1, s1) + A(x2, s2) - 2.0 * A(x, s);
    const auto v = th.evaluate(D + Kx, Characteristic::zero(3));
    const auto ref = th.evaluate(D + Kx + CVec::Constant(3, cplx(0.1, 0.05)), Characteristic::zero(3));
    EXPECT_LT(std::abs(v.value) * std::exp(v.log_scale - ref.log_scale), 1e-7 * std::abs(ref.value));
  }
}

TEST(Tau, PrimeFormAntisymmetryAndDiagonal) {
  TauFixture F;
  TauContext T(F.w, F.P, F.pt(cplx(0.3, 0.2)), cplx(0.05, 0.11));
  const CurvePt p = F.pt(cplx(0.4, -0.3)), q = F.pt(cplx(-0.6, 0.5), -1);
  EXPECT_LT(std::abs(T.prime_form_dx(p, q) + T.prime_form_dx(q, p)), 1e-10 * std::abs(T.prime_form_dx(p, q)));
  EXPECT_LT(std::abs(T.prime_form_dx(p, p)), 1e-12);
  for (double h : {1e-3, 1e-4}) {
    const CurvePt y = F.pt(p.x + cplx(h, 0.5 * h));
    const cplx ratio = T.prime_form_dx(p, y) / (y.x - p.x);
    EXPECT_LT(std::abs(ratio - 1.0), 1e-6 + 10 * h * h) << h;
  }
}

TEST(Tau, ZQuantization) {
  for (int n : {2, 3}) {
    TauFixture F(2, n, 40 + n);
    TauContext T(F.w, F.P, F.pt(cplx(0.3, 0.2)), cplx(0.05, 0.11));
    EXPECT_LT(T.quantization_residual(), 1e-6) << n;
    EXPECT_LT(T.relation_residual(), 1e-8) << n;
  }
}

TEST(Tau, IndependentOfAuxiliaryPointAndCuts) {
  TauFixture F;
  std::vector<double> vals;
  for (cplx hub : {cplx(0.05, 0.11), cplx(-0.45, -0.35)})
    for (cplx x : {cplx(0.3, 0.2), cplx(-0.2, 0.6), cplx(0.7, -0.5), cplx(-0.9, -0.1), cplx(0.1, -1.0)})
      vals.push_back(TauContext(F.w, F.P, F.pt(x, vals.size() % 2 ? -1 : 1), hub).log_abs_tau());
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  EXPECT_LT(std::exp(*hi - *lo) - 1.0, 1e-6);
}

TEST(Tau, IndependentOfRiemannConstantRepresentative) {
  TauFixture F;
  const CurvePt x = F.pt(cplx(0.3, 0.2));
  const double ref = TauContext(F.w, F.P, x, cplx(0.05, 0.11)).log_abs_tau();
  TauOptions o;
  o.k_shift_a = RVec::Zero(2);
  o.k_shift_b = RVec::Zero(2);
  o.k_shift_a << 1, -1;
  o.k_shift_b << 2, 0;
  EXPECT_NEAR(TauContext(F.w, F.P, x, cplx(0.05, 0.11), o).log_abs_tau(), ref, 1e-8);
}

TEST(Tau, ModularCovariance) {
  TauFixture F;
  const CurvePt x = F.pt(cplx(0.3, 0.2));
  const double ref = TauContext(F.w, F.P, x, cplx(0.05, 0.11)).log_abs_tau();
  std::mt19937_64 rng(17);
  for (int r = 0; r < 3; ++r) {
    const IMat T = random_symplectic(2, rng);
    const PeriodData Q = remark(F.P, T);
    const CMat C = T.block(0, 2, 2, 2).cast<double>().cast<cplx>();
    const CMat D = T.block(0, 0, 2, 2).cast<double>().cast<cplx>();
    const double expected = std::log(std::abs((C * F.P.Omega + D).determinant()));
    const double got = TauContext(F.w, Q, x, cplx(0.05, 0.11)).log_abs_tau() - ref;
    EXPECT_LT(std::abs(std::exp(got - expected) - 1.0), 1e-6) << T;
  }
}

TEST(Bergman, SymmetryAndBiresidue) {
  TauFixture F;
  TauContext T(F.w, F.P, F.pt(cplx(0.3, 0.2)), cplx(0.05, 0.11));
  const CurvePt p = F.pt(cplx(0.4, -0.3)), q = F.pt(cplx(-0.6, 0.5), -1);
  const cplx bpq = T.bergman(p, q), bqp = T.bergman(q, p);
  EXPECT_LT(std::abs(bpq - bqp), 1e-9 * std::abs(bpq));
  const CurvePt y = F.pt(p.x + cplx(1e-4, 0.5e-4));
  EXPECT_LT(std::abs((y.x - p.x) * (y.x - p.x) * T.bergman(p, y) - 1.0), 1e-6);
}

TEST(Bergman, ProjectiveConnectionFromDiagonalExpansion) {
  TauFixture F;
  TauContext T(F.w, F.P, F.pt(cplx(0.3, 0.2)), cplx(0.05, 0.11));
  for (int sheet : {1, -1}) {
    const cplx m(0.45, -0.25), h(1e-3, 0.4e-3);
    const CurvePt x = F.pt(m - 0.5 * h, sheet), y = F.pt(m + 0.5 * h, sheet);
    const cplx lhs = 6.0 * (T.bergman(x, y) - 1.0 / (h * h));
    const cplx SB = T.bergman_connection(F.pt(m, sheet));
    EXPECT_LT(std::abs(lhs - SB), 1e-4 * std::max(1.0, std::abs(SB))) << sheet;
  }
}

TEST(Bergman, VanishingAPeriods) {
  TauFixture F;
  TauContext T(F.w, F.P, F.pt(cplx(0.3, 0.2)), cplx(0.05, 0.11));
  const CurvePt y = F.pt(cplx(1.9, 1.7));
  const CVec Ay = T.abel()(y.x, y.s);
  CurveIntegrand B = [&](cplx x, cplx s, cplx) {
    const CurvePt p{x, s};
    return T.bergman(p, T.abel()(x, s), y, Ay);
  };
  for (int j = 0; j < 2; ++j) {
    const cplx per = general_chain_integral(F.P.marking.star, F.P.cont, B, F.P.marking.a(j), 0.0, {1e-10});
    EXPECT_LT(std::abs(per), 1e-7) << j;
  }
}

TEST(Bergman, ConnectionIsInvariantUnderInvolution) {
  TauFixture F;
  TauContext T(F.w, F.P, F.pt(cplx(0.3, 0.2)), cplx(0.05, 0.11));
  const CurvePt p = F.pt(cplx(0.45, -0.25)), pm = F.pt(cplx(0.45, -0.25), -1);
  EXPECT_LT(std::abs(T.bergman_connection(pm) - T.bergman_connection(p)), 1e-9 * std::abs(T.bergman_connection(p)));
}
