#include <random>

#include <gtest/gtest.h>

#include "prymtau/theta.hpp"

using namespace prymtau;

namespace {

CMat random_siegel(int g, std::mt19937_64& rng, double floor_im = 0.2) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RMat X(g, g), M(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      X(i, j) = u(rng);
      M(i, j) = 0.5 * u(rng);
    }
  X = 0.5 * (X + X.transpose()).eval();
  const RMat Y = M * M.transpose() + floor_im * RMat::Identity(g, g);
  return X.cast<cplx>() + I * Y.cast<cplx>();
}

CVec random_z(int g, std::mt19937_64& rng, double scale = 0.7) {
  std::uniform_real_distribution<double> u(-scale, scale);
  CVec z(g);
  for (int i = 0; i < g; ++i) z(i) = cplx(u(rng), u(rng));
  return z;
}

}  // namespace

TEST(Theta, GenusOneSeriesOracle) {
  CMat Om(1, 1);
  Om(0, 0) = I;
  ThetaEvaluator th(Om);
  double s = 0.0;
  for (int n = -30; n <= 30; ++n) s += std::exp(-pi * n * n);
  EXPECT_NEAR(std::abs(th.theta(CVec::Zero(1)) - s), 0.0, 1e-14);
  EXPECT_NEAR(s, 1.0864348112, 1e-10);
}

TEST(Theta, GenusOneDerivativeMatchesJacobiSeries) {
  CMat Om(1, 1);
  Om(0, 0) = cplx(0.3, 0.8);
  ThetaEvaluator th(Om);
  const cplx z(0.21, -0.13);
  cplx ref(0.0);
  for (int n = -40; n <= 40; ++n)
    ref += 2.0 * pi * I * double(n) * std::exp(pi * I * double(n * n) * Om(0, 0) + 2.0 * pi * I * double(n) * z);
  CVec zz(1);
  zz(0) = z;
  EXPECT_LT(std::abs(th.derivative(zz, Characteristic::zero(1), {CVec::Ones(1)}) - ref), 1e-11);
}

TEST(Theta, OddCharacteristicsVanishAtZero) {
  std::mt19937_64 rng(3);
  for (int g : {1, 2, 3}) {
    ThetaEvaluator th(random_siegel(g, rng));
    for (const auto& ch : half_characteristics(g))
      if (ch.odd()) {
        EXPECT_LT(std::abs(th.theta(CVec::Zero(g), ch)), 1e-12);
      }
  }
}

TEST(Theta, EvenFirstDerivativeVanishesAtZero) {
  std::mt19937_64 rng(4);
  ThetaEvaluator th(random_siegel(2, rng));
  for (const auto& ch : half_characteristics(2))
    if (!ch.odd()) EXPECT_LT(th.gradient(CVec::Zero(2), ch).norm(), 1e-12);
}

TEST(Theta, QuasiPeriodicity) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> ui(-2, 2);
  for (int g : {2, 3}) {
    const CMat Om = random_siegel(g, rng, 0.5);
    ThetaEvaluator th(Om);
    for (int rep = 0; rep < 5; ++rep) {
      const CVec z = random_z(g, rng);
      RVec m(g), np(g);
      for (int i = 0; i < g; ++i) {
        m(i) = ui(rng);
        np(i) = ui(rng);
      }
      const CVec mc = m.cast<cplx>();
      const CVec shifted = z + Om * mc + np.cast<cplx>();
      const cplx lhs = th.theta(shifted);
      const cplx rhs = std::exp(-I * pi * mc.dot(Om * mc) - 2.0 * pi * I * mc.dot(z)) * th.theta(z);
      EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST(Theta, DirectionalDerivativeFiniteDifference) {
  std::mt19937_64 rng(6);
  const CMat Om = random_siegel(2, rng, 0.5);
  ThetaEvaluator th(Om);
  const Characteristic ch{RVec::Constant(2, 0.5), RVec::Zero(2)};
  for (int rep = 0; rep < 5; ++rep) {
    const CVec z = random_z(2, rng, 0.4);
    CVec d = random_z(2, rng, 1.0);
    d /= d.norm();
    const double h = 1e-3;
    const cplx fd = (-th.theta(z + 2 * h * d, ch) + 8.0 * th.theta(z + h * d, ch) - 8.0 * th.theta(z - h * d, ch) +
                     th.theta(z - 2 * h * d, ch)) /
                    (12.0 * h);
    const cplx an = th.derivative(z, ch, {d});
    EXPECT_LT(std::abs(fd - an), 1e-6 * std::max(1.0, std::abs(an)));
  }
}

TEST(Theta, TruncationBoundIsSound) {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int g = 1 + rep % 3;
    const CMat Om = random_siegel(g, rng, 0.2);
    ThetaEvaluator th(Om);
    const CVec z = random_z(g, rng, 1.0);
    const auto v1 = th.evaluate(z, Characteristic::zero(g));
    const auto v2 = th.evaluate(z, Characteristic::zero(g), {}, 2.0 * th.radius(0));
    EXPECT_LE(std::abs(v1.value - v2.value), v1.bound + 1e-15) << rep;
    EXPECT_LE(v1.bound, th.epsilon());
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(Theta, BatchReusesEnumeration) {
  std::mt19937_64 rng(8);
  ThetaEvaluator th(random_siegel(2, rng, 0.4));
  std::vector<CVec> zs;
  for (int i = 0; i < 10000; ++i) zs.push_back(random_z(2, rng, 0.3));
  const auto before = th.enumerations();
  const auto vals = th.evaluate_batch(zs, Characteristic::zero(2), {}, 2);
  EXPECT_EQ(th.enumerations(), before);
  EXPECT_EQ(vals.size(), zs.size());
  EXPECT_EQ(vals[17].value, th.evaluate(zs[17], Characteristic::zero(2)).value);
}

TEST(Theta, LargeImaginaryArgumentUsesLogScale) {
  std::mt19937_64 rng(9);
  const CMat Om = random_siegel(2, rng, 0.5);
  ThetaEvaluator th(Om);
  const CVec z = random_z(2, rng, 0.3);
  RVec m(2);
  m << 40, -35;
  const CVec mc = m.cast<cplx>();
  const auto big = th.evaluate(z + Om * mc, Characteristic::zero(2));
  const auto small = th.evaluate(z, Characteristic::zero(2));
  const cplx log_ratio = std::log(big.value / small.value) + big.log_scale - small.log_scale;
  const cplx expected = -I * pi * mc.dot(Om * mc) - 2.0 * pi * I * mc.dot(z);
  EXPECT_NEAR(log_ratio.real(), expected.real(), 1e-8 * std::abs(expected.real()));
}

TEST(Theta, RejectsIndefiniteImaginaryPart) {
  CMat Om = CMat::Identity(2, 2) * I;
  Om(1, 1) = -I;
  EXPECT_THROW(ThetaEvaluator th(Om), NotPositiveDefinite);
}
