#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "synstdp/analysis.hpp"

using namespace synstdp;

namespace {

std::vector<Point2> sample(double lo, double hi, double step, auto f) {
  std::vector<Point2> out;
  for (int k = 0; lo + k * step <= hi + 1e-12; ++k) out.push_back({lo + k * step, f(lo + k * step)});
  return out;
}

}  // namespace

TEST(FitExponential, RecoversOwnModel) {
  const auto pts = sample(0.5, 5.0, 0.5, [](double t) { return std::exp(-t / 2.0); });
  const auto r = fit_exponential(pts);
  const auto& p = std::get<ExponentialParams>(r.params);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(p.amplitude, 1.0, 1e-6);
  EXPECT_NEAR(p.tau, 2.0, 2e-6);
  EXPECT_LT(r.rmse, 1e-9);
  EXPECT_NEAR(r.r_squared, 1.0, 1e-12);
}

TEST(FitExponential, SixSignificantDigits) {
  for (double amp : {0.3, 4.0, 16.0})
    for (double tau : {0.7, 2.5, 9.0}) {
      const auto pts = sample(1.0, 6.0, 0.1, [&](double t) { return amp * std::exp(-t / tau); });
      const auto p = std::get<ExponentialParams>(fit_exponential(pts).params);
      EXPECT_NEAR(p.amplitude / amp, 1.0, 1e-6);
      EXPECT_NEAR(p.tau / tau, 1.0, 1e-6);
    }
}

TEST(FitExponential, NegativeSide) {
  const auto pts = sample(-5.0, -1.0, 0.25, [](double t) { return -3.0 * std::exp(t / 1.5); });
  const auto r = fit_exponential(pts);
  const auto& p = std::get<ExponentialParams>(r.params);
  EXPECT_EQ(p.sign, -1);
  EXPECT_NEAR(p.amplitude, 3.0, 1e-6);
  EXPECT_NEAR(p.tau, 1.5, 1e-6);
  EXPECT_NEAR(r.predict(-2.0), -3.0 * std::exp(-2.0 / 1.5), 1e-9);
}

TEST(FitExponential, ConstantIsFlagged) {
  const auto pts = sample(0.5, 5.0, 0.5, [](double) { return 1.0; });
  FitResult r;
  ASSERT_NO_THROW(r = fit_exponential(pts));
  const auto& p = std::get<ExponentialParams>(r.params);
  EXPECT_TRUE(!r.converged || p.tau > 1e6);
  EXPECT_LT(r.rmse, 1e-9);
}

TEST(FitExponential, ExcludesZeros) {
  auto pts = sample(1.0, 4.0, 0.5, [](double t) { return 2.0 * std::exp(-t); });
  pts.push_back({5.0, 0.0});
  pts.push_back({6.0, 0.0});
  const auto r = fit_exponential(pts);
  EXPECT_EQ(r.excluded, 2u);
  EXPECT_NEAR(std::get<ExponentialParams>(r.params).tau, 1.0, 1e-6);
}

TEST(FitExponential, Preconditions) {
  EXPECT_THROW(fit_exponential(std::vector<Point2>{{1, 1}, {2, 0.5}}), FitError);
  EXPECT_THROW(fit_exponential(std::vector<Point2>{{-1, 1}, {1, 1}, {2, 0.5}}), FitError);
  EXPECT_THROW(fit_exponential(std::vector<Point2>{{1, 1}, {2, -1}, {3, 0.5}}), FitError);
}

TEST(FitLinear, Examples) {
  auto r = fit_linear(std::vector<Point2>{{0, 1}, {1, 3}});
  auto p = std::get<LinearParams>(r.params);
  EXPECT_DOUBLE_EQ(p.slope, 2.0);
  EXPECT_DOUBLE_EQ(p.intercept, 1.0);
  EXPECT_EQ(r.rmse, 0.0);
  r = fit_linear(std::vector<Point2>{{0, 0}, {1, 0}, {2, 0}});
  p = std::get<LinearParams>(r.params);
  EXPECT_EQ(p.slope, 0.0);
  EXPECT_EQ(p.intercept, 0.0);
  EXPECT_THROW(fit_linear(std::vector<Point2>{{1, 0}, {1, 2}, {1, 3}}), FitError);
  EXPECT_THROW(fit_linear(std::vector<Point2>{{1, 0}}), FitError);
}

TEST(FitQuadratic, Examples) {
  const auto pts = sample(-2.0, 4.0, 0.5, [](double t) { return 2 - 3 * t + t * t; });
  const auto r = fit_quadratic(pts);
  const auto& q = std::get<QuadraticParams>(r.params);
  EXPECT_NEAR(q.a, 2.0, 1e-9);
  EXPECT_NEAR(q.b, 3.0, 1e-9);
  EXPECT_NEAR(q.c, 1.0, 1e-9);
  EXPECT_LT(r.rmse, 1e-9);
  EXPECT_THROW(fit_quadratic(std::vector<Point2>{{0, 1}, {1, 2}, {1, 3}}), FitError);
}

TEST(Fits, OrderInvariant) {
  auto pts = sample(1.0, 6.0, 0.25, [](double t) { return 10 * std::exp(-t / 3) + 0.1 * std::sin(7 * t); });
  const auto e1 = fit_exponential(pts), l1 = fit_linear(pts), q1 = fit_quadratic(pts);
  std::reverse(pts.begin(), pts.end());
  std::swap(pts[2], pts[9]);
  const auto e2 = fit_exponential(pts), l2 = fit_linear(pts), q2 = fit_quadratic(pts);
  EXPECT_EQ(e1.rmse, e2.rmse);
  EXPECT_EQ(l1.rmse, l2.rmse);
  EXPECT_EQ(q1.rmse, q2.rmse);
  EXPECT_EQ(std::get<ExponentialParams>(e1.params).tau, std::get<ExponentialParams>(e2.params).tau);
}

TEST(Fits, BetterRmseMeansBetterRSquared) {
  const auto pts = sample(1.0, 6.0, 0.1, [](double t) { return 16 * std::exp(-t / 2) + 0.3; });
  const auto e = fit_exponential(pts), l = fit_linear(pts);
  const auto& [better, worse] = e.rmse <= l.rmse ? std::pair{e, l} : std::pair{l, e};
  EXPECT_GE(better.r_squared, worse.r_squared);
  EXPECT_LE(better.r_squared, 1.0);
  EXPECT_GE(worse.rmse, 0.0);
}

TEST(Fits, DefaultDomain) {
  const auto w = make_waveform(Shape::Hrht);
  EXPECT_EQ(default_fit_domain(w, WindowSide::Pos), std::make_pair(1.0, 6.0));
  EXPECT_EQ(default_fit_domain(w, WindowSide::Neg), std::make_pair(-6.0, -1.0));
}

TEST(Summary, ZeroWindow) {
  StdpWindow w;
  w.points.resize(2);
  w.points[0].epochs.resize(5);
  w.points[1].epochs.resize(5);
  for (const auto& s : window_summary(w)) {
    EXPECT_EQ(s.mc_mean, 0.0);
    EXPECT_EQ(s.mc_std, 0.0);
    EXPECT_EQ(s.levels, std::vector<int>{0});
  }
}

TEST(Summary, SingleEpochAndStatistics) {
  StdpWindow w;
  w.points.resize(1);
  w.points[0].epochs = {{3.0, 3, 0}};
  EXPECT_EQ(window_summary(w)[0].mc_std, 0.0);
  w.points[0].epochs = {{1.0, 1, 0}, {3.0, 3, 0}, {-2.0, 0, 2}};
  const auto s = window_summary(w)[0];
  EXPECT_NEAR(s.mc_mean, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.mc_std, std::sqrt(((1 - 2. / 3) * (1 - 2. / 3) + (3 - 2. / 3) * (3 - 2. / 3) +
                                   (-2 - 2. / 3) * (-2 - 2. / 3)) / 2.0),
              1e-14);
  EXPECT_EQ(s.distinct_levels(), 3u);
  EXPECT_THROW(window_summary(StdpWindow{}), std::invalid_argument);
}

TEST(Summary, AttenuatedWindowHasSeventeenLevels) {
  WindowConfig c;
  c.geometry.bank = DendriteBank::make(16, 0.6, 1.0, 0.0);
  c.epochs = 10000;
  std::set<int> all;
  for (const auto& p : window_summary(run_window(c)))
    for (int l : p.levels) all.insert(std::abs(l));
  EXPECT_EQ(all.size(), 17u);
  EXPECT_EQ(*all.rbegin(), 16);
}
