#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "synstdp/montecarlo.hpp"

using namespace synstdp;

namespace {

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

WindowConfig small_window(double alpha_min, std::size_t epochs) {
  WindowConfig c;
  c.geometry.bank = DendriteBank::make(16, alpha_min, 1.0, 0.0);
  c.epochs = epochs;
  c.delta_t_step = 0.5;
  return c;
}

std::vector<double> enumerate(const std::vector<double>& p) {
  const std::size_t n = p.size();
  std::vector<double> out(n + 1, 0.0);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double prob = 1.0;
    int k = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const bool on = (mask >> j) & 1u;
      prob *= on ? p[j] : 1 - p[j];
      k += on;
    }
    out[k] += prob;
  }
  return out;
}

}  // namespace

TEST(Expectation, UnattenuatedOverlap) {
  PairingGeometry g;
  g.bank = DendriteBank::make(16, 1.0, 1.0, 0.0);
  EXPECT_NEAR(expected_delta_g(g, 0.5, InitialState::AllOff), 16 * phi(3.0), 1e-9);
  EXPECT_NEAR(expected_delta_g(g, 0.5, InitialState::AllOff), 15.978, 1e-3);
}

TEST(Expectation, ZeroBeyondSupport) {
  PairingGeometry g;
  for (double dt : {-20.0, -6.5, 6.5, 20.0}) {
    EXPECT_EQ(expected_delta_g(g, dt, InitialState::AllOff), 0.0);
    EXPECT_EQ(expected_delta_g(g, dt, InitialState::AllOn), 0.0);
  }
}

TEST(Expectation, AttenuatedSum) {
  PairingGeometry g;
  g.bank = DendriteBank::make(16, 0.6, 1.0, 0.0);
  double want = 0;
  for (const auto& b : g.bank.branches()) want += phi(3.2 * b.alpha - 1.0);
  const auto d = branch_drives(g, 2.0);
  EXPECT_NEAR(expected_delta_g(d, InitialState::AllOff), want, 1e-9);
  EXPECT_NEAR(d.front().p_set, 0.8212, 1e-4);
  EXPECT_NEAR(d.back().p_set, 0.9861, 1e-4);
}

TEST(Expectation, AttenuationLowersWindow) {
  PairingGeometry a, b;
  a.bank = DendriteBank::make(16, 0.6, 1.0, 0.0);
  b.bank = DendriteBank::make(16, 1.0, 1.0, 0.0);
  EXPECT_LT(expected_delta_g(a, 4.0, InitialState::AllOff), expected_delta_g(b, 4.0, InitialState::AllOff));
}

TEST(StateDistribution, Examples) {
  const auto a = state_distribution(std::vector<double>{0.5, 0.5});
  EXPECT_NEAR(a[0], 0.25, 1e-15);
  EXPECT_NEAR(a[1], 0.5, 1e-15);
  EXPECT_NEAR(a[2], 0.25, 1e-15);
  const auto b = state_distribution(std::vector<double>{1, 1, 1});
  EXPECT_EQ(b, (std::vector<double>{0, 0, 0, 1}));
  const auto c = state_distribution(std::vector<double>{0.2, 0.7});
  const auto o = enumerate({0.2, 0.7});
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(c[k], o[k], 1e-15);
  EXPECT_NEAR(c[1], 0.62, 1e-15);
}

TEST(StateDistribution, MatchesEnumeration) {
  PhiloxStream rng(99, 1, 1);
  for (std::size_t n = 0; n <= 12; ++n) {
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<double> p(n);
      for (auto& x : p) x = rng.uniform();
      const auto got = state_distribution(p);
      const auto want = enumerate(p);
      ASSERT_EQ(got.size(), n + 1);
      for (std::size_t k = 0; k <= n; ++k) EXPECT_NEAR(got[k], want[k], 1e-12);
      EXPECT_NEAR(std::accumulate(got.begin(), got.end(), 0.0), 1.0, 1e-12);
    }
  }
}

TEST(Grid, DefaultHas121PointsWithExactZero) {
  const auto g = delta_t_grid(-6, 6, 0.1);
  ASSERT_EQ(g.size(), 121u);
  EXPECT_EQ(g[60], 0.0);
  EXPECT_FALSE(std::signbit(g[60]));
  EXPECT_EQ(g.front(), -6.0);
  EXPECT_EQ(g.back(), 6.0);
}

TEST(Window, SinglePointGrid) {
  auto c = small_window(0.6, 5);
  c.delta_t_min = 0.5;
  c.delta_t_max = 0.7;
  c.delta_t_step = 1.0;
  const auto w = run_window(c);
  ASSERT_EQ(w.points.size(), 1u);
  EXPECT_EQ(w.points[0].epochs.size(), 5u);
}

TEST(Window, SingleEpochIntegerOutcomes) {
  auto c = small_window(0.6, 1);
  c.geometry.device.sigma_lrs = 0;
  const auto w = run_window(c);
  for (const auto& pt : w.points) {
    const double v = pt.epochs[0].delta_g_norm;
    EXPECT_NEAR(v, std::round(v), 1e-9);
    EXPECT_LE(std::abs(v), 16.0 + 1e-9);
  }
  EXPECT_EQ(run_window(c).points[3].epochs[0].delta_g_norm, w.points[3].epochs[0].delta_g_norm);
}

TEST(Window, SplitSignProperty) {
  auto c = small_window(0.6, 300);
  c.geometry.device.sigma_lrs = 0;
  const auto w = run_window(c);
  for (const auto& pt : w.points)
    for (const auto& e : pt.epochs) {
      if (pt.delta_t > 0) {
        EXPECT_GE(e.delta_g_norm, -1e-9);
      }
      if (pt.delta_t < 0) {
        EXPECT_LE(e.delta_g_norm, 1e-9);
      }
      EXPECT_NEAR(e.delta_g_norm, static_cast<double>(e.n_set) - static_cast<double>(e.n_reset), 1e-9);
    }
}

TEST(Window, StatesAreDistributions) {
  const auto w = run_window(small_window(0.6, 10));
  for (const auto& pt : w.points) {
    ASSERT_EQ(pt.states.size(), 17u);
    EXPECT_NEAR(std::accumulate(pt.states.begin(), pt.states.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(Window, OutcomesBounded) {
  const auto c = small_window(0.6, 200);
  const auto w = run_window(c);
  for (const auto& pt : w.points)
    for (const auto& e : pt.epochs) EXPECT_LE(std::abs(e.delta_g_norm), 16 * (1 + 6 * 0.1));
}

TEST(Window, MeanTracksExpectation) {
  auto c = small_window(1.0, 4000);
  const auto w = run_window(c);
  for (const auto& pt : w.points) {
    double m = 0, m2 = 0;
    for (const auto& e : pt.epochs) m += e.delta_g_norm, m2 += e.delta_g_norm * e.delta_g_norm;
    const double n = pt.epochs.size();
    m /= n;
    const double s = std::sqrt(std::max(0.0, (m2 - n * m * m) / (n - 1)));
    EXPECT_LE(std::abs(m - pt.analytic), std::max(5 * s / std::sqrt(n), 1e-9)) << pt.delta_t;
  }
}

TEST(Window, ZeroPointMixesBothInitialStates) {
  auto c = small_window(0.6, 4);
  c.geometry.device.sigma_lrs = 0;
  c.geometry.bank = DendriteBank::make(16, 0.6, 1.0, 0.3);
  const auto w = run_window(c);
  const auto& z = w.points[12];
  ASSERT_EQ(z.delta_t, 0.0);
  const auto up = expected_delta_g(c.geometry, 0.0, InitialState::AllOff);
  const auto down = expected_delta_g(c.geometry, 0.0, InitialState::AllOn);
  EXPECT_NEAR(z.analytic, 0.5 * (up + down), 1e-12);
  for (std::size_t e = 0; e < z.epochs.size(); ++e) {
    if (e % 2 == 0) {
      EXPECT_EQ(z.epochs[e].n_reset, 0);
    } else {
      EXPECT_EQ(z.epochs[e].n_set, 0);
    }
  }
}

TEST(Window, DelayedBankActsAroundZero) {
  PairingGeometry g;
  g.bank = DendriteBank::make(16, 0.6, 1.0, 0.3);
  EXPECT_NE(expected_delta_g(g, 0.0, InitialState::AllOff), 0.0);
  EXPECT_NE(expected_delta_g(g, 0.0, InitialState::AllOn), 0.0);
}

TEST(Window, AllLevelsWithoutLrsSpread) {
  WindowConfig c;
  c.geometry.bank = DendriteBank::make(16, 0.6, 1.0, 0.0);
  c.geometry.device.sigma_lrs = 0;
  c.epochs = 10000;
  const auto w = run_window(c);
  std::set<long> levels;
  for (const auto& pt : w.points)
    for (const auto& e : pt.epochs) levels.insert(std::lround(std::abs(e.delta_g_norm)));
  EXPECT_EQ(levels.size(), 17u);
  EXPECT_EQ(*levels.rbegin(), 16);
}

TEST(Window, WorkerCountDoesNotMatter) {
  auto c = small_window(0.6, 50);
  c.amp_noise_sigma = 0.05;
  c.workers = 1;
  const auto a = run_window(c);
  c.workers = 7;
  const auto b = run_window(c);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i)
    for (std::size_t e = 0; e < a.points[i].epochs.size(); ++e)
      ASSERT_EQ(a.points[i].epochs[e].delta_g_norm, b.points[i].epochs[e].delta_g_norm);
}

TEST(Window, RandomInitialState) {
  auto c = small_window(0.6, 2000);
  c.init = {InitKind::Random, 0.3};
  const auto w = run_window(c);
  for (const auto& pt : w.points) {
    double m = 0;
    for (const auto& e : pt.epochs) m += e.delta_g_norm;
    m /= pt.epochs.size();
    EXPECT_NEAR(m, pt.analytic, 0.3) << pt.delta_t;
  }
}

TEST(Window, ConfigValidation) {
  WindowConfig c;
  c.epochs = 0;
  EXPECT_THROW(run_window(c), ConfigError);
  c = {};
  c.delta_t_min = 1;
  c.delta_t_max = 1;
  EXPECT_THROW(run_window(c), ConfigError);
  c = {};
  c.delta_t_step = 0;
  EXPECT_THROW(run_window(c), ConfigError);
  c = {};
  c.init = {InitKind::Random, 1.5};
  EXPECT_THROW(run_window(c), ConfigError);
}
