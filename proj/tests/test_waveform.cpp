#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "synstdp/waveform.hpp"

using namespace synstdp;

namespace {

constexpr Shape kAll[] = {Shape::Hrht, Shape::Rectangular, Shape::DoubleSawtooth,
                          Shape::DoubleExponential, Shape::BioPlausible};

// Supremum / infimum over a fine grid plus one-sided limits at breakpoints.
std::pair<double, double> extrema(const SpikeWaveform& w) {
  auto [lo, hi] = w.support();
  double mx = -1e300, mn = 1e300;
  for (double t = lo - 0.5; t <= hi + 0.5; t += 1e-3) {
    mx = std::max(mx, w(t));
    mn = std::min(mn, w(t));
  }
  for (double b : w.breakpoints())
    for (Side s : {Side::Left, Side::Right}) {
      mx = std::max(mx, w.limit(b, s));
      mn = std::min(mn, w.limit(b, s));
    }
  return {mx, mn};
}

}  // namespace

TEST(Waveform, HrhtDefaults) {
  const auto w = make_waveform(Shape::Hrht);
  EXPECT_DOUBLE_EQ(w.a_plus(), 0.9);
  EXPECT_DOUBLE_EQ(w.tau_minus(), 1.0);
  EXPECT_DOUBLE_EQ(w.a_minus(), 0.4);
  EXPECT_DOUBLE_EQ(w.tau_plus(), 5.0);
}

TEST(Waveform, HrhtValues) {
  const auto w = make_waveform(Shape::Hrht);
  EXPECT_DOUBLE_EQ(w(-0.5), 0.9);
  EXPECT_NEAR(w(2.5), -0.2, 1e-15);
  EXPECT_EQ(w(10.0), 0.0);
  EXPECT_EQ(w(-1.0), 0.0);
  EXPECT_EQ(w(0.0), 0.0);
  EXPECT_EQ(w(std::numeric_limits<double>::quiet_NaN()), 0.0);
}

TEST(Waveform, OneSidedLimits) {
  const auto w = make_waveform(Shape::Hrht);
  EXPECT_DOUBLE_EQ(w.limit(0.0, Side::Left), 0.9);
  EXPECT_DOUBLE_EQ(w.limit(0.0, Side::Right), -0.4);
  EXPECT_DOUBLE_EQ(w.limit(-1.0, Side::Right), 0.9);
  EXPECT_DOUBLE_EQ(w.limit(-1.0, Side::Left), 0.0);
  EXPECT_DOUBLE_EQ(w.limit(5.0, Side::Left), 0.0);
  EXPECT_DOUBLE_EQ(w.limit(1e-12, Side::Left), 0.9);  // snapped onto 0
}

TEST(Waveform, Supports) {
  EXPECT_EQ(make_waveform(Shape::Hrht).support(), std::make_pair(-1.0, 5.0));
  EXPECT_EQ(make_waveform(Shape::Rectangular).support(), std::make_pair(-1.0, 5.0));
  EXPECT_EQ(make_waveform(Shape::BioPlausible).support(), std::make_pair(-1.5, 6.0));
}

TEST(Waveform, ShapeFormulas) {
  const auto saw = make_waveform(Shape::DoubleSawtooth);
  EXPECT_NEAR(saw(-0.25), 0.9 * 0.75, 1e-15);
  EXPECT_NEAR(saw(1.0), -0.4 * 0.8, 1e-15);
  const auto rect = make_waveform(Shape::Rectangular);
  EXPECT_DOUBLE_EQ(rect(4.9), -0.4);
  const auto dexp = make_waveform(Shape::DoubleExponential);
  EXPECT_NEAR(dexp(-0.3), 0.9 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(dexp(1.5), -0.4 * std::exp(-1.0), 1e-15);
  const auto bio = make_waveform(Shape::BioPlausible);
  const double t = 1.0;
  EXPECT_NEAR(bio(t), 0.9 * std::exp(-std::pow(1.2 / 0.3, 2)) - 0.4 * std::exp(-std::pow(1.0 / 1.5, 2)), 1e-15);
  EXPECT_EQ(bio(-1.5), 0.0);
  EXPECT_EQ(bio(6.0), 0.0);
}

TEST(Waveform, DoubleExponentialAcceptsExtras) {
  WaveformParams p;
  p.extra.tau_head = 0.3;
  p.extra.tau_tail = 1.5;
  const auto w = make_waveform(Shape::DoubleExponential, p);
  const auto [mx, mn] = extrema(w);
  EXPECT_LE(mx, 0.9);
  EXPECT_GE(mn, -0.4);
}

TEST(Waveform, RejectsBadParams) {
  WaveformParams p;
  p.tau_minus = 0;
  EXPECT_THROW(make_waveform(Shape::Hrht, p), ConfigError);
  p = {};
  p.tau_plus = -1;
  EXPECT_THROW(make_waveform(Shape::Hrht, p), ConfigError);
  p = {};
  p.a_plus = 0;
  EXPECT_THROW(make_waveform(Shape::Hrht, p), ConfigError);
  p.a_plus = 10.5;
  EXPECT_THROW(make_waveform(Shape::Hrht, p), ConfigError);
  p = {};
  p.a_minus = -0.1;
  EXPECT_THROW(make_waveform(Shape::Hrht, p), ConfigError);
  p = {};
  p.extra.tau_head = 0;
  EXPECT_THROW(make_waveform(Shape::DoubleExponential, p), ConfigError);
  EXPECT_NO_THROW(make_waveform(Shape::Hrht, p));
  EXPECT_THROW(parse_shape("square"), ConfigError);
}

TEST(Waveform, ShapeNamesRoundTrip) {
  for (Shape s : kAll) EXPECT_EQ(parse_shape(to_string(s)), s);
}

TEST(Waveform, ZeroOutsideSupport) {
  for (Shape s : kAll) {
    const auto w = make_waveform(s);
    const auto [lo, hi] = w.support();
    for (double d : {0.0, 1e-9, 0.5, 3.0, 1e6}) {
      EXPECT_EQ(w(lo - d), 0.0) << to_string(s);
      EXPECT_EQ(w(hi + d), 0.0) << to_string(s);
    }
  }
}

TEST(Waveform, PiecewiseExtrema) {
  for (Shape s : {Shape::Hrht, Shape::Rectangular, Shape::DoubleSawtooth}) {
    const auto [mx, mn] = extrema(make_waveform(s));
    EXPECT_DOUBLE_EQ(mx, 0.9) << to_string(s);
    EXPECT_DOUBLE_EQ(mn, -0.4) << to_string(s);
  }
  const auto [mx, mn] = extrema(make_waveform(Shape::DoubleExponential));
  EXPECT_DOUBLE_EQ(mx, 0.9);
  EXPECT_DOUBLE_EQ(mn, -0.4);
}

TEST(Waveform, BioBoundedByItsLobes) {
  const auto w = make_waveform(Shape::BioPlausible);
  const auto [mx, mn] = extrema(w);
  EXPECT_LE(mx, 0.9);
  EXPECT_GE(mn, -0.4);
  EXPECT_GT(mx, 0.8);
  EXPECT_LT(mn, -0.3);
}

TEST(Waveform, HrhtIntegral) {
  const auto w = make_waveform(Shape::Hrht);
  const double h = 0.01;
  double sum = 0.0;
  for (int k = -100; k < 500; ++k) sum += w((k + 0.5) * h) * h;
  EXPECT_NEAR(sum, 0.9 * 1.0 - 0.4 * 5.0 / 2.0, 1e-3);
}
