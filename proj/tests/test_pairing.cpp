#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "synstdp/pairing.hpp"

using namespace synstdp;

namespace {

PairingGeometry single(double alpha, double delay = 0.0) {
  PairingGeometry g;
  g.bank = DendriteBank({{alpha, delay}});
  return g;
}

std::pair<double, double> trace_extrema(const std::vector<TraceSample>& tr) {
  double mx = -1e300, mn = 1e300;
  for (const auto& s : tr) mx = std::max(mx, s.v), mn = std::min(mn, s.v);
  return {mx, mn};
}

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST(Pairing, TraceOverlap) {
  const auto tr = net_potential_trace(single(1.0), 0, 0.5);
  const auto [mx, mn] = trace_extrema(tr);
  EXPECT_NEAR(mx, 1.3, 1e-3);  // approached at t = 0+
  EXPECT_NEAR(mn, -0.04, 1e-12);
  for (const auto& s : tr) EXPECT_NEAR(std::remainder(s.t, 0.01), 0.0, 1e-9);
}

TEST(Pairing, TraceDenseGridAgrees) {
  auto g = single(1.0);
  g.dt_step = 0.001;
  const auto [mx, mn] = trace_extrema(net_potential_trace(g, 0, 0.5));
  EXPECT_NEAR(mx, 1.3, 1e-4);
  EXPECT_NEAR(mn, -0.04, 1e-12);
}

TEST(Pairing, DisjointTraceIsZero) {
  const auto tr = net_potential_trace(single(1.0), 0, 20.0);
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr[0].v, 0.0);
}

TEST(Pairing, AttenuatedTrace) {
  const auto [mx, mn] = trace_extrema(net_potential_trace(single(0.6), 0, -2.0));
  EXPECT_NEAR(mx, 0.096, 1e-3);
  EXPECT_NEAR(mn, -0.86, 1e-3);
}

TEST(Pairing, DriveExamples) {
  auto d = branch_drive(single(1.0), 0, 0.5);
  EXPECT_NEAR(d.v_max, 1.3, 1e-12);
  EXPECT_NEAR(d.p_set, 0.99865, 1e-4);
  EXPECT_LT(d.p_reset, 1e-15);

  d = branch_drive(single(1.0), 0, 2.0);
  EXPECT_NEAR(d.v_max, 1.22, 1e-12);
  EXPECT_NEAR(d.p_set, 0.98610, 1e-4);

  d = branch_drive(single(0.6), 0, 2.0);
  EXPECT_NEAR(d.v_max, 1.092, 1e-12);
  EXPECT_NEAR(d.p_set, 0.82121, 1e-4);

  d = branch_drive(single(0.6), 0, -2.0);
  EXPECT_NEAR(d.v_min, -0.86, 1e-12);
  EXPECT_NEAR(d.p_reset, 0.08076, 1e-4);
  EXPECT_NEAR(d.v_max, 0.096, 1e-12);
}

TEST(Pairing, Plateaus) {
  for (double alpha : {0.6, 0.8, 1.0}) {
    const auto g = single(alpha);
    for (double dt = 0.05; dt < 1.0; dt += 0.05) {
      EXPECT_NEAR(branch_drive(g, 0, dt).v_max, 0.9 + 0.4 * alpha, 1e-12) << dt;
      EXPECT_NEAR(branch_drive(g, 0, -dt).v_min, -(0.9 * alpha + 0.4), 1e-12) << dt;
    }
  }
}

TEST(Pairing, PeaksDecayOutsidePlateau) {
  const auto g = single(0.8);
  double prev_max = 1e9, prev_min = 1e9;
  for (double dt = 1.0; dt < 6.5; dt += 0.05) {
    const double v = branch_drive(g, 0, dt).v_max;
    EXPECT_LE(v, prev_max + 1e-12);
    prev_max = v;
    const double m = -branch_drive(g, 0, -dt).v_min;
    EXPECT_LE(m, prev_min + 1e-12);
    prev_min = m;
  }
}

TEST(Pairing, AttenuationOrdersProbabilities) {
  for (double dt : {0.5, 1.5, 2.5, 4.0}) {
    double prev_set = -1, prev_reset = -1;
    for (double alpha = 0.6; alpha <= 1.0 + 1e-12; alpha += 0.05) {
      const auto g = single(std::min(alpha, 1.0));
      const double ps = branch_drive(g, 0, dt).p_set;
      const double pr = branch_drive(g, 0, -dt).p_reset;
      EXPECT_GE(ps, prev_set);
      EXPECT_GE(pr, prev_reset);
      prev_set = ps;
      prev_reset = pr;
    }
  }
}

TEST(Pairing, DenseAndSparseSpread) {
  PairingGeometry g;
  g.bank = DendriteBank::make(16, 0.6, 1.0, 0.0);
  for (double dt : {1.01, 2.0, 3.0}) {
    const auto d = branch_drives(g, dt);
    const auto r = branch_drives(g, -dt);
    EXPECT_LE(d.back().v_max - d.front().v_max, 0.16 + 1e-12);
    EXPECT_GT(d.back().v_max - d.front().v_max, 0.0);
    EXPECT_LE(r.front().v_min - r.back().v_min, 0.36 + 1e-12);
    EXPECT_GT(r.front().v_min - r.back().v_min, d.back().v_max - d.front().v_max);
  }
}

TEST(Pairing, IdenticalBranchesWithoutDendrites) {
  PairingGeometry g;
  g.bank = DendriteBank::make(16, 1.0, 1.0, 0.0);
  for (double dt = -6.0; dt <= 6.0; dt += 0.7) {
    const auto d = branch_drives(g, dt);
    for (const auto& x : d) {
      EXPECT_EQ(x.v_max, d[0].v_max);
      EXPECT_EQ(x.v_min, d[0].v_min);
    }
  }
}

TEST(Pairing, HullMatchesFullCandidateSet) {
  PhiloxStream rng(3, 0, 0);
  for (Shape shape : {Shape::Hrht, Shape::DoubleSawtooth, Shape::DoubleExponential, Shape::BioPlausible}) {
    PairingGeometry g;
    g.pre = g.post = make_waveform(shape);
    g.bank = DendriteBank::make(4, 0.6, 1.0, 0.3);
    for (double dt = -6.0; dt <= 6.0; dt += 0.35) {
      for (std::size_t i = 0; i < g.bank.size(); ++i) {
        const auto full = DriveCandidates::build(g, i, dt, false);
        const auto hull = DriveCandidates::build(g, i, dt, true);
        EXPECT_LE(hull.size(), full.size());
        for (int k = 0; k < 5; ++k) {
          const SpikeScale s{1.0 + 0.1 * rng.normal(), 1.0 + 0.1 * rng.normal()};
          const auto a = full.evaluate(g.device, s);
          const auto b = hull.evaluate(g.device, s);
          EXPECT_NEAR(a.v_max, b.v_max, 1e-12);
          EXPECT_NEAR(a.v_min, b.v_min, 1e-12);
        }
      }
    }
  }
}

TEST(Pairing, PairOnlyMasksLoneSpikes) {
  auto g = single(1.0);
  // post head alone over the pre's silent region before t = -1
  const auto masked = branch_drive(g, 0, -3.5);
  g.pair_only = false;
  const auto raw = branch_drive(g, 0, -3.5);
  EXPECT_GE(raw.v_max, 0.9 - 1e-12);
  EXPECT_LT(masked.v_max, raw.v_max);
}

TEST(Pairing, CertainSwitching) {
  std::vector<BranchDrive> drives(16);
  for (auto& d : drives) d.p_set = 1.0, d.p_reset = 0.0;
  std::vector<DeviceState> states(16);
  PhiloxStream rng(1, 0, 0);
  const auto c = apply_pairing(drives, states, rng);
  EXPECT_EQ(c.n_set, 16);
  EXPECT_EQ(c.n_reset, 0);
  for (const auto& s : states) EXPECT_TRUE(s.on);
}

TEST(Pairing, NoSwitching) {
  std::vector<BranchDrive> drives(16);
  std::vector<DeviceState> states(16, DeviceState{true, 1e-6});
  PhiloxStream rng(1, 0, 0);
  const auto c = apply_pairing(drives, states, rng);
  EXPECT_EQ(c.n_set + c.n_reset, 0);
  for (const auto& s : states) EXPECT_TRUE(s.on);
}

TEST(Pairing, ChronologicalOrder) {
  BranchDrive d;
  d.p_set = d.p_reset = 1.0;
  d.t_max = 0.1;
  d.t_min = 0.7;  // SET first, RESET wins
  std::vector<DeviceState> s(1);
  PhiloxStream rng(1, 0, 0);
  auto c = apply_pairing(std::span<const BranchDrive>(&d, 1), s, rng);
  EXPECT_FALSE(s[0].on);
  EXPECT_EQ(c.n_set, 1);
  EXPECT_EQ(c.n_reset, 1);
  std::swap(d.t_max, d.t_min);  // RESET first on an OFF device: no-op, then SET
  s[0].on = false;
  c = apply_pairing(std::span<const BranchDrive>(&d, 1), s, rng);
  EXPECT_TRUE(s[0].on);
  EXPECT_EQ(c.n_set, 1);
  EXPECT_EQ(c.n_reset, 0);
}

TEST(Pairing, LengthMismatch) {
  PairingGeometry g;
  std::vector<DeviceState> states(3);
  PhiloxStream rng(1, 0, 0);
  EXPECT_THROW(apply_pairing(g, states, 0.5, rng), std::invalid_argument);
}

TEST(Pairing, MeanSetCount) {
  PairingGeometry g;
  g.bank = DendriteBank::make(16, 1.0, 1.0, 0.0);
  const auto drives = branch_drives(g, 0.5);
  double total = 0;
  for (std::uint32_t e = 0; e < 10000; ++e) {
    std::vector<DeviceState> s(16);
    auto rng = rng_substream(11, 0, e);
    total += apply_pairing(drives, s, rng).n_set;
  }
  EXPECT_NEAR(total / 10000, 16 * phi(3.0), 0.02);
}

TEST(Pairing, GeometryValidation) {
  PairingGeometry g;
  EXPECT_NO_THROW(g.validate());
  g.dt_step = 0.2;
  EXPECT_THROW(g.validate(), ConfigError);
  g.dt_step = 0;
  EXPECT_THROW(g.validate(), ConfigError);
}
