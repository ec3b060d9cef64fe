#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "synstdp/dendrite.hpp"
#include "synstdp/device.hpp"
#include "synstdp/errors.hpp"
#include "synstdp/random.hpp"
#include "synstdp/waveform.hpp"

namespace synstdp {

/// Everything needed to turn one pre/post pairing into per-device drives.
/// Convention: pre fires at t = 0, post at t = delta_t; the device sees
/// post(t - delta_t) - alpha_i * pre(t - delay_i). Positive drives SET.
struct PairingGeometry {
  SpikeWaveform pre{};
  SpikeWaveform post{};
  DendriteBank bank{};
  DeviceModel device{};
  double dt_step = 0.01;
  bool pair_only = true;  // only where both spikes are nonzero

  void validate() const {
    device.validate();
    detail::require(std::isfinite(dt_step) && dt_step > 0, "simulation.dt_step: must be > 0");
    const double limit = std::min(pre.tau_minus(), post.tau_minus()) / 10.0;
    detail::require(dt_step <= limit * (1 + 1e-12),
                    "simulation.dt_step: must be <= min(tau_minus)/10");
  }
};

struct TraceSample {
  double t;
  double v;
};

/// Peak net potentials of one branch and the resulting switching odds.
struct BranchDrive {
  double v_max = 0.0;
  double t_max = 0.0;
  double v_min = 0.0;
  double t_min = 0.0;
  double p_set = 0.0;
  double p_reset = 0.0;

  bool set_first() const { return t_max <= t_min; }

  /// Probability an OFF device ends the pairing ON.
  double p_on_from_off() const { return p_set * (set_first() ? 1.0 - p_reset : 1.0); }

  /// Probability an ON device ends the pairing OFF.
  double p_off_from_on() const { return p_reset * (set_first() ? 1.0 : 1.0 - p_set); }
};

/// Multiplicative amplitude factors applied to the two spikes of a pairing.
struct SpikeScale {
  double pre = 1.0;
  double post = 1.0;
};

namespace detail {

// Post and (attenuated) pre spike values at time t; V = post - pre.
struct Candidate {
  double t;
  double post;
  double pre;
};

struct BranchFrame {
  double pre_lo, pre_hi, post_lo, post_hi;
};

inline BranchFrame branch_frame(const PairingGeometry& g, std::size_t i, double delta_t) {
  const double delay = g.bank.branch(i).delay;
  auto [a, b] = g.pre.support();
  auto [c, d] = g.post.support();
  return {a + delay, b + delay, c + delta_t, d + delta_t};
}

inline bool disjoint(const BranchFrame& f) {
  return f.pre_hi <= f.post_lo || f.post_hi <= f.pre_lo;
}

template <typename Fn>
void for_each_grid_time(const BranchFrame& f, double dt, Fn&& fn) {
  const double lo = std::min(f.pre_lo, f.post_lo);
  const double hi = std::max(f.pre_hi, f.post_hi);
  const auto k0 = static_cast<long long>(std::ceil(lo / dt - 1e-9));
  const auto k1 = static_cast<long long>(std::floor(hi / dt + 1e-9));
  for (long long k = k0; k <= k1; ++k) fn(static_cast<double>(k) * dt);
}

inline Candidate masked(const PairingGeometry& g, Candidate c) {
  if (g.pair_only && (c.post == 0.0 || c.pre == 0.0)) return {c.t, 0.0, 0.0};
  return c;
}

inline bool inside_side(const SpikeWaveform& w, double x, Side s) {
  auto [lo, hi] = w.support();
  return s == Side::Left ? (x > lo + 1e-9 && x <= hi + 1e-9) : (x >= lo - 1e-9 && x < hi - 1e-9);
}

/// Grid samples plus one-sided limits at every piece boundary of both spikes,
/// sorted by time. Suprema of piecewise shapes sit on those limits.
inline std::vector<Candidate> gather_candidates(const PairingGeometry& g, std::size_t i,
                                                double delta_t) {
  const auto& br = g.bank.branch(i);
  const auto frame = branch_frame(g, i, delta_t);
  std::vector<Candidate> out;
  if (g.pair_only && disjoint(frame)) return {{0.0, 0.0, 0.0}};
  for_each_grid_time(frame, g.dt_step, [&](double t) {
    out.push_back(masked(g, {t, g.post.evaluate(t - delta_t), br.alpha * g.pre.evaluate(t - br.delay)}));
  });
  std::vector<double> marks;
  for (double b : g.pre.breakpoints()) marks.push_back(b + br.delay);
  for (double b : g.post.breakpoints()) marks.push_back(b + delta_t);
  for (double t : marks) {
    for (Side s : {Side::Left, Side::Right}) {
      Candidate c{t, g.post.limit(t - delta_t, s), br.alpha * g.pre.limit(t - br.delay, s)};
      if (g.pair_only && !(inside_side(g.post, t - delta_t, s) && inside_side(g.pre, t - br.delay, s)))
        c = {t, 0.0, 0.0};
      out.push_back(c);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& a, const Candidate& b) { return a.t < b.t; });
  return out;
}

inline double cross(const Candidate& o, const Candidate& a, const Candidate& b) {
  return (a.post - o.post) * (b.pre - o.pre) - (a.pre - o.pre) * (b.post - o.post);
}

/// Vertices of the convex hull of the (post, pre) points. Any linear
/// functional s_post*post - s_pre*pre attains its extremes on these.
inline std::vector<Candidate> hull_vertices(std::vector<Candidate> pts) {
  std::sort(pts.begin(), pts.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.post, a.pre, a.t) < std::tie(b.post, b.pre, b.t);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Candidate& a, const Candidate& b) {
                          return a.post == b.post && a.pre == b.pre;
                        }),
            pts.end());
  if (pts.size() <= 2) return pts;
  std::vector<Candidate> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t j = pts.size() - 1, lower = k + 1; j-- > 0;) {
    while (k >= lower && cross(h[k - 2], h[k - 1], pts[j]) <= 0) --k;
    h[k++] = pts[j];
  }
  h.resize(k - 1);
  std::sort(h.begin(), h.end(), [](const Candidate& a, const Candidate& b) { return a.t < b.t; });
  return h;
}

}  // namespace detail

/// Sampled net potential V(t) of branch i. Samples where either spike is zero
/// are forced to 0 when pair_only is set; disjoint supports give a single
/// zero sample.
inline std::vector<TraceSample> net_potential_trace(const PairingGeometry& g, std::size_t i,
                                                    double delta_t) {
  const auto& br = g.bank.branch(i);
  const auto frame = detail::branch_frame(g, i, delta_t);
  if (g.pair_only && detail::disjoint(frame)) return {{0.0, 0.0}};
  std::vector<TraceSample> out;
  detail::for_each_grid_time(frame, g.dt_step, [&](double t) {
    const auto c = detail::masked(
        g, {t, g.post.evaluate(t - delta_t), br.alpha * g.pre.evaluate(t - br.delay)});
    out.push_back({t, c.post - c.pre});
  });
  if (out.empty()) out.push_back({0.0, 0.0});
  return out;
}

/// Candidate set for one branch at one delta_t, optionally reduced to its
/// convex hull for repeated evaluation under random spike scales.
class DriveCandidates {
 public:
  static DriveCandidates build(const PairingGeometry& g, std::size_t i, double delta_t,
                               bool reduce = false) {
    auto pts = detail::gather_candidates(g, i, delta_t);
    if (reduce) pts = detail::hull_vertices(std::move(pts));
    return DriveCandidates(std::move(pts));
  }

  BranchDrive evaluate(const DeviceModel& device, SpikeScale s = {}) const {
    BranchDrive d;
    bool first = true;
    for (const auto& c : pts_) {
      const double v = s.post * c.post - s.pre * c.pre;
      if (first || v > d.v_max) d.v_max = v, d.t_max = c.t;
      if (first || v < d.v_min) d.v_min = v, d.t_min = c.t;
      first = false;
    }
    d.p_set = device.set_probability(d.v_max);
    d.p_reset = device.reset_probability(d.v_min);
    return d;
  }

  std::size_t size() const { return pts_.size(); }

 private:
  explicit DriveCandidates(std::vector<detail::Candidate> pts) : pts_(std::move(pts)) {}
  std::vector<detail::Candidate> pts_;
};

inline BranchDrive branch_drive(const PairingGeometry& g, std::size_t i, double delta_t) {
  return DriveCandidates::build(g, i, delta_t).evaluate(g.device);
}

inline std::vector<BranchDrive> branch_drives(const PairingGeometry& g, double delta_t) {
  std::vector<BranchDrive> out;
  out.reserve(g.bank.size());
  for (std::size_t i = 0; i < g.bank.size(); ++i) out.push_back(branch_drive(g, i, delta_t));
  return out;
}

struct PairingCounts {
  int n_set = 0;
  int n_reset = 0;
};

/// One stochastic pairing over the compound synapse. Each branch draws a SET
/// and a RESET attempt (both always consumed from the stream); successful
/// attempts apply in order of their peak times.
inline PairingCounts apply_pairing(std::span<const BranchDrive> drives,
                                   std::span<DeviceState> states, PhiloxStream& rng) {
  if (drives.size() != states.size())
    throw std::invalid_argument("apply_pairing: state count does not match branch count");
  PairingCounts counts;
  for (std::size_t i = 0; i < drives.size(); ++i) {
    const auto& d = drives[i];
    auto& s = states[i];
    const bool set = rng.bernoulli(d.p_set);
    const bool reset = rng.bernoulli(d.p_reset);
    auto do_set = [&] {
      if (set && !s.on) s.on = true, ++counts.n_set;
    };
    auto do_reset = [&] {
      if (reset && s.on) s.on = false, ++counts.n_reset;
    };
    if (d.set_first()) {
      do_set();
      do_reset();
    } else {
      do_reset();
      do_set();
    }
  }
  return counts;
}

inline PairingCounts apply_pairing(const PairingGeometry& g, std::span<DeviceState> states,
                                   double delta_t, PhiloxStream& rng) {
  const auto drives = branch_drives(g, delta_t);
  return apply_pairing(drives, states, rng);
}

}  // namespace synstdp
