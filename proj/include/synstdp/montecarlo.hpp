#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "synstdp/errors.hpp"
#include "synstdp/pairing.hpp"
#include "synstdp/random.hpp"

namespace synstdp {

enum class InitKind { Split, AllOff, AllOn, Random };

/// How the compound synapse is initialised before each trial. Split starts
/// from all-OFF for delta_t > 0, all-ON for delta_t < 0 and alternates the
/// two (even epochs OFF, odd epochs ON) at delta_t == 0.
struct InitPolicy {
  InitKind kind = InitKind::Split;
  double q_on = 0.5;  // Random only
};

struct WindowConfig {
  PairingGeometry geometry{};
  double delta_t_min = -6.0;
  double delta_t_max = 6.0;
  double delta_t_step = 0.1;
  std::size_t epochs = 10000;
  std::uint64_t seed = 42;
  InitPolicy init{};
  double amp_noise_sigma = 0.0;
  unsigned workers = 0;  // 0: SYNSTDP_WORKERS or hardware concurrency

  void validate() const {
    using detail::require;
    geometry.validate();
    require(std::isfinite(delta_t_step) && delta_t_step > 0,
            "simulation.delta_t_step: must be > 0");
    require(std::isfinite(delta_t_min) && std::isfinite(delta_t_max) && delta_t_min < delta_t_max,
            "simulation.delta_t_min: must be < delta_t_max");
    require(epochs >= 1, "simulation.epochs: must be >= 1");
    require(amp_noise_sigma >= 0 && amp_noise_sigma < 0.5,
            "simulation.amp_noise_sigma: must be in [0, 0.5)");
    if (init.kind == InitKind::Random)
      require(init.q_on >= 0 && init.q_on <= 1, "simulation.init_policy.random.q: must be in [0, 1]");
  }
};

struct EpochOutcome {
  double delta_g_norm = 0.0;  // sum of conductance changes times R_ON
  int n_set = 0;
  int n_reset = 0;
};

struct WindowPoint {
  double delta_t = 0.0;
  std::vector<EpochOutcome> epochs;
  double analytic = 0.0;
  std::vector<double> states;  // P(k devices switched), k = 0..n
};

struct StdpWindow {
  std::size_t n_devices = 0;
  std::vector<WindowPoint> points;
};

/// Grid values are rounded to 1e-9 so that e.g. the 61st point of
/// [-6, 6] step 0.1 is exactly 0.
inline std::vector<double> delta_t_grid(double lo, double hi, double step) {
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = lo + static_cast<double>(i) * step;
    out[i] = std::round(v * 1e9) / 1e9 + 0.0;
  }
  return out;
}

inline std::vector<double> delta_t_grid(const WindowConfig& cfg) {
  return delta_t_grid(cfg.delta_t_min, cfg.delta_t_max, cfg.delta_t_step);
}

enum class InitialState { AllOff, AllOn };

inline double expected_delta_g(std::span<const BranchDrive> drives, InitialState init) {
  double sum = 0.0;
  for (const auto& d : drives)
    sum += init == InitialState::AllOff ? d.p_on_from_off() : -d.p_off_from_on();
  return sum;
}

/// Expected normalised conductance change from a uniform initial state
/// (R_OFF neglected; LRS variation has unit mean and drops out).
inline double expected_delta_g(const PairingGeometry& g, double delta_t, InitialState init) {
  const auto drives = branch_drives(g, delta_t);
  return expected_delta_g(drives, init);
}

/// Exact Poisson-binomial distribution of the number of successes among
/// independent Bernoulli(p_i), by the O(n^2) convolution recurrence.
inline std::vector<double> state_distribution(std::span<const double> p) {
  std::vector<double> dist(p.size() + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double q = p[j];
    for (std::size_t k = j + 1; k > 0; --k) dist[k] = dist[k] * (1.0 - q) + dist[k - 1] * q;
    dist[0] *= 1.0 - q;
  }
  return dist;
}

namespace detail {

inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SYNSTDP_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Probability that a device starts OFF at this grid point.
inline double init_weight_off(const InitPolicy& init, double delta_t) {
  switch (init.kind) {
    case InitKind::AllOff: return 1.0;
    case InitKind::AllOn: return 0.0;
    case InitKind::Random: return 1.0 - init.q_on;
    case InitKind::Split: return delta_t > 0 ? 1.0 : (delta_t < 0 ? 0.0 : 0.5);
  }
  return 1.0;
}

inline void analytic_point(const InitPolicy& init, std::span<const BranchDrive> drives,
                           WindowPoint& pt) {
  std::vector<double> up, down;
  for (const auto& d : drives) {
    up.push_back(d.p_on_from_off());
    down.push_back(d.p_off_from_on());
  }
  const double w = init_weight_off(init, pt.delta_t);
  double expect = 0.0;
  for (std::size_t i = 0; i < drives.size(); ++i) expect += w * up[i] - (1.0 - w) * down[i];
  pt.analytic = expect;
  if (init.kind == InitKind::Random) {
    // Devices start independently; each switches with a mixed probability.
    std::vector<double> mix(drives.size());
    for (std::size_t i = 0; i < drives.size(); ++i) mix[i] = w * up[i] + (1.0 - w) * down[i];
    pt.states = state_distribution(mix);
    return;
  }
  if (w == 1.0) {
    pt.states = state_distribution(up);
  } else if (w == 0.0) {
    pt.states = state_distribution(down);
  } else {
    auto a = state_distribution(up);
    const auto b = state_distribution(down);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = w * a[k] + (1.0 - w) * b[k];
    pt.states = std::move(a);
  }
}

inline bool starts_off(const InitPolicy& init, double delta_t, std::size_t epoch,
                       PhiloxStream& rng) {
  switch (init.kind) {
    case InitKind::AllOff: return true;
    case InitKind::AllOn: return false;
    case InitKind::Random: return !rng.bernoulli(init.q_on);
    case InitKind::Split: return delta_t > 0 || (delta_t == 0 && epoch % 2 == 0);
  }
  return true;
}

inline void simulate_point(const WindowConfig& cfg, std::uint32_t index, WindowPoint& pt) {
  const auto& g = cfg.geometry;
  const std::size_t n = g.bank.size();
  const bool noisy = cfg.amp_noise_sigma > 0;

  std::vector<DriveCandidates> cand;
  cand.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    cand.push_back(DriveCandidates::build(g, i, pt.delta_t, noisy));
  std::vector<BranchDrive> drives(n);
  for (std::size_t i = 0; i < n; ++i) drives[i] = cand[i].evaluate(g.device);
  analytic_point(cfg.init, drives, pt);

  std::vector<DeviceState> states(n);
  std::vector<BranchDrive> trial(n);
  pt.epochs.resize(cfg.epochs);
  const double r_on = g.device.r_on;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    auto rng = rng_substream(cfg.seed, index, static_cast<std::uint32_t>(e));
    std::span<const BranchDrive> use = drives;
    if (noisy) {
      SpikeScale s;
      do s.pre = 1.0 + cfg.amp_noise_sigma * rng.normal(); while (s.pre <= 0);
      do s.post = 1.0 + cfg.amp_noise_sigma * rng.normal(); while (s.post <= 0);
      for (std::size_t i = 0; i < n; ++i) trial[i] = cand[i].evaluate(g.device, s);
      use = trial;
    }
    double before = 0.0;
    for (auto& st : states) {
      st.on = !starts_off(cfg.init, pt.delta_t, e, rng);
      st.g_on = g.device.sample_on_conductance(rng);
      before += st.conductance(g.device);
    }
    const auto counts = apply_pairing(use, states, rng);
    double after = 0.0;
    for (const auto& st : states) after += st.conductance(g.device);
    pt.epochs[e] = {(after - before) * r_on, counts.n_set, counts.n_reset};
  }
}

}  // namespace detail

/// Sweeps delta_t over the configured grid. Each (point, epoch) trial uses its
/// own counter-based substream, so results do not depend on worker count.
inline StdpWindow run_window(const WindowConfig& cfg) {
  cfg.validate();
  const auto grid = delta_t_grid(cfg);
  StdpWindow w;
  w.n_devices = cfg.geometry.bank.size();
  w.points.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) w.points[i].delta_t = grid[i];

  const unsigned workers =
      std::min<unsigned>(detail::resolve_workers(cfg.workers), static_cast<unsigned>(grid.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) {
      try {
        detail::simulate_point(cfg, static_cast<std::uint32_t>(i), w.points[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return w;
}

}  // namespace synstdp
