#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <variant>

#include "synstdp/errors.hpp"
#include "synstdp/random.hpp"

namespace synstdp {

/// Standard normal CDF via erfc (absolute error well below 1e-12).
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Switching probability is the normal CDF of the threshold distribution,
/// integrated from 0 V.
struct GaussianSwitching {};

/// Piecewise-linear switching: 0 up to the threshold, slope gamma, then 1.
struct LinearSwitching {
  double gamma = 2.0;  // per volt
};

using SwitchingModel = std::variant<GaussianSwitching, LinearSwitching>;

/// Stochastic bistable resistive device.
struct DeviceModel {
  double vth_pos = 1.0;
  double vth_neg = -1.0;
  double sigma_th = 0.1;
  double r_on = 1e6;       // ohm
  double sigma_lrs = 0.1;  // relative spread of ON conductance
  std::optional<double> r_off_ratio;  // R_OFF / R_ON; empty means infinite
  SwitchingModel model = GaussianSwitching{};

  void validate() const {
    using detail::require;
    require(std::isfinite(vth_pos) && vth_pos > 0, "device.vth_pos: must be > 0");
    require(std::isfinite(vth_neg) && vth_neg < 0, "device.vth_neg: must be < 0");
    require(std::isfinite(sigma_th) && sigma_th > 0, "device.sigma_th: must be > 0");
    require(std::isfinite(r_on) && r_on > 0, "device.r_on_ohm: must be > 0");
    require(sigma_lrs >= 0 && sigma_lrs < 0.5, "device.sigma_lrs: must be in [0, 0.5)");
    require(!r_off_ratio || *r_off_ratio > 1, "device.r_off_ratio: must be > 1 or null");
    if (const auto* lin = std::get_if<LinearSwitching>(&model))
      require(std::isfinite(lin->gamma) && lin->gamma > 0,
              "device.prob_model.linear.gamma: must be > 0");
  }

  double set_probability(double v_peak) const { return switch_probability(v_peak, vth_pos); }

  /// Mirror of set_probability on the negative side.
  double reset_probability(double v_peak) const {
    return switch_probability(-v_peak, -vth_neg);
  }

  double g_on_nominal() const { return 1.0 / r_on; }

  double g_off() const { return r_off_ratio ? 1.0 / (r_on * *r_off_ratio) : 0.0; }

  /// ON conductance with LRS variation: (1/R_ON)(1 + eps), eps ~ N(0, sigma_lrs),
  /// redrawn while nonpositive.
  double sample_on_conductance(PhiloxStream& rng) const {
    if (sigma_lrs == 0.0) return g_on_nominal();
    for (;;) {
      const double scale = 1.0 + sigma_lrs * rng.normal();
      if (scale > 0.0) return scale * g_on_nominal();
    }
  }

 private:
  double switch_probability(double v, double vth) const {
    if (!(v > 0.0)) return 0.0;
    if (const auto* lin = std::get_if<LinearSwitching>(&model)) {
      if (v <= vth) return 0.0;
      if (v >= vth + 1.0 / lin->gamma) return 1.0;
      return lin->gamma * (v - vth);
    }
    const double p = normal_cdf((v - vth) / sigma_th) - normal_cdf(-vth / sigma_th);
    return std::clamp(p, 0.0, 1.0);
  }
};

struct DeviceState {
  bool on = false;
  double g_on = 1e-6;  // this device's ON conductance [S]

  double conductance(const DeviceModel& m) const { return on ? g_on : m.g_off(); }
};

}  // namespace synstdp
