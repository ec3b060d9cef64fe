#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "synstdp/errors.hpp"
#include "synstdp/waveform.hpp"

namespace synstdp {

/// One dendritic branch: scales the pre-synaptic spike by alpha and delays it.
struct Branch {
  double alpha = 1.0;
  double delay = 0.0;
};

enum class DelayAssignment { Ramp, Uniform, Reversed };

inline std::string_view to_string(DelayAssignment d) {
  switch (d) {
    case DelayAssignment::Ramp: return "ramp";
    case DelayAssignment::Uniform: return "uniform";
    case DelayAssignment::Reversed: return "reversed";
  }
  return "?";
}

inline DelayAssignment parse_delay_assignment(std::string_view s) {
  for (auto d : {DelayAssignment::Ramp, DelayAssignment::Uniform, DelayAssignment::Reversed})
    if (to_string(d) == s) return d;
  throw ConfigError("dendrites.delay_assignment: unknown value '" + std::string(s) + "'");
}

/// Ordered bank of branches; branch i drives device i. Indices are 0-based.
class DendriteBank {
 public:
  DendriteBank() : DendriteBank(std::vector<Branch>(16)) {}

  explicit DendriteBank(std::vector<Branch> branches) : branches_(std::move(branches)) {
    detail::require(!branches_.empty(), "dendrites.n: must be >= 1");
    for (const auto& b : branches_) {
      detail::require(b.alpha > 0 && b.alpha <= 1, "dendrites.alpha: must be in (0, 1]");
      detail::require(std::isfinite(b.delay) && b.delay >= 0, "dendrites.delay: must be >= 0");
    }
  }

  /// Linear attenuation ramp alpha_min -> alpha_max over the branches and a
  /// delay profile per `assign` (ramp 0 -> delay_max by default).
  static DendriteBank make(std::size_t n, double alpha_min, double alpha_max, double delay_max,
                           DelayAssignment assign = DelayAssignment::Ramp) {
    using detail::require;
    require(n >= 1, "dendrites.n: must be >= 1");
    require(alpha_min > 0, "dendrites.alpha_min: must be > 0");
    require(alpha_max <= 1, "dendrites.alpha_max: must be <= 1");
    require(alpha_min <= alpha_max, "dendrites.alpha_min: must be <= alpha_max");
    require(std::isfinite(delay_max) && delay_max >= 0, "dendrites.delay_max: must be >= 0");
    std::vector<Branch> b(n);
    if (n == 1) {
      b[0] = {alpha_max, assign == DelayAssignment::Uniform ? delay_max : 0.0};
      return DendriteBank(std::move(b));
    }
    const double last = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = static_cast<double>(i) / last;
      b[i].alpha = i + 1 == n ? alpha_max : alpha_min + (alpha_max - alpha_min) * f;
      switch (assign) {
        case DelayAssignment::Ramp: b[i].delay = delay_max * f; break;
        case DelayAssignment::Uniform: b[i].delay = delay_max; break;
        case DelayAssignment::Reversed: b[i].delay = delay_max * (1.0 - f); break;
      }
    }
    return DendriteBank(std::move(b));
  }

  std::size_t size() const { return branches_.size(); }
  const Branch& branch(std::size_t i) const { return branches_.at(i); }
  const std::vector<Branch>& branches() const { return branches_; }

  /// alpha_i * V_pre(t - delay_i).
  double pre_spike_value(std::size_t i, const SpikeWaveform& w, double t) const {
    if (i >= branches_.size())
      throw std::out_of_range("branch index " + std::to_string(i) + " out of range");
    const auto& b = branches_[i];
    return b.alpha * w.evaluate(t - b.delay);
  }

 private:
  std::vector<Branch> branches_;
};

}  // namespace synstdp
