#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "synstdp/errors.hpp"

namespace synstdp {

enum class Shape { Hrht, Rectangular, DoubleSawtooth, DoubleExponential, BioPlausible };

inline std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::Hrht: return "hrht";
    case Shape::Rectangular: return "rect";
    case Shape::DoubleSawtooth: return "sawtooth";
    case Shape::DoubleExponential: return "dexp";
    case Shape::BioPlausible: return "bio";
  }
  return "?";
}

inline Shape parse_shape(std::string_view name) {
  for (Shape s : {Shape::Hrht, Shape::Rectangular, Shape::DoubleSawtooth,
                  Shape::DoubleExponential, Shape::BioPlausible}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown waveform shape '" + std::string(name) + "'");
}

/// Shape-specific constants. Only DoubleExponential (tau_head, tau_tail) and
/// BioPlausible (the two Gaussian lobes and the truncation pads) read these.
struct ShapeExtras {
  double tau_head = 0.3;
  double tau_tail = 1.5;
  double head_center = -0.2;
  double head_width = 0.3;
  double tail_center = 2.0;
  double tail_width = 1.5;
  double head_pad = 0.5;
  double tail_pad = 1.0;
};

struct WaveformParams {
  double a_plus = 0.9;     // head amplitude [V]
  double a_minus = 0.4;    // tail peak magnitude [V]
  double tau_minus = 1.0;  // head duration
  double tau_plus = 5.0;   // tail duration
  ShapeExtras extra{};
};

/// Which one-sided limit to take at a point.
enum class Side { Left, Right };

/// A spike shape in its own time frame: head on (-tau_minus, 0), tail on
/// (0, tau_plus). Immutable after construction.
class SpikeWaveform {
 public:
  SpikeWaveform() : SpikeWaveform(Shape::Hrht, WaveformParams{}) {}

  SpikeWaveform(Shape shape, const WaveformParams& params) : shape_(shape), p_(params) {
    validate();
  }

  Shape shape() const { return shape_; }
  const WaveformParams& params() const { return p_; }
  double a_plus() const { return p_.a_plus; }
  double a_minus() const { return p_.a_minus; }
  double tau_minus() const { return p_.tau_minus; }
  double tau_plus() const { return p_.tau_plus; }

  /// Smallest interval outside which evaluate() is exactly zero.
  std::pair<double, double> support() const {
    if (shape_ == Shape::BioPlausible)
      return {-p_.tau_minus - p_.extra.head_pad, p_.tau_plus + p_.extra.tail_pad};
    return {-p_.tau_minus, p_.tau_plus};
  }

  /// Points where the piecewise definition changes, ascending.
  std::vector<double> breakpoints() const {
    auto [lo, hi] = support();
    if (shape_ == Shape::BioPlausible) return {lo, hi};
    return {lo, 0.0, hi};
  }

  /// V_spk(t) with open piece intervals; zero at the piece boundaries
  /// themselves and outside the support.
  double evaluate(double t) const {
    if (!std::isfinite(t)) return 0.0;
    if (shape_ == Shape::BioPlausible) {
      auto [lo, hi] = support();
      return (t > lo && t < hi) ? bio(t) : 0.0;
    }
    if (t > -p_.tau_minus && t < 0.0) return head(t);
    if (t > 0.0 && t < p_.tau_plus) return tail(t);
    return 0.0;
  }

  double operator()(double t) const { return evaluate(t); }

  /// One-sided limit of V_spk at t. Arguments within 1e-9 of a breakpoint are
  /// snapped onto it so shifted copies line up despite rounding.
  double limit(double t, Side side) const {
    for (double b : breakpoints()) {
      if (std::abs(t - b) < kSnap) {
        t = b;
        break;
      }
    }
    const bool left = side == Side::Left;
    auto inside = [left](double x, double lo, double hi) {
      return left ? (x > lo && x <= hi) : (x >= lo && x < hi);
    };
    if (shape_ == Shape::BioPlausible) {
      auto [lo, hi] = support();
      return inside(t, lo, hi) ? bio(t) : 0.0;
    }
    if (inside(t, -p_.tau_minus, 0.0)) return head(t);
    if (inside(t, 0.0, p_.tau_plus)) return tail(t);
    return 0.0;
  }

  static constexpr double kSnap = 1e-9;

 private:
  double head(double t) const {
    switch (shape_) {
      case Shape::Hrht:
      case Shape::Rectangular: return p_.a_plus;
      case Shape::DoubleSawtooth: return p_.a_plus * (1.0 + t / p_.tau_minus);
      case Shape::DoubleExponential: return p_.a_plus * std::exp(t / p_.extra.tau_head);
      case Shape::BioPlausible: break;
    }
    return 0.0;
  }

  double tail(double t) const {
    switch (shape_) {
      case Shape::Rectangular: return -p_.a_minus;
      case Shape::Hrht:
      case Shape::DoubleSawtooth: return -p_.a_minus * (1.0 - t / p_.tau_plus);
      case Shape::DoubleExponential: return -p_.a_minus * std::exp(-t / p_.extra.tau_tail);
      case Shape::BioPlausible: break;
    }
    return 0.0;
  }

  double bio(double t) const {
    const auto& e = p_.extra;
    const double h = (t - e.head_center) / e.head_width;
    const double g = (t - e.tail_center) / e.tail_width;
    return p_.a_plus * std::exp(-h * h) - p_.a_minus * std::exp(-g * g);
  }

  void validate() const {
    using detail::require;
    auto finite = [](double x) { return std::isfinite(x); };
    require(finite(p_.tau_minus) && p_.tau_minus > 0, "waveform.tau_minus: must be > 0");
    require(finite(p_.tau_plus) && p_.tau_plus > 0, "waveform.tau_plus: must be > 0");
    require(finite(p_.a_plus) && p_.a_plus > 0 && p_.a_plus <= 10.0,
            "waveform.a_plus: must be in (0, 10] V");
    require(finite(p_.a_minus) && p_.a_minus >= 0 && p_.a_minus <= 10.0,
            "waveform.a_minus: must be in [0, 10] V");
    const auto& e = p_.extra;
    if (shape_ == Shape::DoubleExponential) {
      require(e.tau_head > 0, "waveform.extra.tau_head: must be > 0");
      require(e.tau_tail > 0, "waveform.extra.tau_tail: must be > 0");
    }
    if (shape_ == Shape::BioPlausible) {
      require(e.head_width > 0, "waveform.extra.head_width: must be > 0");
      require(e.tail_width > 0, "waveform.extra.tail_width: must be > 0");
      require(e.head_pad >= 0, "waveform.extra.head_pad: must be >= 0");
      require(e.tail_pad >= 0, "waveform.extra.tail_pad: must be >= 0");
      require(finite(e.head_center) && finite(e.tail_center),
              "waveform.extra: lobe centers must be finite");
    }
  }

  Shape shape_;
  WaveformParams p_;
};

inline SpikeWaveform make_waveform(Shape shape, const WaveformParams& params = {}) {
  return SpikeWaveform(shape, params);
}

}  // namespace synstdp
