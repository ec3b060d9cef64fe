#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "synstdp/errors.hpp"
#include "synstdp/waveform.hpp"

namespace synstdp::closedform {

/// Dendritically attenuated HRHT pairing under the linear switching model.
/// Branch i (1-based) peaks at A - i*delta_v - beta*dt; R_ON is normalised to 1.
struct AppendixParams {
  int n = 16;
  double A = 1.3;         // peak-to-peak amplitude A+ + A-
  double delta_v = 0.02;  // amplitude step between branches
  double beta = 0.08;     // A- / tau+
  double v_th = 1.0;
  double gamma = 2.0;     // switching slope per volt

  void validate() const {
    using detail::require;
    require(n >= 1, "closedform.n: must be >= 1");
    require(A > 0 && delta_v > 0 && v_th > 0 && gamma > 0, "closedform: A, delta_v, v_th, gamma must be > 0");
    require(beta >= 0, "closedform.beta: must be >= 0");
    require(n * delta_v < A, "closedform: n * delta_v must be < A");
  }

  /// Parameters implied by an HRHT waveform whose head is attenuated in n equal
  /// steps of a_plus * (alpha_max - alpha_min) / (n - 1).
  static AppendixParams from_waveform(const WaveformParams& w, int n, double alpha_min,
                                      double alpha_max, double v_th, double gamma) {
    AppendixParams p;
    p.n = n;
    p.A = w.a_plus + w.a_minus;
    p.delta_v = n > 1 ? w.a_plus * (alpha_max - alpha_min) / (n - 1) : 0.0;
    p.beta = w.a_minus / w.tau_plus;
    p.v_th = v_th;
    p.gamma = gamma;
    return p;
  }
};

struct Quadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  // a - b*dt + c*dt^2
  double operator()(double dt) const { return a - b * dt + c * dt * dt; }
};

inline double branch_peak(const AppendixParams& p, int i, double dt) {
  return p.A - i * p.delta_v - p.beta * dt;
}

struct KIndex {
  double k;
  double a1;
  double b1;
  long k_ceil;
};

/// Threshold index k(dt) = a1 + b1*dt as the Appendix defines it.
inline KIndex k_index(const AppendixParams& p, double dt) {
  const double a1 = (p.A - p.v_th) / p.delta_v;
  const double b1 = p.beta / p.delta_v;
  const double k = a1 + b1 * dt;
  return {k, a1, b1, static_cast<long>(std::ceil(k - 1e-12))};
}

/// Linear switching probability (clamped to [0, 1]).
inline double linear_probability(const AppendixParams& p, double v) {
  return std::clamp(p.gamma * (v - p.v_th), 0.0, 1.0);
}

/// Average compound conductance: every branch contributes its clamped
/// linear switching probability.
inline double avg_conductance_direct(const AppendixParams& p, double dt) {
  double g = 0.0;
  for (int i = 1; i <= p.n; ++i) g += linear_probability(p, branch_peak(p, i, dt));
  return g;
}

/// Real-valued number of switching branches, (A - V_th - beta*dt) / delta_v.
inline double active_count(const AppendixParams& p, double dt) {
  return (p.A - p.v_th - p.beta * dt) / p.delta_v;
}

/// Continuum form of the direct sum: branches 1..kappa with kappa real,
/// kappa*[gamma(A - V_th) - beta*gamma*dt] - gamma*delta_v*kappa(kappa+1)/2.
inline double avg_conductance_continuous(const AppendixParams& p, double dt) {
  const double kappa = active_count(p, dt);
  return kappa * (p.gamma * (p.A - p.v_th) - p.beta * p.gamma * dt) -
         p.gamma * p.delta_v * kappa * (kappa + 1.0) / 2.0;
}

/// The Appendix's printed closed forms for (a, b, c).
inline Quadratic quadratic_coeffs_paper(const AppendixParams& p) {
  const auto [k, a1, b1, kc] = k_index(p, 0.0);
  (void)k, (void)kc;
  const double n = p.n;
  Quadratic q;
  q.a = p.gamma * (p.A - p.v_th) * (n - a1) -
        p.gamma * p.delta_v * (n * (n + 1) - a1 * (a1 + 1)) / 2.0;
  q.b = b1 * p.gamma * (0.5 * p.delta_v * (a1 + 1) - p.beta);
  q.c = b1 * (p.beta * p.gamma + b1);
  return q;
}

/// Term-by-term expansion of the Appendix's sum with its own k = a1 + b1*dt
/// taken as real: (n - k)[gamma(A - V_th) - beta*gamma*dt]
///   - gamma*delta_v*(n(n+1)/2 - k(k+1)/2).
inline Quadratic quadratic_coeffs_literal(const AppendixParams& p) {
  const auto [k, a1, b1, kc] = k_index(p, 0.0);
  (void)k, (void)kc;
  const double n = p.n, g = p.gamma, dv = p.delta_v, u = p.A - p.v_th;
  Quadratic q;
  q.a = (n - a1) * g * u - g * dv * (n * (n + 1) - a1 * (a1 + 1)) / 2.0;
  // dt coefficient: -b1*g*u - (n - a1)*beta*g + g*dv*(2*a1 + 1)*b1/2
  q.b = -(-b1 * g * u - (n - a1) * p.beta * g + g * dv * (2 * a1 + 1) * b1 / 2.0);
  q.c = g * b1 * (p.beta + dv * b1 / 2.0);
  return q;
}

/// dt >= 0 values where some branch probability hits 0 or 1; between
/// consecutive values the direct sum is a single linear piece.
inline std::vector<double> clamping_breakpoints(const AppendixParams& p) {
  std::vector<double> out;
  if (p.beta <= 0) return out;
  for (int i = 1; i <= p.n; ++i) {
    const double base = p.A - i * p.delta_v - p.v_th;
    for (double level : {0.0, 1.0 / p.gamma}) {
      const double dt = (base - level) / p.beta;
      if (dt >= 0) out.push_back(dt);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Quadratic through three points of avg_conductance_continuous on [lo, hi].
/// The interval must be one smooth piece: no clamping breakpoint strictly
/// inside, and between 1 and n branches active throughout.
inline Quadratic quadratic_coeffs_fitted(const AppendixParams& p, double lo, double hi) {
  p.validate();
  detail::require(lo < hi && lo >= 0, "closedform: need 0 <= lo < hi");
  constexpr double kEdge = 1e-12;
  for (double b : clamping_breakpoints(p))
    detail::require(!(b > lo + kEdge && b < hi - kEdge),
                    "closedform: interval contains a clamping breakpoint at dt=" + std::to_string(b));
  for (double dt : {lo, hi}) {
    const double kappa = active_count(p, dt);
    detail::require(kappa >= 1.0 - kEdge && kappa <= p.n + kEdge,
                    "closedform: active branch count leaves [1, n] on the interval");
  }
  const std::array<double, 3> x{lo, 0.5 * (lo + hi), hi};
  std::array<double, 3> y{};
  for (int j = 0; j < 3; ++j) y[j] = avg_conductance_continuous(p, x[j]);
  // Newton divided differences -> monomial coefficients
  const double d01 = (y[1] - y[0]) / (x[1] - x[0]);
  const double d12 = (y[2] - y[1]) / (x[2] - x[1]);
  const double d012 = (d12 - d01) / (x[2] - x[0]);
  const double c2 = d012;
  const double c1 = d01 - d012 * (x[0] + x[1]);
  const double c0 = y[0] - d01 * x[0] + d012 * x[0] * x[1];
  return {c0, -c1, c2};
}

/// Closed-form monomial coefficients of avg_conductance_continuous.
inline Quadratic continuous_coeffs(const AppendixParams& p) {
  const auto [k, a1, b1, kc] = k_index(p, 0.0);
  (void)k, (void)kc;
  const double gdv = p.gamma * p.delta_v;
  return {gdv * a1 * (a1 - 1.0) / 2.0, gdv * b1 * (2.0 * a1 - 1.0) / 2.0, gdv * b1 * b1 / 2.0};
}

}  // namespace synstdp::closedform
