#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "synstdp/errors.hpp"
#include "synstdp/montecarlo.hpp"

namespace synstdp {

struct Point2 {
  double x;
  double y;
};

/// |G| = amplitude * exp(-|dt| / tau), signed by `sign`.
struct ExponentialParams {
  double amplitude = 0.0;
  double tau = 0.0;
  int sign = 1;
};

struct LinearParams {
  double slope = 0.0;
  double intercept = 0.0;
};

/// G = a - b*dt + c*dt^2.
struct QuadraticParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

using FitParams = std::variant<ExponentialParams, LinearParams, QuadraticParams>;

struct FitResult {
  FitParams params;
  double rmse = 0.0;
  double r_squared = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool converged = true;
  std::size_t excluded = 0;
  std::size_t iterations = 0;
  std::string note;

  double predict(double x) const {
    return std::visit(
        [x](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ExponentialParams>)
            return p.sign * p.amplitude * std::exp(-std::abs(x) / p.tau);
          else if constexpr (std::is_same_v<T, LinearParams>)
            return p.intercept + p.slope * x;
          else
            return p.a - p.b * x + p.c * x * x;
        },
        params);
  }

  std::string model_name() const {
    switch (params.index()) {
      case 0: return "exp";
      case 1: return "linear";
      default: return "quadratic";
    }
  }
};

namespace detail {

inline std::vector<Point2> sorted(std::span<const Point2> pts) {
  std::vector<Point2> v(pts.begin(), pts.end());
  std::sort(v.begin(), v.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  return v;
}

inline std::size_t distinct_x(const std::vector<Point2>& sorted_pts) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < sorted_pts.size(); ++i)
    if (i == 0 || sorted_pts[i].x != sorted_pts[i - 1].x) ++n;
  return n;
}

/// Least squares min |A x - y| by Householder QR; A given column-wise.
/// Empty result when a diagonal of R is negligible (rank deficient).
inline std::optional<std::vector<double>> least_squares(std::vector<std::vector<double>> cols,
                                                        std::vector<double> y) {
  const std::size_t m = y.size();
  const std::size_t p = cols.size();
  if (m < p) return std::nullopt;
  double scale = 0.0;
  for (const auto& c : cols)
    for (double v : c) scale = std::max(scale, std::abs(v));
  std::vector<double> diag(p);
  for (std::size_t j = 0; j < p; ++j) {
    auto& a = cols[j];
    double norm = 0.0;
    for (std::size_t i = j; i < m; ++i) norm += a[i] * a[i];
    norm = std::sqrt(norm);
    if (norm <= 1e-13 * std::max(scale, 1e-300) * std::sqrt(static_cast<double>(m)))
      return std::nullopt;
    const double alpha = a[j] > 0 ? -norm : norm;
    std::vector<double> v(a.begin() + static_cast<std::ptrdiff_t>(j), a.end());
    v[0] -= alpha;
    double vv = 0.0;
    for (double x : v) vv += x * x;
    auto reflect = [&](std::vector<double>& col) {
      double dot = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * col[j + i];
      const double f = 2.0 * dot / vv;
      for (std::size_t i = 0; i < v.size(); ++i) col[j + i] -= f * v[i];
    };
    for (std::size_t k = j; k < p; ++k) reflect(cols[k]);
    reflect(y);
    diag[j] = cols[j][j];
  }
  std::vector<double> x(p);
  for (std::size_t j = p; j-- > 0;) {
    double s = y[j];
    for (std::size_t k = j + 1; k < p; ++k) s -= cols[k][j] * x[k];
    x[j] = s / diag[j];
  }
  return x;
}

inline void score(FitResult& r, const std::vector<Point2>& pts) {
  double mean = 0.0;
  for (const auto& p : pts) mean += p.y;
  mean /= static_cast<double>(pts.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : pts) {
    const double e = p.y - r.predict(p.x);
    ss_res += e * e;
    ss_tot += (p.y - mean) * (p.y - mean);
  }
  r.rmse = std::sqrt(ss_res / static_cast<double>(pts.size()));
  if (ss_tot > 0)
    r.r_squared = 1.0 - ss_res / ss_tot;
  else
    r.r_squared = ss_res <= 1e-24 ? 1.0 : 0.0;
  r.lo = pts.front().x;
  r.hi = pts.back().x;
}

}  // namespace detail

/// Ordinary least-squares line.
inline FitResult fit_linear(std::span<const Point2> points) {
  const auto pts = detail::sorted(points);
  if (pts.size() < 2) throw FitError("fit_linear: need at least 2 points");
  if (detail::distinct_x(pts) < 2) throw FitError("fit_linear: all delta_t identical");
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) mx += p.x, my += p.y;
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
  }
  FitResult r;
  const double slope = sxy / sxx;
  r.params = LinearParams{slope, my - slope * mx};
  detail::score(r, pts);
  return r;
}

/// Least-squares quadratic, reported as G = a - b*dt + c*dt^2.
inline FitResult fit_quadratic(std::span<const Point2> points) {
  const auto pts = detail::sorted(points);
  if (detail::distinct_x(pts) < 3) throw FitError("fit_quadratic: need at least 3 distinct delta_t");
  std::vector<std::vector<double>> cols(3, std::vector<double>(pts.size()));
  std::vector<double> y(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cols[0][i] = 1.0;
    cols[1][i] = pts[i].x;
    cols[2][i] = pts[i].x * pts[i].x;
    y[i] = pts[i].y;
  }
  auto sol = detail::least_squares(std::move(cols), std::move(y));
  if (!sol) throw FitError("fit_quadratic: rank-deficient design");
  FitResult r;
  r.params = QuadraticParams{(*sol)[0], -(*sol)[1], (*sol)[2]};
  detail::score(r, pts);
  return r;
}

/// Fits |value| = A exp(-|dt| / tau): log-linear start, then damped
/// Gauss-Newton on the original scale in (A, 1/tau). Points with zero value
/// are dropped and counted in `excluded`. A nonpositive decay rate (flat or
/// growing data) is returned flagged as unconverged.
inline FitResult fit_exponential(std::span<const Point2> points, std::size_t max_iter = 100) {
  auto all = detail::sorted(points);
  if (all.size() < 3) throw FitError("fit_exponential: need at least 3 points");
  const bool neg_x = std::any_of(all.begin(), all.end(), [](auto p) { return p.x < 0; });
  const bool pos_x = std::any_of(all.begin(), all.end(), [](auto p) { return p.x > 0; });
  const bool neg_y = std::any_of(all.begin(), all.end(), [](auto p) { return p.y < 0; });
  const bool pos_y = std::any_of(all.begin(), all.end(), [](auto p) { return p.y > 0; });
  if (neg_x && pos_x) throw FitError("fit_exponential: delta_t values must share one sign");
  if (neg_y && pos_y) throw FitError("fit_exponential: values must share one sign");
  const int sign = neg_y ? -1 : 1;

  std::vector<Point2> mag;  // (|dt|, |value|)
  FitResult r;
  for (const auto& p : all) {
    if (!(std::abs(p.y) > 0) || !std::isfinite(p.y)) {
      ++r.excluded;
      continue;
    }
    mag.push_back({std::abs(p.x), std::abs(p.y)});
  }
  if (mag.size() < 2 || detail::distinct_x(detail::sorted(mag)) < 2)
    throw FitError("fit_exponential: fewer than 2 usable points");

  // log-linear start
  double mx = 0.0, ml = 0.0;
  for (const auto& p : mag) mx += p.x, ml += std::log(p.y);
  mx /= static_cast<double>(mag.size());
  ml /= static_cast<double>(mag.size());
  double sxx = 0.0, sxl = 0.0;
  for (const auto& p : mag) {
    sxx += (p.x - mx) * (p.x - mx);
    sxl += (p.x - mx) * (std::log(p.y) - ml);
  }
  double rate = -sxl / sxx;
  double amp = std::exp(ml + rate * mx);

  auto sse = [&](double a, double k) {
    double s = 0.0;
    for (const auto& p : mag) {
      const double e = p.y - a * std::exp(-k * p.x);
      s += e * e;
    }
    return s;
  };

  bool converged = false;
  double current = sse(amp, rate);
  std::size_t it = 0;
  for (; it < max_iter && !converged; ++it) {
    std::vector<std::vector<double>> jac(2, std::vector<double>(mag.size()));
    std::vector<double> res(mag.size());
    for (std::size_t i = 0; i < mag.size(); ++i) {
      const double e = std::exp(-rate * mag[i].x);
      jac[0][i] = e;
      jac[1][i] = -amp * mag[i].x * e;
      res[i] = mag[i].y - amp * e;
    }
    auto step = detail::least_squares(std::move(jac), std::move(res));
    if (!step) break;
    double lambda = 1.0;
    double a_new = amp, k_new = rate, trial = current;
    for (int halving = 0; halving < 30; ++halving, lambda *= 0.5) {
      a_new = amp + lambda * (*step)[0];
      k_new = rate + lambda * (*step)[1];
      trial = sse(a_new, k_new);
      if (trial <= current) break;
    }
    const double da = std::abs(a_new - amp), dk = std::abs(k_new - rate);
    converged = trial <= current && da <= 1e-9 * std::max(std::abs(a_new), 1e-300) &&
                dk <= 1e-9 * std::max(std::abs(k_new), 1e-12);
    if (trial > current) break;  // no descent along the GN direction
    amp = a_new;
    rate = k_new;
    current = trial;
  }
  r.iterations = it;
  r.converged = converged;
  if (!(rate > 0)) {
    r.converged = false;
    r.note = "nonpositive decay rate";
  } else if (!converged) {
    r.note = "iteration limit or stalled step";
  }
  r.params = ExponentialParams{amp, rate > 0 ? 1.0 / rate : std::numeric_limits<double>::infinity(), sign};
  // score on the retained points in their original signed form
  std::vector<Point2> kept;
  for (const auto& p : all)
    if (std::abs(p.y) > 0 && std::isfinite(p.y)) kept.push_back(p);
  if (rate > 0) {
    detail::score(r, kept);
  } else {
    // tau is infinite: the model is the constant A
    FitResult flat = r;
    flat.params = LinearParams{0.0, sign * amp};
    detail::score(flat, kept);
    r.rmse = flat.rmse;
    r.r_squared = flat.r_squared;
    r.lo = flat.lo;
    r.hi = flat.hi;
  }
  return r;
}

enum class WindowSide { Pos, Neg };

/// Default exponential-fit domain: the decaying region beyond the plateau.
inline std::pair<double, double> default_fit_domain(const SpikeWaveform& w, WindowSide side) {
  const double lo = w.tau_minus(), hi = w.tau_minus() + w.tau_plus();
  return side == WindowSide::Pos ? std::pair{lo, hi} : std::pair{-hi, -lo};
}

/// Points with x in [lo, hi] (inclusive up to 1e-9).
inline std::vector<Point2> select_domain(std::span<const Point2> pts, double lo, double hi) {
  std::vector<Point2> out;
  for (const auto& p : pts)
    if (p.x >= lo - 1e-9 && p.x <= hi + 1e-9) out.push_back(p);
  return out;
}

struct PointSummary {
  double delta_t = 0.0;
  double mc_mean = 0.0;
  double mc_std = 0.0;  // sample standard deviation (N - 1)
  double analytic = 0.0;
  std::vector<int> levels;  // distinct n_set - n_reset values, ascending

  std::size_t distinct_levels() const { return levels.size(); }
};

inline PointSummary summarize_point(const WindowPoint& pt) {
  PointSummary s;
  s.delta_t = pt.delta_t;
  s.analytic = pt.analytic;
  const auto n = pt.epochs.size();
  std::set<int> lv;
  double mean = 0.0;
  for (const auto& e : pt.epochs) {
    mean += e.delta_g_norm;
    lv.insert(e.n_set - e.n_reset);
  }
  if (n > 0) mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const auto& e : pt.epochs) ss += (e.delta_g_norm - mean) * (e.delta_g_norm - mean);
  s.mc_mean = mean;
  s.mc_std = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  s.levels.assign(lv.begin(), lv.end());
  return s;
}

inline std::vector<PointSummary> window_summary(const StdpWindow& w) {
  if (w.points.empty()) throw std::invalid_argument("window_summary: empty window");
  std::vector<PointSummary> out;
  out.reserve(w.points.size());
  for (const auto& pt : w.points) out.push_back(summarize_point(pt));
  return out;
}

/// (delta_t, analytic) or (delta_t, mc_mean) pairs from a summary.
inline std::vector<Point2> curve_points(std::span<const PointSummary> s, bool use_mc = false) {
  std::vector<Point2> out;
  out.reserve(s.size());
  for (const auto& p : s) out.push_back({p.delta_t, use_mc ? p.mc_mean : p.analytic});
  return out;
}

}  // namespace synstdp
