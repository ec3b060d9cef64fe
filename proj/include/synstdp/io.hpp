#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "synstdp/analysis.hpp"
#include "synstdp/montecarlo.hpp"

namespace synstdp {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form.
inline std::string fmt_num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v + 0.0);
  return std::string(buf, r.ptr);
}

inline std::string fmt_num(long long v) { return std::to_string(v); }

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError(p.string() + ": cannot open for writing");
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& p) {
  out.flush();
  if (!out) throw IoError(p.string() + ": write failed");
}

inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_field(const std::string& s, const std::string& where) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw IoError(where + ": bad number '" + s + "'");
  return v;
}

// Rows of a CSV file after checking the header.
inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p,
                                                      std::string_view header) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError(p.string() + ": cannot open");
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw IoError(p.string() + ": expected header '" + std::string(header) + "'");
  std::vector<std::vector<std::string>> rows;
  const auto ncol = split_csv(header).size();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != ncol) throw IoError(p.string() + ":" + std::to_string(lineno) + ": wrong column count");
    rows.push_back(std::move(f));
  }
  return rows;
}

}  // namespace detail

inline constexpr std::string_view kWindowHeader = "delta_t,epoch,delta_g_norm,n_set,n_reset";
inline constexpr std::string_view kMeanHeader = "delta_t,mc_mean,mc_std,analytic";
inline constexpr std::string_view kStatesHeader = "delta_t,state_index,probability";

inline void write_window_file(const StdpWindow& w, const std::filesystem::path& p) {
  auto out = detail::open_out(p);
  out << kWindowHeader << '\n';
  for (const auto& pt : w.points) {
    const auto dt = fmt_num(pt.delta_t);
    for (std::size_t e = 0; e < pt.epochs.size(); ++e) {
      const auto& o = pt.epochs[e];
      out << dt << ',' << e << ',' << fmt_num(o.delta_g_norm) << ',' << o.n_set << ',' << o.n_reset << '\n';
    }
  }
  detail::finish(out, p);
}

/// Writes window.csv, mean.csv and states.csv into dir (created if missing).
inline void write_window_csv(const StdpWindow& w, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": " + ec.message());
  write_window_file(w, dir / "window.csv");

  const auto mean_path = dir / "mean.csv";
  auto mean = detail::open_out(mean_path);
  mean << kMeanHeader << '\n';
  for (const auto& pt : w.points) {
    const auto s = summarize_point(pt);
    mean << fmt_num(s.delta_t) << ',' << fmt_num(s.mc_mean) << ',' << fmt_num(s.mc_std) << ','
         << fmt_num(s.analytic) << '\n';
  }
  detail::finish(mean, mean_path);

  const auto states_path = dir / "states.csv";
  auto states = detail::open_out(states_path);
  states << kStatesHeader << '\n';
  for (const auto& pt : w.points)
    for (std::size_t k = 0; k < pt.states.size(); ++k)
      states << fmt_num(pt.delta_t) << ',' << k << ',' << fmt_num(pt.states[k]) << '\n';
  detail::finish(states, states_path);
}

inline std::vector<PointSummary> read_mean_csv(const std::filesystem::path& p) {
  std::vector<PointSummary> out;
  const auto where = p.string();
  for (const auto& r : detail::read_csv(p, kMeanHeader)) {
    PointSummary s;
    s.delta_t = detail::parse_field<double>(r[0], where);
    s.mc_mean = detail::parse_field<double>(r[1], where);
    s.mc_std = detail::parse_field<double>(r[2], where);
    s.analytic = detail::parse_field<double>(r[3], where);
    out.push_back(std::move(s));
  }
  if (out.empty()) throw IoError(where + ": no rows");
  return out;
}

/// Rebuilds a window from a results directory (window.csv plus analytic
/// values from mean.csv and, if present, states.csv).
inline StdpWindow read_window_dir(const std::filesystem::path& dir) {
  const auto mean = read_mean_csv(dir / "mean.csv");
  StdpWindow w;
  std::map<double, std::size_t> index;
  for (const auto& s : mean) {
    index[s.delta_t] = w.points.size();
    WindowPoint pt;
    pt.delta_t = s.delta_t;
    pt.analytic = s.analytic;
    w.points.push_back(std::move(pt));
  }
  const auto wp = dir / "window.csv";
  for (const auto& r : detail::read_csv(wp, kWindowHeader)) {
    const double dt = detail::parse_field<double>(r[0], wp.string());
    const auto it = index.find(dt);
    if (it == index.end()) throw IoError(wp.string() + ": delta_t " + r[0] + " missing from mean.csv");
    EpochOutcome o;
    o.delta_g_norm = detail::parse_field<double>(r[2], wp.string());
    o.n_set = detail::parse_field<int>(r[3], wp.string());
    o.n_reset = detail::parse_field<int>(r[4], wp.string());
    w.points[it->second].epochs.push_back(o);
  }
  const auto sp = dir / "states.csv";
  if (std::filesystem::exists(sp)) {
    for (const auto& r : detail::read_csv(sp, kStatesHeader)) {
      const auto it = index.find(detail::parse_field<double>(r[0], sp.string()));
      if (it == index.end()) continue;
      w.points[it->second].states.push_back(detail::parse_field<double>(r[2], sp.string()));
    }
    for (const auto& pt : w.points) w.n_devices = std::max(w.n_devices, pt.states.size() ? pt.states.size() - 1 : 0);
  }
  return w;
}

struct SvgOptions {
  int width = 640;
  int height = 420;
  std::string title;
  std::string x_label = "delta t (normalized)";
  std::string y_label = "normalized delta G";
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fixed(double v, int digits = 2) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v + 0.0;
  return ss.str();
}

}  // namespace detail

/// Standalone SVG dot plot: one dot per observed (delta_t, delta_G) outcome
/// with opacity equal to its frequency at that delta_t, plus the analytic
/// expectation as a polyline.
inline std::string write_svg_scatter(const StdpWindow& w, const SvgOptions& opt = {}) {
  if (w.points.empty()) throw std::invalid_argument("write_svg_scatter: empty window");
  double x0 = w.points.front().delta_t, x1 = w.points.back().delta_t;
  double y0 = 0.0, y1 = 0.0;
  std::vector<std::map<double, std::size_t>> hist(w.points.size());
  for (std::size_t i = 0; i < w.points.size(); ++i) {
    const auto& pt = w.points[i];
    x0 = std::min(x0, pt.delta_t);
    x1 = std::max(x1, pt.delta_t);
    y0 = std::min(y0, pt.analytic);
    y1 = std::max(y1, pt.analytic);
    for (const auto& e : pt.epochs) {
      // bucket LRS-perturbed values to 0.01 so dots stay countable
      const double key = std::round(e.delta_g_norm * 100.0) / 100.0;
      ++hist[i][key];
      y0 = std::min(y0, key);
      y1 = std::max(y1, key);
    }
  }
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad_y = 0.05 * (y1 - y0);
  y0 -= pad_y;
  y1 += pad_y;

  const double ml = 60, mr = 20, mt = opt.title.empty() ? 20 : 40, mb = 50;
  const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;
  auto sx = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return mt + (y1 - y) / (y1 - y0) * ph; };
  using detail::fixed;

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
    << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    s << "<text x=\"" << fixed(opt.width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::xml_escape(opt.title) << "</text>\n";
  // axes
  s << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << fixed(ml) << "\" y1=\"" << fixed(mt + ph) << "\" x2=\"" << fixed(ml + pw) << "\" y2=\""
    << fixed(mt + ph) << "\"/>\n"
    << "<line x1=\"" << fixed(ml) << "\" y1=\"" << fixed(mt) << "\" x2=\"" << fixed(ml) << "\" y2=\""
    << fixed(mt + ph) << "\"/>\n";
  if (y0 < 0 && y1 > 0)
    s << "<line x1=\"" << fixed(ml) << "\" y1=\"" << fixed(sy(0)) << "\" x2=\"" << fixed(ml + pw) << "\" y2=\""
      << fixed(sy(0)) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"3,3\"/>\n";
  s << "</g>\n<g text-anchor=\"middle\">\n";
  constexpr int kTicks = 6;
  for (int k = 0; k <= kTicks; ++k) {
    const double xv = x0 + (x1 - x0) * k / kTicks;
    s << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << fixed(mt + ph + 16) << "\">" << fixed(xv, 1) << "</text>\n";
  }
  s << "</g>\n<g text-anchor=\"end\">\n";
  for (int k = 0; k <= kTicks; ++k) {
    const double yv = y0 + (y1 - y0) * k / kTicks;
    s << "<text x=\"" << fixed(ml - 6) << "\" y=\"" << fixed(sy(yv) + 4) << "\">" << fixed(yv, 1) << "</text>\n";
  }
  s << "</g>\n"
    << "<text x=\"" << fixed(ml + pw / 2) << "\" y=\"" << fixed(opt.height - 10.0)
    << "\" text-anchor=\"middle\">" << detail::xml_escape(opt.x_label) << "</text>\n"
    << "<text x=\"16\" y=\"" << fixed(mt + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << fixed(mt + ph / 2) << ")\">" << detail::xml_escape(opt.y_label) << "</text>\n";

  s << "<g fill=\"#1f4e9c\" class=\"dots\">\n";
  for (std::size_t i = 0; i < w.points.size(); ++i) {
    const auto total = static_cast<double>(w.points[i].epochs.size());
    for (const auto& [level, count] : hist[i]) {
      const double op = std::max(0.02, count / total);
      s << "<circle cx=\"" << fixed(sx(w.points[i].delta_t)) << "\" cy=\"" << fixed(sy(level))
        << "\" r=\"2\" fill-opacity=\"" << fixed(op, 3) << "\"/>\n";
    }
  }
  s << "</g>\n<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < w.points.size(); ++i) {
    if (i) s << ' ';
    s << fixed(sx(w.points[i].delta_t)) << ',' << fixed(sy(w.points[i].analytic));
  }
  s << "\"/>\n</svg>\n";
  return s.str();
}

inline void write_text_file(const std::filesystem::path& p, std::string_view text) {
  auto out = detail::open_out(p);
  out << text;
  detail::finish(out, p);
}

}  // namespace synstdp
