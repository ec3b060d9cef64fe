#pragma once

#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "synstdp/errors.hpp"
#include "synstdp/montecarlo.hpp"

namespace synstdp {

struct OutputOptions {
  bool svg = true;
};

/// Validated run configuration. The defaults are the attenuated 16-branch
/// HRHT setup (alpha 0.6..1, no delay, 10^4 epochs).
struct RunConfig {
  int schema_version = 1;
  WindowConfig window = default_window();
  OutputOptions output{};
  // kept for provenance in written results
  nlohmann::json source = nlohmann::json::object();

  static WindowConfig default_window() {
    WindowConfig w;
    w.geometry.bank = DendriteBank::make(16, 0.6, 1.0, 0.0);
    return w;
  }
};

namespace detail {

using nlohmann::json;

inline std::string join(std::string_view path, std::string_view key) {
  return path.empty() ? std::string(key) : std::string(path) + "." + std::string(key);
}

inline void check_keys(const json& obj, std::string_view path,
                       std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(path.empty() ? "<root>" : path) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw ConfigError(join(path, key) + ": unknown key");
  }
}

inline double get_number(const json& obj, std::string_view path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key) + ": expected a number");
  return v.get<double>();
}

inline bool get_bool(const json& obj, std::string_view path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key) + ": expected true or false");
  return v.get<bool>();
}

inline std::string get_string(const json& obj, std::string_view path, const char* key,
                              std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key) + ": expected a string");
  return v.get<std::string>();
}

// Re-raise a ConfigError from a constructor with the section path prefixed
// when the message does not already carry one.
template <typename Fn>
auto in_section(std::string_view path, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(std::string(path), 0) == 0) throw;
    const auto colon = msg.find(':');
    const auto dot = msg.find('.');
    if (dot != std::string::npos && colon != std::string::npos && dot < colon)
      throw ConfigError(std::string(path) + msg.substr(dot));
    throw ConfigError(std::string(path) + ": " + msg);
  }
}

inline SpikeWaveform parse_waveform(const json& j, std::string_view path) {
  check_keys(j, path, {"shape", "a_plus", "a_minus", "tau_minus", "tau_plus", "extra"});
  const Shape shape = in_section(path, [&] { return parse_shape(get_string(j, path, "shape", "hrht")); });
  WaveformParams p;
  p.a_plus = get_number(j, path, "a_plus", p.a_plus);
  p.a_minus = get_number(j, path, "a_minus", p.a_minus);
  p.tau_minus = get_number(j, path, "tau_minus", p.tau_minus);
  p.tau_plus = get_number(j, path, "tau_plus", p.tau_plus);
  if (j.contains("extra")) {
    const auto ep = join(path, "extra");
    const auto& e = j.at("extra");
    check_keys(e, ep, {"tau_head", "tau_tail", "head_center", "head_width", "tail_center",
                       "tail_width", "head_pad", "tail_pad"});
    auto& x = p.extra;
    x.tau_head = get_number(e, ep, "tau_head", x.tau_head);
    x.tau_tail = get_number(e, ep, "tau_tail", x.tau_tail);
    x.head_center = get_number(e, ep, "head_center", x.head_center);
    x.head_width = get_number(e, ep, "head_width", x.head_width);
    x.tail_center = get_number(e, ep, "tail_center", x.tail_center);
    x.tail_width = get_number(e, ep, "tail_width", x.tail_width);
    x.head_pad = get_number(e, ep, "head_pad", x.head_pad);
    x.tail_pad = get_number(e, ep, "tail_pad", x.tail_pad);
  }
  return in_section(path, [&] { return SpikeWaveform(shape, p); });
}

inline DendriteBank parse_dendrites(const json& j) {
  constexpr std::string_view path = "dendrites";
  check_keys(j, path, {"n", "alpha_min", "alpha_max", "delay_max", "delay_assignment"});
  const double n = get_number(j, path, "n", 16);
  if (n < 1 || n != std::floor(n) || n > 4096) throw ConfigError("dendrites.n: must be an integer in [1, 4096]");
  const double lo = get_number(j, path, "alpha_min", 0.6);
  const double hi = get_number(j, path, "alpha_max", 1.0);
  const double delay = get_number(j, path, "delay_max", 0.0);
  const auto assign = parse_delay_assignment(get_string(j, path, "delay_assignment", "ramp"));
  return DendriteBank::make(static_cast<std::size_t>(n), lo, hi, delay, assign);
}

inline DeviceModel parse_device(const json& j) {
  constexpr std::string_view path = "device";
  check_keys(j, path, {"vth_pos", "vth_neg", "sigma_th", "r_on_ohm", "sigma_lrs", "r_off_ratio", "prob_model"});
  DeviceModel d;
  d.vth_pos = get_number(j, path, "vth_pos", d.vth_pos);
  d.vth_neg = get_number(j, path, "vth_neg", d.vth_neg);
  d.sigma_th = get_number(j, path, "sigma_th", d.sigma_th);
  d.r_on = get_number(j, path, "r_on_ohm", d.r_on);
  d.sigma_lrs = get_number(j, path, "sigma_lrs", d.sigma_lrs);
  if (j.contains("r_off_ratio") && !j.at("r_off_ratio").is_null())
    d.r_off_ratio = get_number(j, path, "r_off_ratio", 0);
  if (j.contains("prob_model")) {
    const auto& m = j.at("prob_model");
    if (m.is_string() && m.get<std::string>() == "gaussian") {
      d.model = GaussianSwitching{};
    } else if (m.is_object()) {
      check_keys(m, "device.prob_model", {"linear"});
      if (!m.contains("linear")) throw ConfigError("device.prob_model: expected \"gaussian\" or {\"linear\": {...}}");
      const auto& lin = m.at("linear");
      check_keys(lin, "device.prob_model.linear", {"gamma"});
      d.model = LinearSwitching{get_number(lin, "device.prob_model.linear", "gamma", 2.0)};
    } else {
      throw ConfigError("device.prob_model: expected \"gaussian\" or {\"linear\": {...}}");
    }
  }
  d.validate();
  return d;
}

inline InitPolicy parse_init(const json& j) {
  constexpr std::string_view path = "simulation.init_policy";
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "split") return {InitKind::Split};
    if (s == "all_off") return {InitKind::AllOff};
    if (s == "all_on") return {InitKind::AllOn};
    throw ConfigError(std::string(path) + ": unknown policy '" + s + "'");
  }
  check_keys(j, path, {"random"});
  if (!j.contains("random")) throw ConfigError(std::string(path) + ": expected a policy name or {\"random\": {\"q\": p}}");
  const auto& r = j.at("random");
  check_keys(r, "simulation.init_policy.random", {"q"});
  return {InitKind::Random, get_number(r, "simulation.init_policy.random", "q", 0.5)};
}

}  // namespace detail

/// Parses and validates a configuration document. Missing keys take
/// defaults; unknown keys are errors.
inline RunConfig parse_config(const nlohmann::json& doc) {
  using namespace detail;
  check_keys(doc, "", {"schema_version", "waveform", "post_waveform", "dendrites", "device", "simulation", "output"});
  RunConfig cfg;
  cfg.source = doc;
  cfg.schema_version = static_cast<int>(get_number(doc, "", "schema_version", 1));
  if (cfg.schema_version != 1) throw ConfigError("schema_version: only version 1 is supported");
  auto& w = cfg.window;
  auto& g = w.geometry;
  if (doc.contains("waveform")) g.pre = parse_waveform(doc.at("waveform"), "waveform");
  g.post = doc.contains("post_waveform") ? parse_waveform(doc.at("post_waveform"), "post_waveform") : g.pre;
  if (doc.contains("dendrites")) g.bank = parse_dendrites(doc.at("dendrites"));
  if (doc.contains("device")) g.device = parse_device(doc.at("device"));
  if (doc.contains("simulation")) {
    constexpr std::string_view path = "simulation";
    const auto& s = doc.at("simulation");
    check_keys(s, path, {"dt_step", "pair_only", "amp_noise_sigma", "delta_t_min", "delta_t_max",
                         "delta_t_step", "epochs", "seed", "init_policy"});
    g.dt_step = get_number(s, path, "dt_step", g.dt_step);
    g.pair_only = get_bool(s, path, "pair_only", g.pair_only);
    w.amp_noise_sigma = get_number(s, path, "amp_noise_sigma", w.amp_noise_sigma);
    w.delta_t_min = get_number(s, path, "delta_t_min", w.delta_t_min);
    w.delta_t_max = get_number(s, path, "delta_t_max", w.delta_t_max);
    w.delta_t_step = get_number(s, path, "delta_t_step", w.delta_t_step);
    const double epochs = get_number(s, path, "epochs", static_cast<double>(w.epochs));
    if (epochs < 1 || epochs != std::floor(epochs) || epochs > 1e9)
      throw ConfigError("simulation.epochs: must be an integer >= 1");
    w.epochs = static_cast<std::size_t>(epochs);
    if (s.contains("seed")) {
      const auto& sd = s.at("seed");
      if (!sd.is_number_integer()) throw ConfigError("simulation.seed: expected an integer");
      w.seed = sd.is_number_unsigned() ? sd.get<std::uint64_t>() : static_cast<std::uint64_t>(sd.get<std::int64_t>());
    }
    if (s.contains("init_policy")) w.init = parse_init(s.at("init_policy"));
  }
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    check_keys(o, "output", {"svg"});
    cfg.output.svg = get_bool(o, "output", "svg", cfg.output.svg);
  }
  w.validate();
  return cfg;
}

inline RunConfig parse_config_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  return parse_config(doc);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Fully resolved configuration as JSON (every field explicit).
inline nlohmann::json to_json(const RunConfig& cfg) {
  using nlohmann::json;
  const auto& w = cfg.window;
  const auto& g = w.geometry;
  auto wave = [](const SpikeWaveform& s) {
    const auto& p = s.params();
    const auto& e = p.extra;
    return json{{"shape", std::string(to_string(s.shape()))},
                {"a_plus", p.a_plus},
                {"a_minus", p.a_minus},
                {"tau_minus", p.tau_minus},
                {"tau_plus", p.tau_plus},
                {"extra",
                 {{"tau_head", e.tau_head}, {"tau_tail", e.tau_tail}, {"head_center", e.head_center},
                  {"head_width", e.head_width}, {"tail_center", e.tail_center}, {"tail_width", e.tail_width},
                  {"head_pad", e.head_pad}, {"tail_pad", e.tail_pad}}}};
  };
  json branches = json::array();
  for (const auto& b : g.bank.branches()) branches.push_back({{"alpha", b.alpha}, {"delay", b.delay}});
  json model = "gaussian";
  if (const auto* lin = std::get_if<LinearSwitching>(&g.device.model)) model = {{"linear", {{"gamma", lin->gamma}}}};
  json init;
  switch (w.init.kind) {
    case InitKind::Split: init = "split"; break;
    case InitKind::AllOff: init = "all_off"; break;
    case InitKind::AllOn: init = "all_on"; break;
    case InitKind::Random: init = {{"random", {{"q", w.init.q_on}}}}; break;
  }
  return json{{"schema_version", cfg.schema_version},
              {"waveform", wave(g.pre)},
              {"post_waveform", wave(g.post)},
              {"branches", branches},
              {"device",
               {{"vth_pos", g.device.vth_pos}, {"vth_neg", g.device.vth_neg}, {"sigma_th", g.device.sigma_th},
                {"r_on_ohm", g.device.r_on}, {"sigma_lrs", g.device.sigma_lrs},
                {"r_off_ratio", g.device.r_off_ratio ? json(*g.device.r_off_ratio) : json(nullptr)},
                {"prob_model", model}}},
              {"simulation",
               {{"dt_step", g.dt_step}, {"pair_only", g.pair_only}, {"amp_noise_sigma", w.amp_noise_sigma},
                {"delta_t_min", w.delta_t_min}, {"delta_t_max", w.delta_t_max}, {"delta_t_step", w.delta_t_step},
                {"epochs", w.epochs}, {"seed", w.seed}, {"init_policy", init}}}};
}

}  // namespace synstdp
