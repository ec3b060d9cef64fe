// synstdp command-line front end.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "synstdp/synstdp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace synstdp;

namespace {

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError(p.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

json dist_json(const std::vector<double>& d) {
  json a = json::array();
  for (double v : d) a.push_back(v);
  return a;
}

int cmd_window(const std::string& config, const fs::path& out, std::optional<std::uint64_t> seed,
               std::optional<std::size_t> epochs) {
  RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
  if (seed) cfg.window.seed = *seed;
  if (epochs) cfg.window.epochs = *epochs;
  const auto w = run_window(cfg.window);
  write_window_csv(w, out);
  write_text_file(out / "config.json", to_json(cfg).dump(2) + "\n");
  if (cfg.output.svg) write_text_file(out / "window.svg", write_svg_scatter(w));
  std::cout << "wrote " << w.points.size() << " points x " << cfg.window.epochs << " epochs to "
            << out.string() << "\n";
  return 0;
}

int cmd_statedist(const std::vector<double>& probs, const std::string& config,
                  std::optional<double> delta_t) {
  json outj;
  if (!probs.empty()) {
    for (double p : probs)
      if (!(p >= 0 && p <= 1)) throw ConfigError("--probs: every probability must be in [0, 1]");
    outj = {{"probs", probs}, {"distribution", dist_json(state_distribution(probs))}};
  } else {
    if (!delta_t) throw ConfigError("statedist: give --probs, or --delta-t with an optional --config");
    RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
    const auto drives = branch_drives(cfg.window.geometry, *delta_t);
    std::vector<double> up, down;
    for (const auto& d : drives) {
      up.push_back(d.p_on_from_off());
      down.push_back(d.p_off_from_on());
    }
    WindowPoint pt;
    pt.delta_t = *delta_t;
    detail::analytic_point(cfg.window.init, drives, pt);
    outj = {{"delta_t", *delta_t},
            {"p_set_from_off", up},
            {"p_reset_from_on", down},
            {"from_off", dist_json(state_distribution(up))},
            {"from_on", dist_json(state_distribution(down))},
            {"policy", dist_json(pt.states)},
            {"expected_delta_g", pt.analytic}};
  }
  std::cout << outj.dump(2) << "\n";
  return 0;
}

json fit_params_json(const FitResult& r) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialParams>)
          return {{"A", p.amplitude}, {"tau", p.tau}, {"sign", p.sign}};
        else if constexpr (std::is_same_v<T, LinearParams>)
          return {{"slope", p.slope}, {"intercept", p.intercept}};
        else
          return {{"a", p.a}, {"b", p.b}, {"c", p.c}};
      },
      r.params);
}

int cmd_fit(const fs::path& in, const std::string& side_s, const std::string& model, bool use_mc,
            std::optional<double> lo, std::optional<double> hi) {
  const auto side = side_s == "pos" ? WindowSide::Pos : WindowSide::Neg;
  // domain defaults follow the waveform recorded alongside the results
  SpikeWaveform wave;
  if (fs::exists(in / "config.json")) {
    const auto doc = read_json(in / "config.json");
    if (doc.contains("waveform")) wave = detail::parse_waveform(doc.at("waveform"), "waveform");
  }
  auto [dlo, dhi] = default_fit_domain(wave, side);
  if (lo) dlo = *lo;
  if (hi) dhi = *hi;
  if (!(dlo < dhi)) throw ConfigError("fit: domain must satisfy lo < hi");
  const auto summary = read_mean_csv(in / "mean.csv");
  const auto pts = select_domain(curve_points(summary, use_mc), dlo, dhi);
  FitResult r;
  if (model == "exp")
    r = fit_exponential(pts);
  else if (model == "linear")
    r = fit_linear(pts);
  else
    r = fit_quadratic(pts);
  json j = {{"side", side_s},
            {"model", r.model_name()},
            {"params", fit_params_json(r)},
            {"rmse", r.rmse},
            {"r2", r.r_squared},
            {"domain", {dlo, dhi}},
            {"converged", r.converged},
            {"points", pts.size()},
            {"excluded", r.excluded},
            {"source", use_mc ? "mc_mean" : "analytic"}};
  if (!r.note.empty()) j["note"] = r.note;
  write_text_file(in / "fits.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_closedform(const std::string& params_path) {
  using namespace synstdp::closedform;
  AppendixParams p;
  double lo = 0.3, hi = 0.4;
  if (!params_path.empty()) {
    const auto doc = read_json(params_path);
    synstdp::detail::check_keys(doc, "", {"n", "A", "delta_v", "beta", "v_th", "gamma", "interval"});
    using synstdp::detail::get_number;
    p.n = static_cast<int>(get_number(doc, "", "n", p.n));
    p.A = get_number(doc, "", "A", p.A);
    p.delta_v = get_number(doc, "", "delta_v", p.delta_v);
    p.beta = get_number(doc, "", "beta", p.beta);
    p.v_th = get_number(doc, "", "v_th", p.v_th);
    p.gamma = get_number(doc, "", "gamma", p.gamma);
    if (doc.contains("interval")) {
      const auto& iv = doc.at("interval");
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
        throw ConfigError("interval: expected [lo, hi]");
      lo = iv[0].get<double>();
      hi = iv[1].get<double>();
    }
  }
  p.validate();
  const auto k0 = k_index(p, 0.0);
  json samples = json::array();
  const double end = p.beta > 0 ? (p.A - p.delta_v - p.v_th) / p.beta : 1.0;
  for (double dt : delta_t_grid(0.0, std::max(end, 0.25), 0.25)) {
    const auto k = k_index(p, dt);
    samples.push_back({{"delta_t", dt},
                       {"k", k.k},
                       {"k_ceil", k.k_ceil},
                       {"active", active_count(p, dt)},
                       {"direct", avg_conductance_direct(p, dt)},
                       {"continuous", avg_conductance_continuous(p, dt)}});
  }
  const auto paper = quadratic_coeffs_paper(p);
  const auto literal = quadratic_coeffs_literal(p);
  const auto fitted = quadratic_coeffs_fitted(p, lo, hi);
  auto coeffs = [](const Quadratic& q) { return json{{"a", q.a}, {"b", q.b}, {"c", q.c}}; };
  double dev_fit = 0.0, dev_paper = 0.0, dev_literal = 0.0;
  for (int j = 0; j < 20; ++j) {
    const double dt = lo + (hi - lo) * j / 19.0;
    const double g = avg_conductance_direct(p, dt);
    dev_fit = std::max(dev_fit, std::abs(fitted(dt) - g));
    dev_paper = std::max(dev_paper, std::abs(paper(dt) - g));
    dev_literal = std::max(dev_literal, std::abs(literal(dt) - g));
  }
  json j = {{"a1", k0.a1},
            {"b1", k0.b1},
            {"samples", samples},
            {"interval", {lo, hi}},
            {"paper_coeffs", coeffs(paper)},
            {"literal_coeffs", coeffs(literal)},
            {"fitted_coeffs", coeffs(fitted)},
            {"max_deviation_from_direct",
             {{"fitted", dev_fit}, {"paper", dev_paper}, {"literal", dev_literal}}},
            {"envelope", p.gamma * p.delta_v * p.n},
            {"clamping_breakpoints", clamping_breakpoints(p)}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

energy::EnergyScenario custom_scenario(const std::string& path) {
  auto sc = energy::conservative();
  sc.name = "custom";
  if (path.empty()) return sc;
  const auto doc = read_json(path);
  synstdp::detail::check_keys(doc, "", {"name", "tau_minus", "tau_plus", "a_plus", "a_minus", "r_on", "e_neuron",
                                        "eta_act", "eta_on", "synapses", "neurons", "devices_per_synapse"});
  using synstdp::detail::get_number;
  sc.name = synstdp::detail::get_string(doc, "", "name", sc.name);
  sc.tau_minus = get_number(doc, "", "tau_minus", sc.tau_minus);
  sc.tau_plus = get_number(doc, "", "tau_plus", sc.tau_plus);
  sc.a_plus = get_number(doc, "", "a_plus", sc.a_plus);
  sc.a_minus = get_number(doc, "", "a_minus", sc.a_minus);
  sc.r_on = get_number(doc, "", "r_on", sc.r_on);
  sc.e_neuron = get_number(doc, "", "e_neuron", sc.e_neuron);
  sc.eta_act = get_number(doc, "", "eta_act", sc.eta_act);
  sc.eta_on = get_number(doc, "", "eta_on", sc.eta_on);
  sc.synapses = get_number(doc, "", "synapses", sc.synapses);
  sc.neurons = get_number(doc, "", "neurons", sc.neurons);
  sc.devices_per_synapse = get_number(doc, "", "devices_per_synapse", sc.devices_per_synapse);
  return sc;
}

int cmd_energy(const std::string& scenario, const std::string& params, const std::string& mode_s,
               double baseline, const std::string& json_out) {
  std::vector<energy::EnergyScenario> list;
  if (scenario == "all")
    list = {energy::conservative(), energy::medium(), energy::aggressive()};
  else if (scenario == "custom")
    list = {custom_scenario(params)};
  else
    list = {energy::scenario(scenario)};
  const auto mode = mode_s == "full" ? energy::SpikeEnergyMode::Full : energy::SpikeEnergyMode::HeadOnly;
  const auto cols = energy::table1(list, baseline, mode);
  std::cout << energy::render_table1(cols);
  json arr = json::array();
  for (const auto& c : cols) {
    json t = c.overflow ? json(nullptr) : json(c.throughput);
    json r = c.overflow ? json(nullptr) : json(c.ratio);
    arr.push_back({{"scenario", c.scenario.name},
                   {"mode", mode_s},
                   {"e_spk_j", c.e_spk},
                   {"e_snn_j", c.e_snn},
                   {"images_per_s_per_w", t},
                   {"ratio_to_gpu", r},
                   {"gpu_baseline", baseline},
                   {"overflow", c.overflow}});
  }
  if (json_out == "-")
    std::cout << arr.dump(2) << "\n";
  else if (!json_out.empty())
    write_text_file(json_out, arr.dump(2) + "\n");
  return 0;
}

int cmd_validate(std::size_t epochs, std::uint64_t seed) {
  validation::Options opt;
  opt.epochs = epochs;
  opt.seed = seed;
  bool all = true;
  validation::run_all(opt, [&](const validation::CriterionResult& r) {
    all = all && r.passed;
    std::cout << r.id << (r.id.size() < 3 ? "  " : " ") << (r.passed ? "PASS" : "FAIL") << "  " << r.detail
              << std::endl;
  });
  return all ? 0 : 1;
}

int cmd_plot(const fs::path& in, const std::string& out, const std::string& title) {
  const auto w = read_window_dir(in);
  SvgOptions opt;
  opt.title = title;
  const fs::path target = out.empty() ? in / "window.svg" : fs::path(out);
  write_text_file(target, write_svg_scatter(w, opt));
  std::cout << "wrote " << target.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compound binary synapse STDP simulator"};
  app.require_subcommand(1);

  auto* window = app.add_subcommand("window", "Monte Carlo STDP window");
  std::string w_config;
  fs::path w_out;
  std::optional<std::uint64_t> w_seed;
  std::optional<std::size_t> w_epochs;
  window->add_option("--config", w_config, "JSON config (defaults if omitted)")->check(CLI::ExistingFile);
  window->add_option("--out", w_out, "Output directory")->required();
  window->add_option("--seed", w_seed, "Override simulation.seed");
  window->add_option("--epochs", w_epochs, "Override simulation.epochs")->check(CLI::PositiveNumber);

  auto* statedist = app.add_subcommand("statedist", "Poisson-binomial state distribution");
  std::vector<double> s_probs;
  std::string s_config;
  std::optional<double> s_dt;
  statedist->add_option("--probs", s_probs, "Per-device switching probabilities");
  statedist->add_option("--config", s_config, "JSON config")->check(CLI::ExistingFile);
  statedist->add_option("--delta-t", s_dt, "Relative timing");

  auto* fit = app.add_subcommand("fit", "Fit a learning function to a written window");
  fs::path f_in;
  std::string f_side = "pos", f_model = "exp";
  bool f_mc = false;
  std::optional<double> f_lo, f_hi;
  fit->add_option("--in", f_in, "Results directory")->required()->check(CLI::ExistingDirectory);
  fit->add_option("--side", f_side)->check(CLI::IsMember({"pos", "neg"}));
  fit->add_option("--model", f_model)->check(CLI::IsMember({"exp", "linear", "quadratic"}));
  fit->add_flag("--mc", f_mc, "Fit Monte Carlo means instead of the expectation");
  fit->add_option("--lo", f_lo, "Domain lower bound");
  fit->add_option("--hi", f_hi, "Domain upper bound");

  auto* closedform = app.add_subcommand("closedform", "Appendix closed-form coefficients");
  std::string c_params;
  closedform->add_option("--params", c_params, "JSON parameters")->check(CLI::ExistingFile);

  auto* energy_cmd = app.add_subcommand("energy", "Energy-efficiency table");
  std::string e_scenario = "all", e_params, e_mode = "head", e_json;
  double e_baseline = 170.0;
  energy_cmd->add_option("--scenario", e_scenario)
      ->check(CLI::IsMember({"all", "conservative", "medium", "aggressive", "custom"}));
  energy_cmd->add_option("--params", e_params, "JSON overrides for --scenario custom")->check(CLI::ExistingFile);
  energy_cmd->add_option("--mode", e_mode)->check(CLI::IsMember({"head", "full"}));
  energy_cmd->add_option("--baseline", e_baseline, "GPU images/s/W")->check(CLI::PositiveNumber);
  energy_cmd->add_option("--json", e_json, "Write JSON to this file ('-' for stdout)");

  auto* validate = app.add_subcommand("validate", "Run acceptance checks A1-A10");
  std::size_t v_epochs = 10000;
  std::uint64_t v_seed = 42;
  validate->add_option("--epochs", v_epochs)->check(CLI::PositiveNumber);
  validate->add_option("--seed", v_seed);

  auto* plot = app.add_subcommand("plot", "SVG dot plot from a results directory");
  fs::path p_in;
  std::string p_out, p_title;
  plot->add_option("--in", p_in, "Results directory")->required()->check(CLI::ExistingDirectory);
  plot->add_option("--out", p_out, "SVG path (default <in>/window.svg)");
  plot->add_option("--title", p_title);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*window) return cmd_window(w_config, w_out, w_seed, w_epochs);
    if (*statedist) return cmd_statedist(s_probs, s_config, s_dt);
    if (*fit) return cmd_fit(f_in, f_side, f_model, f_mc, f_lo, f_hi);
    if (*closedform) return cmd_closedform(c_params);
    if (*energy_cmd) return cmd_energy(e_scenario, e_params, e_mode, e_baseline, e_json);
    if (*validate) return cmd_validate(v_epochs, v_seed);
    if (*plot) return cmd_plot(p_in, p_out, p_title);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
