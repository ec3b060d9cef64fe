#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "synstdp/errors.hpp"

namespace synstdp::energy {

/// One column of the SNN energy estimate. Times in seconds, voltages in
/// volts, resistance in ohms, energies in joules.
struct EnergyScenario {
  std::string name = "custom";
  double tau_minus = 500e-9;  // head duration
  double tau_plus = 2500e-9;  // tail duration
  double a_plus = 0.3;
  double a_minus = 0.15;
  double r_on = 1e6;
  double e_neuron = 70e-12;  // per neuron per event (P_neuron * tau)
  double eta_act = 0.8;
  double eta_on = 0.5;
  double synapses = 61e6;
  double neurons = 640e3;
  double devices_per_synapse = 16;

  void validate() const {
    using detail::require;
    require(tau_minus > 0 && tau_plus >= 0, "energy: spike durations must be positive");
    require(a_plus > 0 && a_minus >= 0, "energy: amplitudes must be positive");
    require(r_on > 0, "energy.r_on: must be > 0");
    require(e_neuron >= 0, "energy.e_neuron: must be >= 0");
    require(eta_act > 0 && eta_act <= 1, "energy.eta_act: must be in (0, 1]");
    require(eta_on > 0 && eta_on <= 1, "energy.eta_on: must be in (0, 1]");
    require(synapses >= 0 && neurons >= 0, "energy: network size must be >= 0");
    require(devices_per_synapse >= 1, "energy.devices_per_synapse: must be >= 1");
  }
};

/// AlexNet-sized network (61 M synapses, 640 k neurons), 4-bit compound synapses.
inline EnergyScenario conservative() {
  EnergyScenario s;
  s.name = "conservative";
  return s;
}

inline EnergyScenario medium() {
  EnergyScenario s;
  s.name = "medium";
  s.tau_minus = 50e-9;
  s.tau_plus = 250e-9;
  s.r_on = 10e6;
  s.e_neuron = 700e-15;
  s.eta_act = 0.5;
  return s;
}

inline EnergyScenario aggressive() {
  EnergyScenario s = medium();
  s.name = "aggressive";
  s.tau_minus = 5e-9;
  s.tau_plus = 25e-9;
  s.e_neuron = 35e-15;
  s.eta_act = 0.1;
  return s;
}

inline EnergyScenario scenario(std::string_view name) {
  if (name == "conservative") return conservative();
  if (name == "medium") return medium();
  if (name == "aggressive") return aggressive();
  throw ConfigError("energy: unknown scenario '" + std::string(name) + "'");
}

enum class SpikeEnergyMode { HeadOnly, Full };

/// Energy of one spike across an ON device. HeadOnly keeps the rectangular
/// head term; Full adds the triangular tail, A-^2 tau+ / (3 R_ON).
inline double spike_energy(const EnergyScenario& sc, SpikeEnergyMode mode) {
  const double head = sc.a_plus * sc.a_plus * sc.tau_minus / sc.r_on;
  if (mode == SpikeEnergyMode::HeadOnly) return head;
  return head + sc.a_minus * sc.a_minus * sc.tau_plus / (3.0 * sc.r_on);
}

/// Network energy for one event (one image).
inline double snn_event_energy(const EnergyScenario& sc,
                               SpikeEnergyMode mode = SpikeEnergyMode::HeadOnly) {
  return sc.eta_act * sc.eta_on * sc.synapses * sc.devices_per_synapse * spike_energy(sc, mode) +
         sc.neurons * sc.e_neuron;
}

/// Images per second per watt; +inf for a zero-energy network.
inline double throughput_per_watt(const EnergyScenario& sc,
                                  SpikeEnergyMode mode = SpikeEnergyMode::HeadOnly) {
  const double e = snn_event_energy(sc, mode);
  return e > 0 ? 1.0 / e : std::numeric_limits<double>::infinity();
}

struct Table1Column {
  EnergyScenario scenario;
  double e_spk = 0.0;
  double e_snn = 0.0;
  double throughput = 0.0;
  double ratio = 0.0;
  bool overflow = false;  // throughput not finite
};

inline std::vector<Table1Column> table1(const std::vector<EnergyScenario>& scenarios,
                                        double gpu_baseline = 170.0,
                                        SpikeEnergyMode mode = SpikeEnergyMode::HeadOnly) {
  detail::require(gpu_baseline > 0, "energy.gpu_baseline: must be > 0");
  std::vector<Table1Column> out;
  for (const auto& sc : scenarios) {
    sc.validate();
    Table1Column c;
    c.scenario = sc;
    c.e_spk = spike_energy(sc, mode);
    c.e_snn = snn_event_energy(sc, mode);
    c.throughput = throughput_per_watt(sc, mode);
    c.overflow = !std::isfinite(c.throughput);
    c.ratio = c.throughput / gpu_baseline;
    out.push_back(c);
  }
  return out;
}

/// Engineering notation with an SI prefix, e.g. "45 fJ", "62.4 uJ".
inline std::string si(double v, std::string_view unit) {
  if (!std::isfinite(v)) return "overflow";
  if (v == 0) return "0 " + std::string(unit);
  static constexpr const char* kPrefix[] = {"a", "f", "p", "n", "u", "m", "", "k", "M", "G", "T"};
  int e = static_cast<int>(std::floor(std::log10(std::abs(v)) / 3.0));
  e = std::clamp(e, -6, 4);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g %s%s", v / std::pow(10.0, 3 * e), kPrefix[e + 6],
                std::string(unit).c_str());
  std::string out = buf;
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

/// Aligned text rendering, one column per scenario.
inline std::string render_table1(const std::vector<Table1Column>& cols) {
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  auto add = [&](std::string label, auto fn) {
    std::vector<std::string> cells;
    for (const auto& c : cols) cells.push_back(fn(c));
    rows.emplace_back(std::move(label), std::move(cells));
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };
  add("", [](const Table1Column& c) { return c.scenario.name; });
  add("tau (head)", [](const Table1Column& c) { return si(c.scenario.tau_minus, "s"); });
  add("tau+ (tail)", [](const Table1Column& c) { return si(c.scenario.tau_plus, "s"); });
  add("A+", [](const Table1Column& c) { return si(c.scenario.a_plus, "V"); });
  add("A-", [](const Table1Column& c) { return si(c.scenario.a_minus, "V"); });
  add("R_ON", [](const Table1Column& c) { return si(c.scenario.r_on, "Ohm"); });
  add("E_spk", [](const Table1Column& c) { return si(c.e_spk, "J"); });
  add("E_neuron", [](const Table1Column& c) { return si(c.scenario.e_neuron, "J"); });
  add("eta_act", [&](const Table1Column& c) { return num(c.scenario.eta_act); });
  add("eta_ON", [&](const Table1Column& c) { return num(c.scenario.eta_on); });
  add("E_SNN", [](const Table1Column& c) { return si(c.e_snn, "J"); });
  add("Images/s/W", [](const Table1Column& c) { return si(c.throughput, ""); });
  add("Ratio to GPU", [](const Table1Column& c) {
    return c.overflow ? std::string("overflow") : "x" + si(c.ratio, "");
  });
  std::size_t w0 = 0;
  std::vector<std::size_t> w(cols.size(), 0);
  for (const auto& [label, cells] : rows) {
    w0 = std::max(w0, label.size());
    for (std::size_t j = 0; j < cells.size(); ++j) w[j] = std::max(w[j], cells[j].size());
  }
  std::string out;
  for (const auto& [label, cells] : rows) {
    out += label + std::string(w0 - label.size() + 2, ' ');
    for (std::size_t j = 0; j < cells.size(); ++j)
      out += std::string(w[j] - cells[j].size(), ' ') + cells[j] + "  ";
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

}  // namespace synstdp::energy
