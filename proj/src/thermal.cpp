#include "gpuheat/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "gpuheat/errors.hpp"

namespace gpuheat::thermal {

std::string_view to_string(Phase phase) {
  return phase == Phase::Eclipse ? "eclipse" : "sunlit";
}

void OrbitProfile::validate() const {
  if (!(period_s > 0.0) || !std::isfinite(period_s)) {
    throw ConfigError("orbit period_s must be positive");
  }
  if (!(eclipse_fraction > 0.0 && eclipse_fraction < 1.0)) {
    throw ConfigError("orbit eclipse_fraction must lie in (0, 1)");
  }
  if (!std::isfinite(phase_offset_s)) {
    throw ConfigError("orbit phase_offset_s must be finite");
  }
}

Phase orbital_phase(const OrbitProfile& orbit, double t_s) {
  orbit.validate();
  if (!(t_s >= 0.0)) throw DomainError("orbital_phase: time must be >= 0");
  double within = std::fmod(t_s + orbit.phase_offset_s, orbit.period_s);
  if (within < 0.0) within += orbit.period_s;
  return within / orbit.period_s < orbit.eclipse_fraction ? Phase::Eclipse : Phase::Sunlit;
}

ThermalNetwork::ThermalNetwork(std::vector<ThermalNode> nodes, std::vector<ThermalLink> links)
    : nodes_(std::move(nodes)) {
  std::unordered_set<std::string> seen;
  for (const auto& n : nodes_) {
    if (!seen.insert(n.id).second) throw ConfigError("duplicate thermal node id '" + n.id + "'");
    if (!(n.heat_capacity_j_per_k > 0.0)) {
      throw ConfigError("node '" + n.id + "': heat_capacity_j_per_k must be > 0");
    }
    if (!(n.temperature_k > 0.0)) throw ConfigError("node '" + n.id + "': temperature must be > 0 K");
    if (n.emissive_area_m2 < 0.0 || n.absorptive_area_m2 < 0.0) {
      throw ConfigError("node '" + n.id + "': areas must be >= 0");
    }
    if (n.emissivity < 0.0 || n.emissivity > 1.0 || n.absorptivity < 0.0 || n.absorptivity > 1.0) {
      throw ConfigError("node '" + n.id + "': emissivity/absorptivity must lie in [0, 1]");
    }
    if (n.internal_load_w < 0.0) throw ConfigError("node '" + n.id + "': internal_load_w must be >= 0");
  }
  links_.reserve(links.size());
  for (const auto& l : links) {
    if (l.node_a == l.node_b) throw ConfigError("link joins node '" + l.node_a + "' to itself");
    if (!(l.conductance_w_per_k >= 0.0)) throw ConfigError("link conductance must be >= 0");
    if (!contains(l.node_a) || !contains(l.node_b)) {
      throw ConfigError("link " + l.node_a + " -> " + l.node_b + " references an unknown node");
    }
    links_.push_back({index_of(l.node_a), index_of(l.node_b), l.conductance_w_per_k});
  }
}

std::size_t ThermalNetwork::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return i;
  }
  throw ModelError("unknown thermal node '" + std::string(id) + "'");
}

bool ThermalNetwork::contains(std::string_view id) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const auto& n) { return n.id == id; });
}

ThermalState initial_state(const ThermalNetwork& network) {
  ThermalState s;
  s.temperatures_k.reserve(network.size());
  for (const auto& n : network.nodes()) s.temperatures_k.push_back(n.temperature_k);
  return s;
}

double HeatFlowTerms::gross() const {
  return std::abs(applied_w) + std::abs(internal_w) + std::abs(solar_w) + conduction_gross_w +
         std::abs(radiation_w);
}

HeatFlowTerms heat_flow_terms(const ThermalNetwork& network, std::size_t node,
                              const ThermalState& state, const ThermalEnvironment& env,
                              Phase phase, double applied_power_w) {
  if (node >= network.size() || state.temperatures_k.size() != network.size()) {
    throw ModelError("heat_flow_terms: node not present in state");
  }
  const ThermalNode& n = network.nodes()[node];
  const double t = state.temperatures_k[node];

  HeatFlowTerms terms;
  terms.applied_w = applied_power_w;
  terms.internal_w = n.internal_load_w;
  if (phase == Phase::Sunlit && n.sun_exposed()) {
    terms.solar_w = n.absorptivity * n.absorptive_area_m2 * env.solar_flux_w_per_m2;
  }
  for (const auto& link : network.links()) {
    std::size_t other;
    if (link.a == node) {
      other = link.b;
    } else if (link.b == node) {
      other = link.a;
    } else {
      continue;
    }
    const double flow = link.conductance_w_per_k * (state.temperatures_k[other] - t);
    terms.conduction_in_w += flow;
    terms.conduction_gross_w += std::abs(flow);
  }
  const double sink = env.sink_temperature_k;
  terms.radiation_w = n.emissivity * kStefanBoltzmann * n.emissive_area_m2 *
                      (t * t * t * t - sink * sink * sink * sink);
  return terms;
}

double net_heat_flow(const ThermalNetwork& network, std::size_t node, const ThermalState& state,
                     const ThermalEnvironment& env, Phase phase, double applied_power_w) {
  return heat_flow_terms(network, node, state, env, phase, applied_power_w).net();
}

double net_heat_flow(const ThermalNetwork& network, std::string_view node_id,
                     const ThermalState& state, const ThermalEnvironment& env, Phase phase,
                     double applied_power_w) {
  return net_heat_flow(network, network.index_of(node_id), state, env, phase, applied_power_w);
}

double stability_limit_dt(const ThermalNetwork& network, const ThermalState& state) {
  std::vector<double> conductance(network.size(), 0.0);
  for (const auto& link : network.links()) {
    conductance[link.a] += link.conductance_w_per_k;
    conductance[link.b] += link.conductance_w_per_k;
  }
  double limit = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < network.size(); ++i) {
    const auto& n = network.nodes()[i];
    const double t = state.temperatures_k[i];
    const double rad = 4.0 * n.emissivity * kStefanBoltzmann * n.emissive_area_m2 * t * t * t;
    const double k = conductance[i] + rad;
    if (k > 0.0) limit = std::min(limit, n.heat_capacity_j_per_k / k);
  }
  return limit;
}

StepResult step_thermal(const ThermalNetwork& network, const ThermalState& state,
                        const ThermalEnvironment& env, Phase phase,
                        std::span<const double> applied_power_w, double dt_s) {
  if (!(dt_s > 0.0)) throw DomainError("step_thermal: dt must be > 0");
  if (applied_power_w.size() != network.size() ||
      state.temperatures_k.size() != network.size()) {
    throw ModelError("step_thermal: state/power vectors do not match the network");
  }

  StepResult out;
  out.stable = dt_s < stability_limit_dt(network, state);
  out.net_w.resize(network.size());
  out.gross_w.resize(network.size());
  out.next.time_s = state.time_s + dt_s;
  out.next.temperatures_k.resize(network.size());

  for (std::size_t i = 0; i < network.size(); ++i) {
    const HeatFlowTerms terms =
        heat_flow_terms(network, i, state, env, phase, applied_power_w[i]);
    const double q = terms.net();
    out.net_w[i] = q;
    out.gross_w[i] = terms.gross();
    const double next = state.temperatures_k[i] + q * dt_s / network.nodes()[i].heat_capacity_j_per_k;
    if (!(next > 0.0) || !std::isfinite(next)) {
      std::ostringstream msg;
      msg << "non-positive temperature on node '" << network.nodes()[i].id << "' at t="
          << state.time_s << " s (T=" << state.temperatures_k[i] << " K, Q=" << q
          << " W, dt=" << dt_s << " s)";
      throw NumericalError(msg.str(), state.time_s);
    }
    out.next.temperatures_k[i] = next;
  }
  return out;
}

double equilibrium_temperature(double p_in_w, const ThermalNode& node,
                               const ThermalEnvironment& env) {
  const double coupling = node.emissivity * kStefanBoltzmann * node.emissive_area_m2;
  if (!(coupling > 0.0)) throw DomainError("equilibrium_temperature: node has no radiating area");
  const double sink = env.sink_temperature_k;
  const double t4 = p_in_w / coupling + sink * sink * sink * sink;
  if (t4 < 0.0) throw DomainError("equilibrium_temperature: net input below sink radiation");
  return std::pow(t4, 0.25);
}

}  // namespace gpuheat::thermal
