#pragma once

// Lumped-capacitance thermal network: a handful of isothermal nodes joined by
// conductive links, each radiating to deep space and optionally absorbing
// sunlight. Temperatures are kelvin throughout this header.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gpuheat::thermal {

inline constexpr double kStefanBoltzmann = 5.670374419e-8;  // W m^-2 K^-4
inline constexpr double kZeroCelsius = 273.15;

inline constexpr double to_kelvin(double celsius) { return celsius + kZeroCelsius; }
inline constexpr double to_celsius(double kelvin) { return kelvin - kZeroCelsius; }

enum class Phase { Sunlit, Eclipse };

std::string_view to_string(Phase phase);

struct OrbitProfile {
  double period_s = 5400.0;
  double eclipse_fraction = 0.35;
  double phase_offset_s = 0.0;

  /// Throws ConfigError when the period or fraction is out of range.
  void validate() const;
};

/// Eclipse occupies the half-open window [0, eclipse_fraction * period) of
/// each orbit, measured from the (offset) start of the orbit.
Phase orbital_phase(const OrbitProfile& orbit, double t_s);

struct ThermalNode {
  std::string id;
  double heat_capacity_j_per_k = 1.0;
  double temperature_k = 293.15;  // initial temperature
  double emissive_area_m2 = 0.0;
  double emissivity = 0.0;
  double absorptive_area_m2 = 0.0;
  double absorptivity = 0.0;
  double internal_load_w = 0.0;

  bool sun_exposed() const { return absorptive_area_m2 > 0.0 && absorptivity > 0.0; }
};

struct ThermalLink {
  std::string node_a;
  std::string node_b;
  double conductance_w_per_k = 0.0;
};

struct ThermalEnvironment {
  double solar_flux_w_per_m2 = 1361.0;
  double sink_temperature_k = 2.7;
};

/// Nodes and links with ids resolved to indices. Immutable after construction.
class ThermalNetwork {
 public:
  struct ResolvedLink {
    std::size_t a;
    std::size_t b;
    double conductance_w_per_k;
  };

  /// Throws ConfigError on duplicate ids, dangling link ends, self links or
  /// out-of-range node parameters.
  ThermalNetwork(std::vector<ThermalNode> nodes, std::vector<ThermalLink> links);

  std::span<const ThermalNode> nodes() const { return nodes_; }
  std::span<const ResolvedLink> links() const { return links_; }
  std::size_t size() const { return nodes_.size(); }

  /// Throws ModelError for an unknown id.
  std::size_t index_of(std::string_view id) const;
  bool contains(std::string_view id) const;

 private:
  std::vector<ThermalNode> nodes_;
  std::vector<ResolvedLink> links_;
};

/// Temperatures are aligned with ThermalNetwork::nodes().
struct ThermalState {
  double time_s = 0.0;
  std::vector<double> temperatures_k;

  bool operator==(const ThermalState&) const = default;
};

ThermalState initial_state(const ThermalNetwork& network);

/// Individual contributions to a node's heat balance, in watts.
struct HeatFlowTerms {
  double applied_w = 0.0;
  double internal_w = 0.0;
  double solar_w = 0.0;
  double conduction_in_w = 0.0;  // sum over links of G (T_other - T_node)
  double conduction_gross_w = 0.0;  // sum over links of |G (T_other - T_node)|
  double radiation_w = 0.0;      // emitted to sink, >= 0 when node is warmer

  double net() const {
    return applied_w + internal_w + solar_w + conduction_in_w - radiation_w;
  }
  /// Sum of magnitudes of every individual flow; the scale against which
  /// rounding in net() is measured.
  double gross() const;
};

HeatFlowTerms heat_flow_terms(const ThermalNetwork& network, std::size_t node,
                              const ThermalState& state, const ThermalEnvironment& env,
                              Phase phase, double applied_power_w);

double net_heat_flow(const ThermalNetwork& network, std::size_t node,
                     const ThermalState& state, const ThermalEnvironment& env,
                     Phase phase, double applied_power_w);

/// Throws ModelError when `node_id` is not in the network.
double net_heat_flow(const ThermalNetwork& network, std::string_view node_id,
                     const ThermalState& state, const ThermalEnvironment& env,
                     Phase phase, double applied_power_w);

/// Largest stable explicit-Euler step for the given state:
/// min over nodes of C / (sum of incident G + 4 eps sigma A T^3).
double stability_limit_dt(const ThermalNetwork& network, const ThermalState& state);

struct StepResult {
  ThermalState next;
  std::vector<double> net_w;    // Q per node used for the update
  std::vector<double> gross_w;  // HeatFlowTerms::gross per node
  bool stable = true;           // dt below stability_limit_dt
};

/// One explicit-Euler step T' = T + Q dt / C with all Q evaluated at `state`.
/// `applied_power_w` is indexed like the network nodes. Throws NumericalError
/// if any temperature would become non-positive.
StepResult step_thermal(const ThermalNetwork& network, const ThermalState& state,
                        const ThermalEnvironment& env, Phase phase,
                        std::span<const double> applied_power_w, double dt_s);

/// Steady temperature of an isolated radiating node absorbing `p_in_w`:
/// (P / (eps sigma A) + T_sink^4)^(1/4). Throws DomainError for a node that
/// cannot radiate.
double equilibrium_temperature(double p_in_w, const ThermalNode& node,
                               const ThermalEnvironment& env);

}  // namespace gpuheat::thermal
