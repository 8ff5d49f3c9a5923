#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpuheat/errors.hpp"
#include "gpuheat/gpu_model.hpp"
#include "gpuheat/scheduler.hpp"
#include "gpuheat/thermal.hpp"
#include "gpuheat/workload.hpp"

namespace gpuheat::sim {

/// Node ids every scenario must define; the trace reports both.
inline constexpr std::string_view kGpuNode = "gpu";
inline constexpr std::string_view kBodyNode = "body";

/// A record counts as a band violation when the control node is more than
/// this far outside [band_low_c, band_high_c].
inline constexpr double kBandToleranceC = 2.0;

struct PolicyConfig {
  sched::PolicyId id = sched::PolicyId::Thermostat;
  sched::ThermostatConfig thermostat;
  bool allow_sunlit_compute = false;
};

struct Scenario {
  thermal::OrbitProfile orbit;
  std::vector<thermal::ThermalNode> nodes;
  std::vector<thermal::ThermalLink> links;
  thermal::ThermalEnvironment environment;
  gpu::GpuModel gpu;
  std::vector<workload::JobSpec> jobs;
  PolicyConfig policy;
  double dt_s = 1.0;
  double duration_s = 54000.0;
  double heater_rated_w = 200.0;
  double checkpoint_overhead_s = 0.5;
  std::uint64_t seed = 0;  // reserved; runs are deterministic without it
};

/// Every problem with the scenario, with dotted field paths such as
/// "orbit.eclipse_fraction" or "jobs[2].fragment_duration_s".
std::vector<FieldError> validation_errors(const Scenario& scenario);

/// Throws ValidationError listing every offending field.
void validate(const Scenario& scenario);

struct TraceRecord {
  double time_s = 0.0;
  thermal::Phase phase = thermal::Phase::Eclipse;
  double temp_gpu_c = 0.0;
  double temp_body_c = 0.0;
  double gpu_power_w = 0.0;
  double heater_power_w = 0.0;
  sched::DecisionKind decision = sched::DecisionKind::Idle;
  std::string_view reason;
  std::string job_id;                        // empty when no fragment is involved
  std::optional<std::size_t> fragment_index;
  double fragment_elapsed_s = 0.0;
  double cumulative_flops = 0.0;
  double cumulative_lost_s = 0.0;
  bool band_violation = false;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void write(const TraceRecord& record) = 0;
};

class VectorTraceSink final : public TraceSink {
 public:
  void write(const TraceRecord& record) override { records.push_back(record); }
  std::vector<TraceRecord> records;
};

/// Hooks for tests and tooling that need to see inside a run.
class SimulationObserver {
 public:
  virtual ~SimulationObserver() = default;
  /// Called before the decision is applied; `jobs` is the pre-decision state.
  virtual void on_decision(double /*time_s*/, const sched::SchedulerInputs& /*inputs*/,
                           const workload::JobQueue& /*jobs*/, const sched::Decision& /*decision*/) {}
  virtual void on_step(const thermal::ThermalNetwork& /*network*/,
                       const thermal::ThermalState& /*before*/,
                       const thermal::StepResult& /*step*/, double /*dt_s*/) {}
};

struct NodeExtremes {
  std::string id;
  double peak_c = 0.0;
  double min_c = 0.0;
};

struct Summary {
  sched::PolicyId policy = sched::PolicyId::Thermostat;
  std::size_t ticks = 0;
  std::size_t fragments_completed = 0;
  std::size_t jobs_completed = 0;
  double total_flops = 0.0;
  double gpu_energy_j = 0.0;
  double heater_energy_j = 0.0;
  double baseline_heater_energy_j = 0.0;
  double heater_energy_saved_j = 0.0;
  std::size_t preemptions = 0;
  double lost_compute_s = 0.0;
  /// Share of eclipse ticks after the first orbit with a band violation.
  double band_violation_fraction = 0.0;
  std::size_t scored_eclipse_ticks = 0;
  std::vector<NodeExtremes> nodes;
  std::size_t stability_warnings = 0;
  std::optional<double> first_unstable_time_s;

  const NodeExtremes& node(std::string_view id) const;
};

struct RunOptions {
  TraceSink* trace = nullptr;
  SimulationObserver* observer = nullptr;
  /// Also run the never_run baseline to fill baseline_heater_energy_j.
  bool compute_baseline = true;
};

/// Fixed-step run of the scenario. Records stream to `options.trace` as they
/// are produced. Throws ValidationError before stepping and NumericalError
/// if integration breaks down.
Summary run_simulation(const Scenario& scenario, const RunOptions& options = {});

struct PolicyRow {
  Summary summary;
  double heater_energy_saved_j = 0.0;  // vs never_run
  double flops_gained = 0.0;           // vs never_run
};

struct Comparison {
  Summary never_run;
  std::vector<PolicyRow> rows;  // in the order the policies were requested
};

/// Runs every policy on otherwise identical copies of the scenario.
/// Throws ConfigError for an empty policy list.
Comparison compare_policies(const Scenario& scenario, const std::vector<sched::PolicyId>& policies);

}  // namespace gpuheat::sim
