#pragma once

#include <string>
#include <string_view>

#include "gpuheat/gpu_model.hpp"
#include "gpuheat/thermal.hpp"
#include "gpuheat/workload.hpp"

namespace gpuheat::sched {

enum class PolicyId { Thermostat, AlwaysRun, NeverRun };

std::string_view to_string(PolicyId id);
/// Accepts "thermostat", "always_run", "never_run". Throws ConfigError otherwise.
PolicyId parse_policy(std::string_view text);

struct ThermostatConfig {
  double band_low_c = 0.0;
  double band_high_c = 30.0;
  std::string control_node = "body";
  double exec_preference_threshold_c = 15.0;

  /// Throws ConfigError unless low < high and the threshold lies in the band.
  void validate() const;
};

enum class DecisionKind { RunFragment, ContinueRunning, Preempt, Idle };

std::string_view to_string(DecisionKind kind);

/// Machine-readable reasons; these strings appear verbatim in traces.
namespace reason {
inline constexpr std::string_view kSunlit = "sunlit";
inline constexpr std::string_view kHeatUp = "heat-up";
inline constexpr std::string_view kHold = "hold";
inline constexpr std::string_view kCoast = "coast";
inline constexpr std::string_view kOverTemp = "over-temp";
inline constexpr std::string_view kNoWork = "no-work";
inline constexpr std::string_view kAlwaysRun = "always-run";
inline constexpr std::string_view kNeverRun = "never-run";
inline constexpr std::string_view kCheckpoint = "checkpoint";
}  // namespace reason

struct Decision {
  DecisionKind kind = DecisionKind::Idle;
  workload::FragmentRef target{};  // meaningful for RunFragment / ContinueRunning / Preempt
  std::string_view reason = reason::kNoWork;

  bool operator==(const Decision&) const = default;
};

/// What the scheduler may look at on a tick.
struct SchedulerInputs {
  thermal::Phase phase = thermal::Phase::Eclipse;
  double control_temp_c = 0.0;
  double gpu_temp_k = 293.15;
  /// Net heat flow into the control node with the GPU contributing nothing.
  /// In steady state all GPU power ends up in the control node, so running
  /// a fragment cools the node iff this plus the fragment's power is < 0.
  double control_heat_flow_without_gpu_w = 0.0;
  bool allow_sunlit_compute = false;
};

/// Heat the GPU would emit running `fragment` at the current GPU temperature.
double predicted_heat_w(const gpu::GpuModel& gpu, const workload::Fragment& fragment,
                        double gpu_temp_k);

/// Temperature-band policy: hot fragments when cold, cool fragments when warm,
/// idle in sunlight. Ties in predicted heat are broken by job priority, then
/// job id, then fragment index, so the decision is unique.
Decision thermostat_decide(const ThermostatConfig& cfg, const SchedulerInputs& in,
                           const workload::JobQueue& jobs, const gpu::GpuModel& gpu);

/// Unmanaged GPU: run whatever is next, idle only in sunlight or when the
/// queue is empty.
Decision baseline_always_run(const SchedulerInputs& in, const workload::JobQueue& jobs);

/// Conventional heater: the GPU never computes.
Decision baseline_never_run(const SchedulerInputs& in, const workload::JobQueue& jobs);

Decision decide(PolicyId policy, const ThermostatConfig& cfg, const SchedulerInputs& in,
                const workload::JobQueue& jobs, const gpu::GpuModel& gpu);

}  // namespace gpuheat::sched
