#include "gpuheat/scheduler.hpp"

#include <optional>
#include <string>

#include "gpuheat/errors.hpp"

namespace gpuheat::sched {

using workload::DependencyMode;
using workload::FragmentRef;
using workload::FragmentStatus;
using workload::JobQueue;

std::string_view to_string(PolicyId id) {
  switch (id) {
    case PolicyId::Thermostat:
      return "thermostat";
    case PolicyId::AlwaysRun:
      return "always_run";
    case PolicyId::NeverRun:
      return "never_run";
  }
  return "unknown";
}

PolicyId parse_policy(std::string_view text) {
  if (text == "thermostat") return PolicyId::Thermostat;
  if (text == "always_run") return PolicyId::AlwaysRun;
  if (text == "never_run") return PolicyId::NeverRun;
  throw ConfigError("unknown policy \"" + std::string(text) +
                    "\" (expected thermostat, always_run or never_run)");
}

void ThermostatConfig::validate() const {
  if (!(band_low_c < band_high_c)) throw ConfigError("policy.band_low_c must be < policy.band_high_c");
  if (!(exec_preference_threshold_c >= band_low_c && exec_preference_threshold_c <= band_high_c)) {
    throw ConfigError("policy.exec_preference_threshold_c must lie within the band");
  }
  if (control_node.empty()) throw ConfigError("policy.control_node must name a node");
}

std::string_view to_string(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::RunFragment:
      return "run";
    case DecisionKind::ContinueRunning:
      return "continue";
    case DecisionKind::Preempt:
      return "preempt";
    case DecisionKind::Idle:
      return "idle";
  }
  return "unknown";
}

double predicted_heat_w(const gpu::GpuModel& gpu, const workload::Fragment& fragment,
                        double gpu_temp_k) {
  return gpu::gpu_power(gpu, fragment.heat_class, gpu_temp_k);
}

namespace {

struct Candidate {
  FragmentRef ref;
  double heat_w;
  int priority;
  const std::string* job_id;
};

bool tie_break(const Candidate& a, const Candidate& b) {
  if (a.priority != b.priority) return a.priority < b.priority;
  if (*a.job_id != *b.job_id) return *a.job_id < *b.job_id;
  return a.ref.index < b.ref.index;
}

enum class Want { Hottest, Coolest };

// Best Pending, assignable fragment under the requested ordering.
std::optional<Candidate> best_candidate(const JobQueue& jobs, const gpu::GpuModel& gpu,
                                        double gpu_temp_k, Want want) {
  std::optional<Candidate> best;
  auto consider = [&](std::size_t j, std::size_t idx) {
    const auto& job = jobs.job(j);
    const auto& frag = job.fragments[idx];
    Candidate c{{j, idx}, predicted_heat_w(gpu, frag, gpu_temp_k), job.priority, &job.id};
    if (!best) {
      best = c;
      return;
    }
    const bool hotter = c.heat_w > best->heat_w;
    const bool cooler = c.heat_w < best->heat_w;
    if ((want == Want::Hottest && hotter) || (want == Want::Coolest && cooler) ||
        (c.heat_w == best->heat_w && tie_break(c, *best))) {
      best = c;
    }
  };

  for (std::size_t j = 0; j < jobs.jobs().size(); ++j) {
    const auto& job = jobs.job(j);
    if (job.mode == DependencyMode::InOrder) {
      for (const auto& f : job.fragments) {
        if (f.status == FragmentStatus::Completed) continue;
        if (f.status == FragmentStatus::Pending) consider(j, f.index);
        break;
      }
    } else {
      for (const auto& f : job.fragments) {
        if (f.status == FragmentStatus::Pending) consider(j, f.index);
      }
    }
  }
  return best;
}

Decision run(FragmentRef ref, std::string_view why) {
  return {DecisionKind::RunFragment, ref, why};
}
Decision keep(FragmentRef ref, std::string_view why) {
  return {DecisionKind::ContinueRunning, ref, why};
}
Decision preempt(FragmentRef ref, std::string_view why) {
  return {DecisionKind::Preempt, ref, why};
}
Decision idle(std::string_view why) { return {DecisionKind::Idle, {}, why}; }

std::optional<Decision> sunlit_gate(const SchedulerInputs& in, const JobQueue& jobs) {
  if (in.phase != thermal::Phase::Sunlit || in.allow_sunlit_compute) return std::nullopt;
  if (auto r = jobs.running()) return preempt(*r, reason::kSunlit);
  return idle(reason::kSunlit);
}

}  // namespace

Decision thermostat_decide(const ThermostatConfig& cfg, const SchedulerInputs& in,
                           const JobQueue& jobs, const gpu::GpuModel& gpu) {
  if (auto gated = sunlit_gate(in, jobs)) return *gated;

  const auto running = jobs.running();
  const double t = in.control_temp_c;

  if (t < cfg.band_low_c) {
    const auto hottest = best_candidate(jobs, gpu, in.gpu_temp_k, Want::Hottest);
    if (running) {
      const double current = predicted_heat_w(gpu, jobs.fragment(*running), in.gpu_temp_k);
      if (hottest && hottest->heat_w > current) return preempt(*running, reason::kHeatUp);
      return keep(*running, reason::kHeatUp);
    }
    return hottest ? run(hottest->ref, reason::kHeatUp) : idle(reason::kNoWork);
  }

  if (t <= cfg.band_high_c) {
    if (running) return keep(*running, reason::kHold);
    const Want want = t < cfg.exec_preference_threshold_c ? Want::Hottest : Want::Coolest;
    const auto pick = best_candidate(jobs, gpu, in.gpu_temp_k, want);
    return pick ? run(pick->ref, reason::kHold) : idle(reason::kNoWork);
  }

  // Above the band: only work that still lets the control node cool may run.
  auto cools = [&](double heat_w) { return in.control_heat_flow_without_gpu_w + heat_w < 0.0; };
  if (running) {
    const double current = predicted_heat_w(gpu, jobs.fragment(*running), in.gpu_temp_k);
    return cools(current) ? keep(*running, reason::kCoast) : preempt(*running, reason::kOverTemp);
  }
  const auto coolest = best_candidate(jobs, gpu, in.gpu_temp_k, Want::Coolest);
  if (!coolest) return idle(reason::kNoWork);
  return cools(coolest->heat_w) ? run(coolest->ref, reason::kCoast) : idle(reason::kOverTemp);
}

Decision baseline_always_run(const SchedulerInputs& in, const JobQueue& jobs) {
  if (auto gated = sunlit_gate(in, jobs)) return *gated;
  if (auto r = jobs.running()) return keep(*r, reason::kAlwaysRun);
  for (std::size_t j = 0; j < jobs.jobs().size(); ++j) {
    const auto& job = jobs.job(j);
    for (const auto& f : job.fragments) {
      if (f.status == FragmentStatus::Pending) return run({j, f.index}, reason::kAlwaysRun);
      if (job.mode == DependencyMode::InOrder && f.status != FragmentStatus::Completed) break;
    }
  }
  return idle(reason::kNoWork);
}

Decision baseline_never_run(const SchedulerInputs& in, const JobQueue& jobs) {
  if (auto gated = sunlit_gate(in, jobs)) return *gated;
  if (auto r = jobs.running()) return preempt(*r, reason::kNeverRun);
  return idle(reason::kNeverRun);
}

Decision decide(PolicyId policy, const ThermostatConfig& cfg, const SchedulerInputs& in,
                const JobQueue& jobs, const gpu::GpuModel& gpu) {
  switch (policy) {
    case PolicyId::Thermostat:
      return thermostat_decide(cfg, in, jobs, gpu);
    case PolicyId::AlwaysRun:
      return baseline_always_run(in, jobs);
    case PolicyId::NeverRun:
      return baseline_never_run(in, jobs);
  }
  throw ConfigError("unknown policy");
}

}  // namespace gpuheat::sched
