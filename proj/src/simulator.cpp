#include "gpuheat/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

namespace gpuheat::sim {

using sched::DecisionKind;
using sched::PolicyId;
using thermal::Phase;

namespace {

std::string indexed(std::string_view section, std::size_t i, std::string_view field) {
  return std::string(section) + "[" + std::to_string(i) + "]." + std::string(field);
}

class ErrorList {
 public:
  void check(bool ok, std::string path, std::string message) {
    if (!ok) errors.push_back({std::move(path), std::move(message)});
  }
  std::vector<FieldError> errors;
};

bool finite(double x) { return std::isfinite(x); }

void validate_gpu(const gpu::GpuModel& g, ErrorList& e) {
  e.check(g.tdp_w > 0.0 && finite(g.tdp_w), "gpu.tdp_w", "must be > 0");
  e.check(g.idle_power_w >= 0.0 && g.idle_power_w < g.tdp_w, "gpu.idle_power_w",
          "must lie in [0, tdp_w)");
  e.check(g.leak_coeff_k >= 0.0 && finite(g.leak_coeff_k), "gpu.leak_coeff_k", "must be >= 0");
  e.check(g.leak_exp_b > 0.0 && finite(g.leak_exp_b), "gpu.leak_exp_b", "must be > 0");
  e.check(g.mem_power_fraction > 0.0 && g.mem_power_fraction <= 1.0, "gpu.mem_power_fraction",
          "must lie in (0, 1]");
  e.check(g.exec_slope_s_per_c >= 0.0, "gpu.exec_slope_s_per_c", "must be >= 0");
  e.check(g.mem_slope_s_per_c >= 0.0, "gpu.mem_slope_s_per_c", "must be >= 0");
  e.check(g.exec_slope_s_per_c > g.mem_slope_s_per_c, "gpu.exec_slope_s_per_c",
          "must exceed gpu.mem_slope_s_per_c");
  e.check(finite(g.exec_knee_c), "gpu.exec_knee_c", "must be finite");
  e.check(finite(g.mem_ref_temp_c), "gpu.mem_ref_temp_c", "must be finite");
}

void validate_nodes(const Scenario& s, ErrorList& e) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const auto& n = s.nodes[i];
    e.check(!n.id.empty(), indexed("nodes", i, "id"), "must not be empty");
    e.check(ids.insert(n.id).second, indexed("nodes", i, "id"), "duplicate node id '" + n.id + "'");
    e.check(n.heat_capacity_j_per_k > 0.0 && finite(n.heat_capacity_j_per_k),
            indexed("nodes", i, "heat_capacity_j_per_k"), "must be > 0");
    e.check(n.temperature_k > 0.0 && finite(n.temperature_k), indexed("nodes", i, "temperature_c"),
            "must be above absolute zero");
    e.check(n.emissive_area_m2 >= 0.0, indexed("nodes", i, "emissive_area_m2"), "must be >= 0");
    e.check(n.emissivity >= 0.0 && n.emissivity <= 1.0, indexed("nodes", i, "emissivity"),
            "must lie in [0, 1]");
    e.check(n.absorptive_area_m2 >= 0.0, indexed("nodes", i, "absorptive_area_m2"), "must be >= 0");
    e.check(n.absorptivity >= 0.0 && n.absorptivity <= 1.0, indexed("nodes", i, "absorptivity"),
            "must lie in [0, 1]");
    e.check(n.internal_load_w >= 0.0, indexed("nodes", i, "internal_load_w"), "must be >= 0");
  }
  e.check(ids.count(std::string(kGpuNode)) == 1, "nodes", "must define a node with id \"gpu\"");
  e.check(ids.count(std::string(kBodyNode)) == 1, "nodes", "must define a node with id \"body\"");

  for (std::size_t i = 0; i < s.links.size(); ++i) {
    const auto& l = s.links[i];
    e.check(ids.count(l.node_a) == 1, indexed("links", i, "node_a"), "unknown node '" + l.node_a + "'");
    e.check(ids.count(l.node_b) == 1, indexed("links", i, "node_b"), "unknown node '" + l.node_b + "'");
    e.check(l.node_a != l.node_b, indexed("links", i, "node_b"), "must differ from node_a");
    e.check(l.conductance_w_per_k >= 0.0 && finite(l.conductance_w_per_k),
            indexed("links", i, "conductance_w_per_k"), "must be >= 0");
  }

  const auto& cfg = s.policy.thermostat;
  e.check(ids.count(cfg.control_node) == 1, "policy.control_node",
          "unknown node '" + cfg.control_node + "'");
}

void validate_jobs(const Scenario& s, ErrorList& e) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < s.jobs.size(); ++i) {
    const auto& j = s.jobs[i];
    e.check(!j.id.empty(), indexed("jobs", i, "id"), "must not be empty");
    e.check(j.id.find_first_of(",\"\n\r") == std::string::npos, indexed("jobs", i, "id"),
            "must not contain commas, quotes or newlines");
    e.check(ids.insert(j.id).second, indexed("jobs", i, "id"), "duplicate job id '" + j.id + "'");
    e.check(j.total_flops > 0 || j.total_mem_accesses > 0, indexed("jobs", i, "total_flops"),
            "job does no work (total_flops and total_mem_accesses are both zero)");
    e.check(j.fragment_duration_s > 0.0 && finite(j.fragment_duration_s),
            indexed("jobs", i, "fragment_duration_s"), "must be > 0");
    e.check(j.total_duration_s >= j.fragment_duration_s && finite(j.total_duration_s),
            indexed("jobs", i, "total_duration_s"), "must be >= fragment_duration_s");
  }
}

}  // namespace

std::vector<FieldError> validation_errors(const Scenario& s) {
  ErrorList e;
  e.check(s.orbit.period_s > 0.0 && finite(s.orbit.period_s), "orbit.period_s", "must be > 0");
  e.check(s.orbit.eclipse_fraction > 0.0 && s.orbit.eclipse_fraction < 1.0,
          "orbit.eclipse_fraction", "must lie in (0, 1)");
  e.check(finite(s.orbit.phase_offset_s), "orbit.phase_offset_s", "must be finite");

  e.check(s.environment.solar_flux_w_per_m2 >= 0.0 && finite(s.environment.solar_flux_w_per_m2),
          "environment.solar_flux_w_per_m2", "must be >= 0");
  e.check(s.environment.sink_temperature_k >= 0.0 && finite(s.environment.sink_temperature_k),
          "environment.sink_temperature_k", "must be >= 0 K");

  validate_nodes(s, e);
  validate_gpu(s.gpu, e);
  validate_jobs(s, e);

  const auto& cfg = s.policy.thermostat;
  e.check(cfg.band_low_c < cfg.band_high_c, "policy.band_low_c", "must be < policy.band_high_c");
  e.check(cfg.exec_preference_threshold_c >= cfg.band_low_c &&
              cfg.exec_preference_threshold_c <= cfg.band_high_c,
          "policy.exec_preference_threshold_c", "must lie within [band_low_c, band_high_c]");

  e.check(s.dt_s > 0.0 && finite(s.dt_s), "run.dt_s", "must be > 0");
  e.check(s.duration_s >= s.dt_s && finite(s.duration_s), "run.duration_s", "must be >= run.dt_s");
  e.check(s.heater_rated_w >= 0.0 && finite(s.heater_rated_w), "run.heater_rated_w", "must be >= 0");
  e.check(s.checkpoint_overhead_s >= 0.0 && finite(s.checkpoint_overhead_s),
          "run.checkpoint_overhead_s", "must be >= 0");
  return std::move(e.errors);
}

void validate(const Scenario& scenario) {
  auto errors = validation_errors(scenario);
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

const NodeExtremes& Summary::node(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return n;
  }
  throw ModelError("summary has no node '" + std::string(id) + "'");
}

namespace {

// Heat flow into the control node ignoring the GPU and its links; see
// SchedulerInputs::control_heat_flow_without_gpu_w.
double heat_flow_without_gpu(const thermal::ThermalNetwork& net, std::size_t control,
                             std::size_t gpu_node, const thermal::ThermalState& state,
                             const thermal::ThermalEnvironment& env, Phase phase) {
  auto terms = thermal::heat_flow_terms(net, control, state, env, phase, 0.0);
  if (control == gpu_node) return terms.net();
  for (const auto& link : net.links()) {
    const bool touches = (link.a == control && link.b == gpu_node) ||
                         (link.b == control && link.a == gpu_node);
    if (touches) {
      terms.conduction_in_w -=
          link.conductance_w_per_k * (state.temperatures_k[gpu_node] - state.temperatures_k[control]);
    }
  }
  return terms.net();
}

bool heater_active(PolicyId policy, Phase phase, const sched::Decision& d) {
  if (phase != Phase::Eclipse) return false;
  return policy == PolicyId::NeverRun || d.reason == sched::reason::kNoWork;
}

}  // namespace

Summary run_simulation(const Scenario& s, const RunOptions& options) {
  validate(s);

  const thermal::ThermalNetwork network(s.nodes, s.links);
  const std::size_t gpu_i = network.index_of(kGpuNode);
  const std::size_t body_i = network.index_of(kBodyNode);
  const std::size_t ctrl_i = network.index_of(s.policy.thermostat.control_node);
  const double ctrl_capacity = network.nodes()[ctrl_i].heat_capacity_j_per_k;
  const auto& band = s.policy.thermostat;
  const double band_low_k = thermal::to_kelvin(band.band_low_c);

  std::vector<workload::Job> jobs;
  jobs.reserve(s.jobs.size());
  for (const auto& spec : s.jobs) jobs.push_back(workload::fragment_job(spec));
  workload::JobQueue queue(std::move(jobs), s.checkpoint_overhead_s);

  Summary summary;
  summary.policy = s.policy.id;
  for (const auto& n : network.nodes()) {
    summary.nodes.push_back({n.id, thermal::to_celsius(n.temperature_k),
                             thermal::to_celsius(n.temperature_k)});
  }
  auto track_extremes = [&](const thermal::ThermalState& st) {
    for (std::size_t i = 0; i < network.size(); ++i) {
      const double c = thermal::to_celsius(st.temperatures_k[i]);
      summary.nodes[i].peak_c = std::max(summary.nodes[i].peak_c, c);
      summary.nodes[i].min_c = std::min(summary.nodes[i].min_c, c);
    }
  };

  thermal::ThermalState state = thermal::initial_state(network);
  std::vector<double> applied(network.size(), 0.0);
  double checkpoint_remaining_s = 0.0;
  double cumulative_flops = 0.0;
  std::size_t violations = 0;

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * s.dt_s;
    if (!(t < s.duration_s)) break;
    state.time_s = t;

    const Phase phase = thermal::orbital_phase(s.orbit, t);
    const double gpu_k = state.temperatures_k[gpu_i];
    const double gpu_c = thermal::to_celsius(gpu_k);
    const double ctrl_c = thermal::to_celsius(state.temperatures_k[ctrl_i]);

    sched::SchedulerInputs inputs;
    inputs.phase = phase;
    inputs.control_temp_c = ctrl_c;
    inputs.gpu_temp_k = gpu_k;
    inputs.control_heat_flow_without_gpu_w =
        heat_flow_without_gpu(network, ctrl_i, gpu_i, state, s.environment, phase);
    inputs.allow_sunlit_compute = s.policy.allow_sunlit_compute;

    sched::Decision decision;
    if (checkpoint_remaining_s > 0.0) {
      decision = {DecisionKind::Idle, {}, sched::reason::kCheckpoint};
      checkpoint_remaining_s = std::max(0.0, checkpoint_remaining_s - s.dt_s);
    } else {
      decision = sched::decide(s.policy.id, band, inputs, queue, s.gpu);
    }
    if (options.observer) options.observer->on_decision(t, inputs, queue, decision);

    TraceRecord rec;
    rec.time_s = t;
    rec.phase = phase;
    rec.temp_gpu_c = gpu_c;
    rec.temp_body_c = thermal::to_celsius(state.temperatures_k[body_i]);
    rec.decision = decision.kind;
    rec.reason = decision.reason;

    switch (decision.kind) {
      case DecisionKind::RunFragment:
        queue.begin(decision.target);
        break;
      case DecisionKind::Preempt: {
        if (queue.running() != decision.target) {
          throw SchedulerLogicError("preempt target is not the running fragment");
        }
        summary.lost_compute_s += queue.preempt();
        ++summary.preemptions;
        const auto& f = queue.fragment(decision.target);
        rec.job_id = f.job_id;
        rec.fragment_index = f.index;
        break;
      }
      case DecisionKind::ContinueRunning:
        if (queue.running() != decision.target) {
          throw SchedulerLogicError("continue target is not the running fragment");
        }
        break;
      case DecisionKind::Idle:
        if (queue.running()) throw SchedulerLogicError("idle decision while a fragment is Running");
        break;
    }

    const auto running = queue.running();
    const double gpu_power = running
                                 ? gpu::gpu_power(s.gpu, queue.fragment(*running).heat_class, gpu_k)
                                 : gpu::idle_power(s.gpu, gpu_k);
    std::fill(applied.begin(), applied.end(), 0.0);
    applied[gpu_i] += gpu_power;

    double heater_power = 0.0;
    if (heater_active(s.policy.id, phase, decision)) {
      const double q = thermal::net_heat_flow(network, ctrl_i, state, s.environment, phase,
                                              applied[ctrl_i]);
      const double needed = ctrl_capacity * (band_low_k - state.temperatures_k[ctrl_i]) / s.dt_s - q;
      heater_power = std::clamp(needed, 0.0, s.heater_rated_w);
      applied[ctrl_i] += heater_power;
    }

    const thermal::StepResult step =
        thermal::step_thermal(network, state, s.environment, phase, applied, s.dt_s);
    if (!step.stable) {
      if (!summary.first_unstable_time_s) summary.first_unstable_time_s = t;
      ++summary.stability_warnings;
    }
    if (options.observer) options.observer->on_step(network, state, step, s.dt_s);

    if (running) {
      const auto& frag = queue.fragment(*running);
      const double nominal = frag.nominal_duration_s;
      const double runtime = gpu::runtime_at_temperature(s.gpu, frag.heat_class, nominal, gpu_c);
      const double before = frag.elapsed_s;
      const bool done = queue.advance(s.dt_s * nominal / runtime);
      const double credited = std::min(frag.elapsed_s, nominal) - before;
      cumulative_flops += static_cast<double>(frag.flops) * credited / nominal;
      rec.job_id = frag.job_id;
      rec.fragment_index = frag.index;
      rec.fragment_elapsed_s = std::min(frag.elapsed_s, nominal);
      if (done) {
        checkpoint_remaining_s = queue.complete();
        ++summary.fragments_completed;
      }
    }

    summary.gpu_energy_j += gpu_power * s.dt_s;
    summary.heater_energy_j += heater_power * s.dt_s;

    rec.gpu_power_w = gpu_power;
    rec.heater_power_w = heater_power;
    rec.cumulative_flops = cumulative_flops;
    rec.cumulative_lost_s = summary.lost_compute_s;
    rec.band_violation = ctrl_c < band.band_low_c - kBandToleranceC ||
                         ctrl_c > band.band_high_c + kBandToleranceC;
    if (phase == Phase::Eclipse && t >= s.orbit.period_s) {
      ++summary.scored_eclipse_ticks;
      if (rec.band_violation) ++violations;
    }
    track_extremes(state);
    if (options.trace) options.trace->write(rec);

    state = step.next;
    ++summary.ticks;
  }
  track_extremes(state);

  summary.total_flops = cumulative_flops;
  summary.jobs_completed = queue.completed_jobs();
  summary.band_violation_fraction =
      summary.scored_eclipse_ticks == 0
          ? 0.0
          : static_cast<double>(violations) / static_cast<double>(summary.scored_eclipse_ticks);

  if (s.policy.id == PolicyId::NeverRun) {
    summary.baseline_heater_energy_j = summary.heater_energy_j;
  } else if (options.compute_baseline) {
    Scenario baseline = s;
    baseline.policy.id = PolicyId::NeverRun;
    summary.baseline_heater_energy_j =
        run_simulation(baseline, RunOptions{nullptr, nullptr, false}).heater_energy_j;
  }
  if (s.policy.id == PolicyId::NeverRun || options.compute_baseline) {
    summary.heater_energy_saved_j = summary.baseline_heater_energy_j - summary.heater_energy_j;
  }
  return summary;
}

Comparison compare_policies(const Scenario& scenario, const std::vector<PolicyId>& policies) {
  if (policies.empty()) throw ConfigError("compare_policies: no policies given");
  validate(scenario);

  auto run_policy = [&scenario](PolicyId id) {
    Scenario copy = scenario;
    copy.policy.id = id;
    return run_simulation(copy, RunOptions{nullptr, nullptr, false});
  };

  // Each run is independent; results are collected in request order.
  auto baseline_future = std::async(std::launch::async, run_policy, PolicyId::NeverRun);
  std::vector<std::future<Summary>> futures;
  futures.reserve(policies.size());
  for (PolicyId id : policies) {
    futures.push_back(std::async(std::launch::async, run_policy, id));
  }

  Comparison out;
  out.never_run = baseline_future.get();
  for (auto& f : futures) {
    PolicyRow row;
    row.summary = f.get();
    row.summary.baseline_heater_energy_j = out.never_run.heater_energy_j;
    row.summary.heater_energy_saved_j = out.never_run.heater_energy_j - row.summary.heater_energy_j;
    row.heater_energy_saved_j = row.summary.heater_energy_saved_j;
    row.flops_gained = row.summary.total_flops - out.never_run.total_flops;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace gpuheat::sim
