// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: gpuheat_acceptance <path-to-gpuheat-cli> <data-dir>

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gpuheat/gpu_model.hpp"
#include "gpuheat/hardware_catalog.hpp"
#include "gpuheat/scenario_io.hpp"
#include "gpuheat/simulator.hpp"
#include "gpuheat/thermal.hpp"
#include "gpuheat/workload.hpp"

using namespace gpuheat;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

struct Criterion {
  std::string name;
  double budget_s;  // wall-clock limit; 0 for none
  std::function<Outcome()> body;
};

std::string g_cli;
std::string g_data;

std::string fmt(const char* pattern, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::abs(want);
}

sim::Scenario default_scenario() { return testing::load_default_scenario(g_data); }

// ---------------------------------------------------------------------------

Outcome table1_arithmetic() {
  using namespace catalog;
  Outcome o;
  const auto c = builtin_catalog();
  auto product = [&](std::string_view name) -> const ProductSpec& {
    for (const auto& p : c) {
      if (p.name == name) return p;
    }
    throw std::runtime_error("missing " + std::string(name));
  };
  const std::string arc = format_price_efficiency(price_efficiency(product("ASRock Intel ARC A380 6GB")));
  const std::string omega = format_price_efficiency(price_efficiency(product("Omega Polyimide Heater Kit")));
  const std::string gtx = format_size_efficiency(size_efficiency(product("MSI GTX 980 GAMING 4G")));
  const std::string minco = format_size_efficiency(size_efficiency(product("Minco Polyimide Thermofoil")));
  o.require(arc == "1.47", "ARC A380 $/W = " + arc);
  o.require(omega == "12.58", "Omega $/W = " + omega);
  o.require(gtx == "8.5", "GTX 980 cm3/W = " + gtx);
  o.require(minco == "0.013", "Minco cm3/W = " + minco);
  const auto& g = best_by(c, Metric::Price, ProductKind::Gpu);
  const auto& h = best_by(c, Metric::Price, ProductKind::Heater);
  o.require(g.name == "ASRock Intel ARC A380 6GB", "best gpu by price is " + g.name);
  o.require(h.name == "Omega Polyimide Heater Kit", "best heater by price is " + h.name);
  const double ratio = cost_ratio(g, h);
  // "1/9" is stated to the nearest unit fraction.
  o.require(std::lround(1.0 / ratio) == 9, "cost ratio 1/" + fmt("%.3f", 1.0 / ratio));
  if (o.ok) {
    o.detail = "1.47 $/W, 12.58 $/W, 8.5 cm3/W, 0.013 cm3/W, ratio " + fmt("%.4f", ratio) + " ~ 1/9";
  }
  return o;
}

Outcome classification() {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  using gpu::WorkloadKind;
  Outcome o;
  o.require(gpu::classify_intensity(150).kind == WorkloadKind::ExecutionDominated, "150");
  o.require(gpu::classify_intensity(0.005).kind == WorkloadKind::MemoryDominated, "0.005");
  o.require(gpu::classify_intensity(1.0).kind == WorkloadKind::Mixed, "1.0");
  o.require(gpu::classify_workload(150, 1).kind == WorkloadKind::ExecutionDominated, "150/1");
  o.require(gpu::classify_workload(1, 200).kind == WorkloadKind::MemoryDominated, "1/200");
  o.require(gpu::classify_workload(10, 10).kind == WorkloadKind::Mixed, "10/10");

  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<std::uint64_t> per_iter(0, 5000);
  std::uniform_int_distribution<std::uint64_t> iters(1, 10'000'000);
  std::uniform_int_distribution<int> shape(0, 2);
  int agreed = 0;
  for (int i = 0; i < 1000; ++i) {
    gpu::KernelSpec k{"k", per_iter(rng), per_iter(rng), per_iter(rng) % 3, iters(rng)};
    // Two thirds of the specs sit within one count of a threshold.
    const int s = shape(rng);
    const std::uint64_t nudge = static_cast<std::uint64_t>(i % 3);  // -1, 0, +1 after the shift
    if (s == 0) k.flops_per_iteration = 100 * (k.mem_accesses_per_iteration + 1) + nudge - 1;
    if (s == 1) k.mem_accesses_per_iteration = 100 * (k.flops_per_iteration + 1) + nudge - 1;
    if (k.flops_per_iteration == 0 && k.mem_accesses_per_iteration == 0) k.invariant_mem_accesses = 1;
    const auto counts = gpu::kernel_to_counts(k);
    // Brute-force oracle: exact rational intensity from the spec fields.
    const cpp_int f = cpp_int(k.flops_per_iteration) * k.iterations;
    const cpp_int a = cpp_int(k.mem_accesses_per_iteration) * k.iterations + k.invariant_mem_accesses;
    WorkloadKind want = WorkloadKind::Mixed;
    if (a == 0 || cpp_rational(f, a) > 100) {
      want = WorkloadKind::ExecutionDominated;
    } else if (cpp_rational(f, a) < cpp_rational(1, 100)) {
      want = WorkloadKind::MemoryDominated;
    }
    const bool same = gpu::classify_workload(counts.flops, counts.mem_accesses).kind == want;
    o.require(same, "random kernel " + std::to_string(i) + " disagrees with oracle");
    agreed += same;
  }
  if (o.ok) o.detail = "3 thresholds exact, " + std::to_string(agreed) + "/1000 random kernels agree";
  return o;
}

Outcome runtime_degradation() {
  Outcome o;
  const gpu::GpuModel m = gpu::default_gpu_model();
  const auto exec = gpu::WorkloadClass::execution(1e3);
  const auto mem = gpu::WorkloadClass::memory(1e-3);
  const double r60 = gpu::runtime_at_temperature(m, exec, 1.0, 60.0);
  const double r80 = gpu::runtime_at_temperature(m, exec, 1.0, 80.0);
  const double r70 = gpu::runtime_at_temperature(m, mem, 1.0, 70.0);
  o.require(rel_close(r60, 1.0, 1e-9), "exec 60 C = " + fmt("%.12g", r60));
  o.require(rel_close(r80, 1.0 + 7 * 0.200, 1e-9), "exec 80 C = " + fmt("%.12g", r80));
  o.require(rel_close(r70, 1.0 + 30 * 0.00324, 1e-9), "memory 70 C = " + fmt("%.12g", r70));
  if (o.ok) o.detail = "1.0 s, 2.4 s, 1.0972 s within 1e-9";
  return o;
}

Outcome leakage_law() {
  Outcome o;
  const gpu::GpuModel m = gpu::default_gpu_model();
  for (int t = 200; t < 400; ++t) {
    o.require(gpu::leakage_power(m, t + 1) > gpu::leakage_power(m, t),
              "not increasing at " + std::to_string(t) + " K");
  }
  gpu::GpuModel zero = m;
  zero.leak_coeff_k = 0.0;
  for (int t = 200; t <= 400; ++t) o.require(gpu::leakage_power(zero, t) == 0.0, "nonzero with k = 0");
  const double at350 = gpu::leakage_power(m, 350.0);
  o.require(rel_close(at350, 0.10 * m.tdp_w, 1e-9), "leakage(350 K) = " + fmt("%.12g", at350));
  if (o.ok) o.detail = "increasing on 200..400 K, zero for k = 0, leakage(350 K) = " + fmt("%.9g", at350) + " W";
  return o;
}

class BookkeepingObserver final : public sim::SimulationObserver {
 public:
  void on_step(const thermal::ThermalNetwork& net, const thermal::ThermalState& before,
               const thermal::StepResult& step, double dt) override {
    for (std::size_t i = 0; i < net.size(); ++i) {
      const double c = net.nodes()[i].heat_capacity_j_per_k;
      const double stored = c * (step.next.temperatures_k[i] - before.temperatures_k[i]);
      const double residual = std::abs(stored - step.net_w[i] * dt);
      const double scale = step.gross_w[i] * dt;
      worst = std::max(worst, scale > 0 ? residual / scale : residual);
      if (residual > 1e-9 * scale) ++failures;
      ++checks;
    }
  }
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst = 0.0;
};

Outcome thermal_integrator() {
  Outcome o;
  // Every step of a 10-orbit run of the default scenario.
  for (auto policy : {sched::PolicyId::Thermostat, sched::PolicyId::AlwaysRun, sched::PolicyId::NeverRun}) {
    sim::Scenario s = default_scenario();
    s.policy.id = policy;
    s.duration_s = 10 * s.orbit.period_s;
    BookkeepingObserver obs;
    sim::run_simulation(s, {nullptr, &obs, false});
    o.require(obs.failures == 0, std::string(sched::to_string(policy)) + ": " +
                                     std::to_string(obs.failures) + " steps break C dT = Q dt");
    o.require(obs.checks == 2 * 54000, "unexpected step count");
    if (!o.ok) return o;
  }
  // Steady state under constant input against the closed-form fourth root,
  // evaluated here in long double without the library's helper.
  const thermal::ThermalEnvironment env;
  double worst = 0.0;
  for (double p : {10.0, 41.33, 100.0, 250.0}) {
    thermal::ThermalNode n{"n", 1000.0, 250.0, 0.1, 0.9, 0, 0, 0};
    const long double sigma = 5.670374419e-8L;
    const long double teq =
        std::pow(static_cast<long double>(p) / (0.9L * sigma * 0.1L) + std::pow(2.7L, 4.0L), 0.25L);
    const thermal::ThermalNetwork net({n}, {});
    thermal::ThermalState st = thermal::initial_state(net);
    const std::vector<double> applied{p};
    for (int k = 0; k < 200000; ++k) {
      st = thermal::step_thermal(net, st, env, thermal::Phase::Eclipse, applied, 1.0).next;
    }
    const double err = std::abs(st.temperatures_k[0] - static_cast<double>(teq));
    worst = std::max(worst, err);
    o.require(err < 0.1, "steady state at " + fmt("%g", p) + " W off by " + fmt("%.4f", err) + " K");
  }
  if (o.ok) o.detail = "3 x 108000 node-steps balanced, steady state within " + fmt("%.2e", worst) + " K";
  return o;
}

struct Fig4Run {
  double peak_c;
  double first_hot_s;  // first record with GPU above initial + 10 C, or +inf
};

Fig4Run fig4_run(std::string_view prefix) {
  sim::Scenario s = default_scenario();
  s.policy.id = sched::PolicyId::AlwaysRun;
  std::vector<workload::JobSpec> kept;
  for (const auto& j : s.jobs) {
    if (j.id.rfind(prefix, 0) == 0) kept.push_back(j);
  }
  s.jobs = kept;
  double initial_c = 0.0;
  for (const auto& n : s.nodes) {
    if (n.id == sim::kGpuNode) initial_c = thermal::to_celsius(n.temperature_k);
  }
  sim::VectorTraceSink sink;
  const auto summary = sim::run_simulation(s, {&sink, nullptr, false});
  Fig4Run r{summary.node(sim::kGpuNode).peak_c, INFINITY};
  for (const auto& rec : sink.records) {
    if (rec.temp_gpu_c >= initial_c + 10.0) {
      r.first_hot_s = rec.time_s;
      break;
    }
  }
  return r;
}

Outcome fig4_shape() {
  Outcome o;
  const Fig4Run exec = fig4_run("exec");
  const Fig4Run mem = fig4_run("mem");
  o.require(exec.peak_c > mem.peak_c,
            "exec peak " + fmt("%.2f", exec.peak_c) + " C not above memory " + fmt("%.2f", mem.peak_c));
  o.require(exec.first_hot_s < mem.first_hot_s,
            "exec reached +10 C at " + fmt("%g", exec.first_hot_s) + " s, memory at " +
                fmt("%g", mem.first_hot_s) + " s");
  if (o.ok) {
    o.detail = "peak " + fmt("%.1f", exec.peak_c) + " C vs " + fmt("%.1f", mem.peak_c) +
               " C; +10 C at " + fmt("%g", exec.first_hot_s) + " s vs " + fmt("%g", mem.first_hot_s) + " s";
  }
  return o;
}

// Checks every decision against the pre-decision queue, independently of
// the scheduler's own assignability helpers.
class SafetyObserver final : public sim::SimulationObserver {
 public:
  void on_decision(double, const sched::SchedulerInputs& in, const workload::JobQueue& jobs,
                   const sched::Decision& d) override {
    using sched::DecisionKind;
    const bool computes = d.kind == DecisionKind::RunFragment || d.kind == DecisionKind::ContinueRunning;
    if (computes && in.phase == thermal::Phase::Sunlit && !in.allow_sunlit_compute) ++sunlit_compute;
    if (d.kind != DecisionKind::RunFragment) return;
    ++runs;
    if (jobs.running()) {
      ++unassignable;
      return;
    }
    const auto& job = jobs.job(d.target.job);
    const auto& frag = job.fragments.at(d.target.index);
    if (frag.status != workload::FragmentStatus::Pending) ++unassignable;
    if (job.mode == workload::DependencyMode::InOrder) {
      for (std::size_t k = 0; k < d.target.index; ++k) {
        if (job.fragments[k].status != workload::FragmentStatus::Completed) {
          ++in_order_violations;
          break;
        }
      }
    }
  }
  std::size_t runs = 0;
  std::size_t sunlit_compute = 0;
  std::size_t unassignable = 0;
  std::size_t in_order_violations = 0;
};

Outcome scheduler_safety() {
  Outcome o;
  const sim::Scenario base = default_scenario();
  std::mt19937_64 rng(20240601);
  SafetyObserver obs;
  const sched::PolicyId policies[] = {sched::PolicyId::Thermostat, sched::PolicyId::AlwaysRun};
  for (int i = 0; i < 1000; ++i) {
    sim::Scenario s = base;
    s.jobs = testing::random_jobs(rng);
    s.policy.id = policies[i % 4 == 3 ? 1 : 0];
    s.duration_s = 10 * s.orbit.period_s;
    sim::run_simulation(s, {nullptr, &obs, false});
  }
  o.require(obs.in_order_violations == 0, std::to_string(obs.in_order_violations) + " in-order violations");
  o.require(obs.sunlit_compute == 0, std::to_string(obs.sunlit_compute) + " sunlit compute ticks");
  o.require(obs.unassignable == 0, std::to_string(obs.unassignable) + " unassignable RunFragment decisions");

  const sim::Summary t = sim::run_simulation(base);
  o.require(t.band_violation_fraction <= 0.05,
            "band violation " + fmt("%.4f", t.band_violation_fraction));
  o.require(t.heater_energy_j <= t.baseline_heater_energy_j,
            "thermostat heater " + fmt("%g", t.heater_energy_j) + " J > never_run " +
                fmt("%g", t.baseline_heater_energy_j) + " J");
  if (o.ok) {
    o.detail = "1000 queues, " + std::to_string(obs.runs) + " runs checked; violation " +
               fmt("%.2f", 100 * t.band_violation_fraction) + " %, heater " +
               fmt("%.0f", t.heater_energy_j) + " J <= " + fmt("%.0f", t.baseline_heater_energy_j) + " J";
  }
  return o;
}

Outcome preemption_semantics() {
  using workload::FragmentStatus;
  Outcome o;
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int cases = 0;
  std::size_t total_preemptions = 0;
  for (int trial = 0; trial < 600 && o.ok; ++trial) {
    std::vector<workload::Job> jobs;
    double max_fragment = 0.0;
    for (const auto& spec : testing::random_jobs(rng)) {
      jobs.push_back(workload::fragment_job(spec));
      max_fragment = std::max(max_fragment, jobs.back().fragments[0].nominal_duration_s);
    }
    workload::JobQueue q(std::move(jobs), 0.5);
    std::set<std::pair<std::size_t, std::size_t>> done;
    std::size_t preemptions = 0;
    double lost = 0.0;
    for (int step = 0; step < 500 && o.ok; ++step) {
      if (!q.running()) {
        std::vector<workload::FragmentRef> options;
        for (std::size_t j = 0; j < q.jobs().size(); ++j) {
          for (std::size_t idx : workload::assignable_fragments(q.job(j))) options.push_back({j, idx});
        }
        if (options.empty()) break;
        q.begin(options[rng() % options.size()]);
        continue;
      }
      const auto r = *q.running();
      if (unit(rng) < 0.35) {
        std::vector<workload::Job> before(q.jobs().begin(), q.jobs().end());
        const double in_flight = q.fragment(r).elapsed_s;
        lost += q.preempt();
        ++preemptions;
        for (std::size_t j = 0; j < before.size(); ++j) {
          for (std::size_t k = 0; k < before[j].fragments.size(); ++k) {
            const auto& was = before[j].fragments[k];
            const auto& now = q.job(j).fragments[k];
            if (workload::FragmentRef{j, k} == r) {
              o.require(now.status == FragmentStatus::Pending && now.elapsed_s == 0.0,
                        "preempted fragment not reset");
            } else {
              o.require(now.status == was.status && now.elapsed_s == was.elapsed_s,
                        "preemption touched a fragment that was not in flight");
            }
          }
        }
        o.require(in_flight <= max_fragment, "in-flight progress exceeds a fragment");
      } else if (q.advance(unit(rng) * q.fragment(r).nominal_duration_s * 0.5)) {
        q.complete();
      }
      std::set<std::pair<std::size_t, std::size_t>> now;
      for (const auto& e : q.ledger().entries()) {
        for (std::size_t j = 0; j < q.jobs().size(); ++j) {
          if (q.job(j).id == e.job_id) now.insert({j, e.index});
        }
      }
      for (const auto& d : done) o.require(now.count(d) == 1, "completed set shrank");
      for (const auto& n : now) {
        o.require(q.job(n.first).fragments[n.second].status == FragmentStatus::Completed,
                  "ledger entry not Completed");
      }
      done = std::move(now);
    }
    o.require(lost <= static_cast<double>(preemptions) * max_fragment,
              "lost " + fmt("%g", lost) + " s over " + std::to_string(preemptions) + " preemptions");
    if (preemptions > 0) ++cases;
    total_preemptions += preemptions;
  }
  o.require(cases >= 500, "only " + std::to_string(cases) + " storms had preemptions");
  if (o.ok) {
    o.detail = std::to_string(cases) + " storms, " + std::to_string(total_preemptions) + " preemptions";
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "gpuheat_acceptance";
  std::filesystem::create_directories(dir);
  const std::string scenario = g_data + "/default.scenario";
  std::string traces[2];
  for (int i = 0; i < 2; ++i) {
    const auto trace = dir / ("trace" + std::to_string(i) + ".csv");
    const auto summary = dir / ("summary" + std::to_string(i) + ".json");
    std::filesystem::remove(trace);
    const std::string cmd = "\"" + g_cli + "\" simulate \"" + scenario + "\" --trace \"" +
                            trace.string() + "\" --summary \"" + summary.string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    o.require(rc == 0, "simulate exited with " + std::to_string(rc));
    traces[i] = slurp(trace);
  }
  o.require(!traces[0].empty(), "empty trace");
  o.require(traces[0] == traces[1], "traces differ");
  if (o.ok) o.detail = std::to_string(traces[0].size()) + " bytes, identical";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: gpuheat_acceptance <gpuheat-cli> <data-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_data = argv[2];

  const std::vector<Criterion> criteria = {
      {"Table 1 arithmetic", 1.0, table1_arithmetic},
      {"Classification thresholds", 0.0, classification},
      {"Runtime degradation model", 0.0, runtime_degradation},
      {"Leakage law", 0.0, leakage_law},
      {"Thermal integrator", 10.0, thermal_integrator},
      {"Fig. 4 shape analogue", 0.0, fig4_shape},
      {"Scheduler safety and tracking", 120.0, scheduler_safety},
      {"Preemption semantics", 0.0, preemption_semantics},
      {"Determinism", 0.0, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && elapsed > c.budget_s && o.ok) {
      o.ok = false;
      o.detail = "took " + fmt("%.2f", elapsed) + " s, limit " + fmt("%g", c.budget_s) + " s";
    }
    std::printf("%s  %-32s %7.2fs  %s\n", o.ok ? "PASS" : "FAIL", c.name.c_str(), elapsed,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
