#pragma once
// Shared scenario builders and random generators for the test binaries.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gpuheat/scenario_io.hpp"
#include "gpuheat/simulator.hpp"
#include "gpuheat/workload.hpp"

namespace gpuheat::testing {

inline sim::Scenario load_default_scenario(const std::string& data_dir) {
  return io::load_scenario(data_dir + "/default.scenario");
}

/// Two nodes, no jobs, a single orbit. Small enough for unit tests.
inline sim::Scenario small_scenario() {
  sim::Scenario s;
  s.orbit = {600.0, 0.4, 0.0};
  thermal::ThermalNode gpu{"gpu", 400.0, thermal::to_kelvin(22.0), 0, 0, 0, 0, 0};
  thermal::ThermalNode body{"body", 2500.0, thermal::to_kelvin(20.0), 0.57, 0.9, 0.15, 0.92, 9.2};
  s.nodes = {gpu, body};
  s.links = {{"gpu", "body", 6.0}};
  s.gpu = gpu::default_gpu_model();
  s.duration_s = 1200.0;
  return s;
}

/// A queue of 1 to 6 jobs with mixed classes, modes, priorities and
/// fragment sizes, drawn from `rng`.
inline std::vector<workload::JobSpec> random_jobs(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_int_distribution<int> prio(0, 3);
  std::uniform_real_distribution<double> frag(20.0, 300.0);
  std::uniform_real_distribution<double> frags(1.0, 40.0);
  std::bernoulli_distribution in_order(0.5);
  std::vector<workload::JobSpec> jobs;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    workload::JobSpec j;
    j.id = "job" + std::to_string(i);
    switch (kind(rng)) {
      case 0:
        j.total_flops = 6'000'000'000'000'000ULL;
        j.total_mem_accesses = 1'000'000'000'000ULL;
        break;
      case 1:
        j.total_flops = 10'000'000'000ULL;
        j.total_mem_accesses = 40'000'000'000'000ULL;
        break;
      default:
        j.total_flops = 20'000'000'000'000ULL;
        j.total_mem_accesses = 20'000'000'000'000ULL;
        break;
    }
    j.fragment_duration_s = frag(rng);
    j.total_duration_s = j.fragment_duration_s * frags(rng);
    j.mode = in_order(rng) ? workload::DependencyMode::InOrder : workload::DependencyMode::OutOfOrder;
    j.priority = prio(rng);
    jobs.push_back(j);
  }
  return jobs;
}

}  // namespace gpuheat::testing
