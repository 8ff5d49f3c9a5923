#include "gpuheat/gpu_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gpuheat/errors.hpp"

namespace gpuheat::gpu {

namespace {

__extension__ typedef unsigned __int128 u128;

// Position of an intensity between the memory (0) and execution (1)
// thresholds on a log10 scale.
double mixed_weight(double intensity) {
  if (intensity <= kMemoryIntensity) return 0.0;
  if (intensity >= kExecutionIntensity) return 1.0;
  const double lo = std::log10(kMemoryIntensity);
  const double hi = std::log10(kExecutionIntensity);
  return (std::log10(intensity) - lo) / (hi - lo);
}

double memory_dynamic_power(const GpuModel& m) {
  return m.idle_power_w + m.mem_power_fraction * (m.tdp_w - m.idle_power_w);
}

double exec_penalty(const GpuModel& m, double temp_c) {
  return temp_c <= m.exec_knee_c ? 0.0 : m.exec_slope_s_per_c * (temp_c - m.exec_knee_c);
}

double memory_penalty(const GpuModel& m, double temp_c) {
  return m.mem_slope_s_per_c * std::max(0.0, temp_c - m.mem_ref_temp_c);
}

}  // namespace

WorkloadClass WorkloadClass::execution(double intensity) {
  return {WorkloadKind::ExecutionDominated, intensity};
}
WorkloadClass WorkloadClass::memory(double intensity) {
  return {WorkloadKind::MemoryDominated, intensity};
}
WorkloadClass WorkloadClass::mixed(double intensity) { return {WorkloadKind::Mixed, intensity}; }

std::string to_string(const WorkloadClass& cls) {
  switch (cls.kind) {
    case WorkloadKind::ExecutionDominated:
      return "execution-dominated";
    case WorkloadKind::MemoryDominated:
      return "memory-dominated";
    case WorkloadKind::Mixed:
      break;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "mixed(%g)", cls.intensity);
  return buf;
}

WorkloadClass classify_workload(std::uint64_t flops, std::uint64_t mem_accesses) {
  if (flops == 0 && mem_accesses == 0) {
    throw EmptyWorkError("classify_workload: no FLOPs and no memory accesses");
  }
  if (mem_accesses == 0) {
    return WorkloadClass::execution(std::numeric_limits<double>::infinity());
  }
  const double intensity = static_cast<double>(flops) / static_cast<double>(mem_accesses);
  // Compare on exact integers: flops / accesses > 100  <=>  flops > 100 * accesses.
  const auto f = static_cast<u128>(flops);
  const auto a = static_cast<u128>(mem_accesses);
  if (f > 100 * a) return WorkloadClass::execution(intensity);
  if (100 * f < a) return WorkloadClass::memory(intensity);
  return WorkloadClass::mixed(intensity);
}

WorkloadClass classify_intensity(double intensity) {
  if (!(intensity >= 0.0)) throw DomainError("classify_intensity: intensity must be >= 0");
  if (intensity > kExecutionIntensity) return WorkloadClass::execution(intensity);
  if (intensity < kMemoryIntensity) return WorkloadClass::memory(intensity);
  return WorkloadClass::mixed(intensity);
}

KernelCounts kernel_to_counts(const KernelSpec& k) {
  if (k.iterations == 0) throw EmptyWorkError("kernel '" + k.name + "' has zero iterations");
  KernelCounts c;
  if (__builtin_mul_overflow(k.flops_per_iteration, k.iterations, &c.flops)) {
    throw RangeError("kernel '" + k.name + "': FLOP count overflows 64 bits");
  }
  std::uint64_t loop_accesses = 0;
  if (__builtin_mul_overflow(k.mem_accesses_per_iteration, k.iterations, &loop_accesses) ||
      __builtin_add_overflow(loop_accesses, k.invariant_mem_accesses, &c.mem_accesses)) {
    throw RangeError("kernel '" + k.name + "': memory access count overflows 64 bits");
  }
  if (c.flops == 0 && c.mem_accesses == 0) {
    throw EmptyWorkError("kernel '" + k.name + "' performs no work");
  }
  return c;
}

KernelSpec execution_dominated_kernel(std::uint64_t test_size) {
  // b = a[i]; loop { b *= a[i]; b *= 3; b /= 6; b /= 2; b += 1; } with a[i]
  // register-resident after the initial load.
  return {"execution-dominated", 5, 0, 1, test_size};
}

KernelSpec memory_dominated_kernel(std::uint64_t test_size, std::uint64_t workload) {
  std::uint64_t iterations = 0;
  if (__builtin_mul_overflow(test_size, workload, &iterations)) {
    throw RangeError("memory_dominated_kernel: iteration count overflows 64 bits");
  }
  // loop { b += a[i+j]; b += a[i+j+1]; b += a[i+j+2]; b += a[i+j+3]; b += 1; }
  return {"memory-dominated", 0, 4, 0, iterations};
}

void GpuModel::validate() const {
  if (!(tdp_w > 0.0)) throw ConfigError("gpu.tdp_w must be > 0");
  if (!(idle_power_w >= 0.0 && idle_power_w < tdp_w)) {
    throw ConfigError("gpu.idle_power_w must lie in [0, tdp_w)");
  }
  if (!(leak_coeff_k >= 0.0)) throw ConfigError("gpu.leak_coeff_k must be >= 0");
  if (!(leak_exp_b > 0.0)) throw ConfigError("gpu.leak_exp_b must be > 0");
  if (!(mem_power_fraction > 0.0 && mem_power_fraction <= 1.0)) {
    throw ConfigError("gpu.mem_power_fraction must lie in (0, 1]");
  }
  if (!(exec_slope_s_per_c >= 0.0 && mem_slope_s_per_c >= 0.0)) {
    throw ConfigError("gpu runtime slopes must be >= 0");
  }
  if (!(exec_slope_s_per_c > mem_slope_s_per_c)) {
    throw ConfigError("gpu.exec_slope_s_per_c must exceed gpu.mem_slope_s_per_c");
  }
  if (!std::isfinite(exec_knee_c) || !std::isfinite(mem_ref_temp_c)) {
    throw ConfigError("gpu knee/reference temperatures must be finite");
  }
}

double calibrate_leak_coeff(double tdp_w, double leak_exp_b, double ref_temp_k, double fraction) {
  if (!(tdp_w > 0.0 && leak_exp_b > 0.0 && ref_temp_k > 0.0 && fraction >= 0.0)) {
    throw DomainError("calibrate_leak_coeff: non-positive input");
  }
  return fraction * tdp_w / (ref_temp_k * ref_temp_k * std::exp(-leak_exp_b / ref_temp_k));
}

GpuModel default_gpu_model() {
  GpuModel m;
  m.leak_coeff_k = calibrate_leak_coeff(m.tdp_w, m.leak_exp_b);
  return m;
}

double leakage_power(const GpuModel& model, double temp_k) {
  if (!(temp_k > 0.0)) throw DomainError("leakage_power: temperature must be > 0 K");
  return model.leak_coeff_k * temp_k * temp_k * std::exp(-model.leak_exp_b / temp_k);
}

double idle_power(const GpuModel& model, double temp_k) {
  return model.idle_power_w + leakage_power(model, temp_k);
}

double gpu_power(const GpuModel& model, const WorkloadClass& cls, double temp_k) {
  const double leak = leakage_power(model, temp_k);
  const double memory = memory_dynamic_power(model);
  switch (cls.kind) {
    case WorkloadKind::ExecutionDominated:
      return model.tdp_w + leak;
    case WorkloadKind::MemoryDominated:
      return memory + leak;
    case WorkloadKind::Mixed:
      break;
  }
  return memory + mixed_weight(cls.intensity) * (model.tdp_w - memory) + leak;
}

double runtime_at_temperature(const GpuModel& model, const WorkloadClass& cls, double nominal_s,
                              double temp_c) {
  if (!(nominal_s > 0.0)) throw DomainError("runtime_at_temperature: nominal runtime must be > 0");
  double penalty = 0.0;
  switch (cls.kind) {
    case WorkloadKind::ExecutionDominated:
      penalty = exec_penalty(model, temp_c);
      break;
    case WorkloadKind::MemoryDominated:
      penalty = memory_penalty(model, temp_c);
      break;
    case WorkloadKind::Mixed: {
      const double mem = memory_penalty(model, temp_c);
      penalty = mem + mixed_weight(cls.intensity) * (exec_penalty(model, temp_c) - mem);
      break;
    }
  }
  return nominal_s + std::max(0.0, penalty);
}

}  // namespace gpuheat::gpu
