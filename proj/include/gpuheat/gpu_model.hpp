#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gpuheat::gpu {

/// Intensity thresholds in FLOPs per memory access. Strictly above the upper
/// one is execution-dominated, strictly below the lower one memory-dominated.
inline constexpr double kExecutionIntensity = 100.0;
inline constexpr double kMemoryIntensity = 0.01;

enum class WorkloadKind { ExecutionDominated, MemoryDominated, Mixed };

struct WorkloadClass {
  WorkloadKind kind = WorkloadKind::Mixed;
  double intensity = 1.0;  // FLOPs per access; +inf when there were no accesses

  static WorkloadClass execution(double intensity);
  static WorkloadClass memory(double intensity);
  static WorkloadClass mixed(double intensity);

  bool operator==(const WorkloadClass&) const = default;
};

/// "execution-dominated", "memory-dominated" or "mixed(<intensity>)".
std::string to_string(const WorkloadClass& cls);

/// Exact threshold comparison on integer counts. Throws EmptyWorkError when
/// both counts are zero.
WorkloadClass classify_workload(std::uint64_t flops, std::uint64_t mem_accesses);

/// Same thresholds applied to a precomputed intensity (>= 0, may be +inf).
WorkloadClass classify_intensity(double intensity);

/// Loop-level description of a kernel, counted per thread-element.
///
/// FLOPs are floating-point arithmetic in the loop body only; index and loop
/// counter arithmetic count zero. Each distinct array reference in the body is
/// one access per iteration. A value loaded once before the loop and kept in a
/// register is an `invariant_mem_accesses` entry, counted once in total. A
/// read fused into an accumulate (`b += a[i + j]`) is a memory access, not a
/// FLOP.
struct KernelSpec {
  std::string name;
  std::uint64_t flops_per_iteration = 0;
  std::uint64_t mem_accesses_per_iteration = 0;
  std::uint64_t invariant_mem_accesses = 0;
  std::uint64_t iterations = 1;
};

struct KernelCounts {
  std::uint64_t flops = 0;
  std::uint64_t mem_accesses = 0;

  bool operator==(const KernelCounts&) const = default;
};

/// Throws RangeError on overflow and EmptyWorkError when the kernel does no work.
KernelCounts kernel_to_counts(const KernelSpec& kernel);

/// Compute-bound reference kernel: five multiplies/divides/adds on a register
/// value per iteration, `test_size` iterations, one load before the loop.
KernelSpec execution_dominated_kernel(std::uint64_t test_size = 300000);

/// Memory-bound reference kernel: four strided reads accumulated per iteration,
/// `test_size * workload` iterations.
KernelSpec memory_dominated_kernel(std::uint64_t test_size = 300000, std::uint64_t workload = 150);

struct GpuModel {
  double tdp_w = 250.0;
  double idle_power_w = 20.0;
  double leak_coeff_k = 0.0;  // W/K^2
  double leak_exp_b = 2500.0;  // K
  double mem_power_fraction = 0.55;
  double exec_knee_c = 73.0;
  double exec_slope_s_per_c = 0.200;
  double mem_slope_s_per_c = 0.00324;
  double mem_ref_temp_c = 40.0;

  /// Throws ConfigError naming the first bad parameter.
  void validate() const;
};

/// Coefficient k such that k T^2 exp(-b / T) equals `fraction * tdp_w` at `ref_temp_k`.
double calibrate_leak_coeff(double tdp_w, double leak_exp_b, double ref_temp_k = 350.0,
                            double fraction = 0.10);

/// Default model with the leakage coefficient calibrated to 10 % of TDP at 350 K.
GpuModel default_gpu_model();

/// k T^2 exp(-b / T).
double leakage_power(const GpuModel& model, double temp_k);

/// Dynamic + leakage power for an active workload class at `temp_k`.
double gpu_power(const GpuModel& model, const WorkloadClass& cls, double temp_k);

/// Idle floor + leakage.
double idle_power(const GpuModel& model, double temp_k);

/// Wall-clock runtime of a piece of work whose runtime on a cool GPU is
/// `nominal_s`. Never less than `nominal_s`.
double runtime_at_temperature(const GpuModel& model, const WorkloadClass& cls, double nominal_s,
                              double temp_c);

}  // namespace gpuheat::gpu
