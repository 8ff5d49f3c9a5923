#pragma once

// Jobs split into equal-duration fragments. A fragment's progress is kept
// only once it completes (checkpoint); preempting it throws away the partial
// progress but never touches completed siblings.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gpuheat/gpu_model.hpp"

namespace gpuheat::workload {

enum class DependencyMode { InOrder, OutOfOrder };

std::string_view to_string(DependencyMode mode);
/// Accepts "in_order" / "out_of_order". Throws ConfigError otherwise.
DependencyMode parse_dependency_mode(std::string_view text);

enum class FragmentStatus { Pending, Running, Completed };

struct Fragment {
  std::string job_id;
  std::size_t index = 0;
  double nominal_duration_s = 0.0;
  std::uint64_t flops = 0;
  std::uint64_t mem_accesses = 0;
  gpu::WorkloadClass heat_class;
  FragmentStatus status = FragmentStatus::Pending;
  double elapsed_s = 0.0;  // nominal-equivalent progress while Running
};

struct Job {
  std::string id;
  std::vector<Fragment> fragments;
  DependencyMode mode = DependencyMode::InOrder;
  int priority = 0;  // lower is more urgent

  bool completed() const;
};

struct JobSpec {
  std::string id;
  std::uint64_t total_flops = 0;
  std::uint64_t total_mem_accesses = 0;
  double total_duration_s = 0.0;
  double fragment_duration_s = 0.0;
  DependencyMode mode = DependencyMode::InOrder;
  int priority = 0;
};

/// Splits a job into n = ceil(total / fragment) fragments of identical
/// duration total / n. Counts are split evenly with the remainder on the last
/// fragment. Throws ConfigError on non-positive durations or a job that does
/// no work.
Job fragment_job(std::string id, std::uint64_t total_flops, std::uint64_t total_mem_accesses,
                 double total_duration_s, double fragment_duration_s, DependencyMode mode,
                 int priority = 0);
Job fragment_job(const JobSpec& spec);

/// InOrder: the lowest-index fragment that is not Completed (which may be the
/// one currently Running). OutOfOrder: every Pending fragment, ascending.
std::vector<std::size_t> assignable_fragments(const Job& job);

/// Completed fragments per job, in completion order. Only ever grows.
class CheckpointLedger {
 public:
  struct Entry {
    std::string job_id;
    std::size_t index;
  };

  explicit CheckpointLedger(double checkpoint_overhead_s = 0.5);

  double checkpoint_overhead_s() const { return overhead_s_; }
  void record(std::string_view job_id, std::size_t index);
  bool contains(std::string_view job_id, std::size_t index) const;
  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  double overhead_s_;
  std::vector<Entry> entries_;
};

/// Pending -> Running(0). Throws SchedulerLogicError unless `index` is
/// assignable and Pending.
void begin_fragment(Job& job, std::size_t index);

/// Adds nominal-equivalent progress to a Running fragment.
void advance_fragment(Job& job, std::size_t index, double progress_s);

/// Running -> Completed once progress reached the nominal duration. Records
/// the fragment in the ledger and returns the checkpoint overhead to charge.
double complete_fragment(Job& job, std::size_t index, CheckpointLedger& ledger);

/// Running -> Pending. Returns the progress that was thrown away.
double preempt_fragment(Job& job, std::size_t index);

struct FragmentRef {
  std::size_t job = 0;  // position in the queue
  std::size_t index = 0;

  bool operator==(const FragmentRef&) const = default;
};

/// All jobs of one simulation plus the single GPU slot: at most one fragment
/// is Running at any time.
class JobQueue {
 public:
  JobQueue() = default;
  JobQueue(std::vector<Job> jobs, double checkpoint_overhead_s);

  std::span<const Job> jobs() const { return jobs_; }
  const Job& job(std::size_t i) const { return jobs_.at(i); }
  const Fragment& fragment(FragmentRef ref) const;
  const CheckpointLedger& ledger() const { return ledger_; }
  std::optional<FragmentRef> running() const { return running_; }

  /// True if `ref` is Pending and assignable within its job.
  bool is_assignable(FragmentRef ref) const;
  bool has_assignable() const;

  void begin(FragmentRef ref);
  /// Adds progress to the running fragment; returns true once it reached its
  /// nominal duration.
  bool advance(double progress_s);
  /// Completes the running fragment; returns the checkpoint overhead.
  double complete();
  /// Preempts the running fragment; returns the lost progress.
  double preempt();

  std::size_t completed_fragments() const { return ledger_.size(); }
  std::size_t completed_jobs() const;

 private:
  std::vector<Job> jobs_;
  CheckpointLedger ledger_;
  std::optional<FragmentRef> running_;
};

}  // namespace gpuheat::workload
