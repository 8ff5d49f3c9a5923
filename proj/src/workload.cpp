#include "gpuheat/workload.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpuheat/errors.hpp"

namespace gpuheat::workload {

namespace {

std::string describe(const Job& job, std::size_t index) {
  return "fragment " + job.id + "#" + std::to_string(index);
}

Fragment& checked_fragment(Job& job, std::size_t index) {
  if (index >= job.fragments.size()) {
    throw SchedulerLogicError(describe(job, index) + " does not exist");
  }
  return job.fragments[index];
}

// Number of fragments for a job; forgives ratios that are an integer up to
// rounding (e.g. 0.3 / 0.1).
std::size_t fragment_count(double total, double fragment) {
  const double ratio = total / fragment;
  auto n = static_cast<std::size_t>(std::ceil(ratio));
  if (n > 1 && static_cast<double>(n - 1) * fragment >= total * (1.0 - 1e-12)) --n;
  return std::max<std::size_t>(n, 1);
}

}  // namespace

std::string_view to_string(DependencyMode mode) {
  return mode == DependencyMode::InOrder ? "in_order" : "out_of_order";
}

DependencyMode parse_dependency_mode(std::string_view text) {
  if (text == "in_order") return DependencyMode::InOrder;
  if (text == "out_of_order") return DependencyMode::OutOfOrder;
  throw ConfigError("dependency mode must be \"in_order\" or \"out_of_order\", got \"" +
                    std::string(text) + "\"");
}

bool Job::completed() const {
  return std::all_of(fragments.begin(), fragments.end(),
                     [](const Fragment& f) { return f.status == FragmentStatus::Completed; });
}

Job fragment_job(std::string id, std::uint64_t total_flops, std::uint64_t total_mem_accesses,
                 double total_duration_s, double fragment_duration_s, DependencyMode mode,
                 int priority) {
  if (!(fragment_duration_s > 0.0) || !std::isfinite(fragment_duration_s)) {
    throw ConfigError("job '" + id + "': fragment_duration_s must be > 0");
  }
  if (!(total_duration_s >= fragment_duration_s) || !std::isfinite(total_duration_s)) {
    throw ConfigError("job '" + id + "': total_duration_s must be >= fragment_duration_s");
  }
  if (total_flops == 0 && total_mem_accesses == 0) {
    throw ConfigError("job '" + id + "': total_flops and total_mem_accesses are both zero");
  }
  const gpu::WorkloadClass job_class = gpu::classify_workload(total_flops, total_mem_accesses);

  const std::size_t n = fragment_count(total_duration_s, fragment_duration_s);
  const double duration = total_duration_s / static_cast<double>(n);
  const std::uint64_t flops_each = total_flops / n;
  const std::uint64_t mem_each = total_mem_accesses / n;

  Job job;
  job.id = std::move(id);
  job.mode = mode;
  job.priority = priority;
  job.fragments.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Fragment f;
    f.job_id = job.id;
    f.index = i;
    f.nominal_duration_s = duration;
    f.flops = flops_each;
    f.mem_accesses = mem_each;
    if (i + 1 == n) {
      f.flops += total_flops % n;
      f.mem_accesses += total_mem_accesses % n;
    }
    // Tiny jobs can leave fragments with no counts of their own.
    f.heat_class = (f.flops == 0 && f.mem_accesses == 0)
                       ? job_class
                       : gpu::classify_workload(f.flops, f.mem_accesses);
    job.fragments.push_back(std::move(f));
  }
  return job;
}

Job fragment_job(const JobSpec& spec) {
  return fragment_job(spec.id, spec.total_flops, spec.total_mem_accesses, spec.total_duration_s,
                      spec.fragment_duration_s, spec.mode, spec.priority);
}

std::vector<std::size_t> assignable_fragments(const Job& job) {
  std::vector<std::size_t> out;
  if (job.mode == DependencyMode::InOrder) {
    for (const auto& f : job.fragments) {
      if (f.status != FragmentStatus::Completed) {
        out.push_back(f.index);
        break;
      }
    }
    return out;
  }
  for (const auto& f : job.fragments) {
    if (f.status == FragmentStatus::Pending) out.push_back(f.index);
  }
  return out;
}

CheckpointLedger::CheckpointLedger(double checkpoint_overhead_s) : overhead_s_(checkpoint_overhead_s) {
  if (!(checkpoint_overhead_s >= 0.0)) throw ConfigError("checkpoint_overhead_s must be >= 0");
}

void CheckpointLedger::record(std::string_view job_id, std::size_t index) {
  if (contains(job_id, index)) {
    throw SchedulerLogicError("fragment " + std::string(job_id) + "#" + std::to_string(index) +
                              " checkpointed twice");
  }
  entries_.push_back({std::string(job_id), index});
}

bool CheckpointLedger::contains(std::string_view job_id, std::size_t index) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.index == index && e.job_id == job_id; });
}

void begin_fragment(Job& job, std::size_t index) {
  Fragment& f = checked_fragment(job, index);
  if (f.status != FragmentStatus::Pending) {
    throw SchedulerLogicError("begin on " + describe(job, index) + " which is not Pending");
  }
  const auto allowed = assignable_fragments(job);
  if (std::find(allowed.begin(), allowed.end(), index) == allowed.end()) {
    throw SchedulerLogicError("begin on " + describe(job, index) +
                              " which is not assignable (dependency order)");
  }
  f.status = FragmentStatus::Running;
  f.elapsed_s = 0.0;
}

void advance_fragment(Job& job, std::size_t index, double progress_s) {
  Fragment& f = checked_fragment(job, index);
  if (f.status != FragmentStatus::Running) {
    throw SchedulerLogicError("advance on " + describe(job, index) + " which is not Running");
  }
  if (!(progress_s >= 0.0)) throw SchedulerLogicError("negative progress on " + describe(job, index));
  f.elapsed_s += progress_s;
}

double complete_fragment(Job& job, std::size_t index, CheckpointLedger& ledger) {
  Fragment& f = checked_fragment(job, index);
  if (f.status != FragmentStatus::Running) {
    throw SchedulerLogicError("complete on " + describe(job, index) + " which is not Running");
  }
  if (f.elapsed_s < f.nominal_duration_s) {
    throw SchedulerLogicError("complete on " + describe(job, index) + " before its runtime elapsed");
  }
  ledger.record(job.id, index);
  f.status = FragmentStatus::Completed;
  f.elapsed_s = f.nominal_duration_s;
  return ledger.checkpoint_overhead_s();
}

double preempt_fragment(Job& job, std::size_t index) {
  Fragment& f = checked_fragment(job, index);
  if (f.status != FragmentStatus::Running) {
    throw SchedulerLogicError("preempt on " + describe(job, index) + " which is not Running");
  }
  const double lost = f.elapsed_s;
  f.status = FragmentStatus::Pending;
  f.elapsed_s = 0.0;
  return lost;
}

JobQueue::JobQueue(std::vector<Job> jobs, double checkpoint_overhead_s)
    : jobs_(std::move(jobs)), ledger_(checkpoint_overhead_s) {
  for (std::size_t i = 0; i < jobs_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (jobs_[i].id == jobs_[j].id) throw ConfigError("duplicate job id '" + jobs_[i].id + "'");
    }
    const auto& frags = jobs_[i].fragments;
    for (std::size_t k = 0; k < frags.size(); ++k) {
      if (frags[k].index != k) throw ConfigError("job '" + jobs_[i].id + "' has non-contiguous fragment indices");
      if (frags[k].status == FragmentStatus::Running) {
        if (running_) throw SchedulerLogicError("more than one fragment Running");
        running_ = FragmentRef{i, k};
      } else if (frags[k].status == FragmentStatus::Completed) {
        ledger_.record(jobs_[i].id, k);
      }
    }
  }
}

const Fragment& JobQueue::fragment(FragmentRef ref) const {
  return jobs_.at(ref.job).fragments.at(ref.index);
}

bool JobQueue::is_assignable(FragmentRef ref) const {
  if (ref.job >= jobs_.size()) return false;
  const Job& job = jobs_[ref.job];
  if (ref.index >= job.fragments.size()) return false;
  if (job.fragments[ref.index].status != FragmentStatus::Pending) return false;
  const auto allowed = assignable_fragments(job);
  return std::find(allowed.begin(), allowed.end(), ref.index) != allowed.end();
}

bool JobQueue::has_assignable() const {
  for (std::size_t j = 0; j < jobs_.size(); ++j) {
    for (std::size_t idx : assignable_fragments(jobs_[j])) {
      if (jobs_[j].fragments[idx].status == FragmentStatus::Pending) return true;
    }
  }
  return false;
}

void JobQueue::begin(FragmentRef ref) {
  if (running_) throw SchedulerLogicError("begin while another fragment is Running");
  if (ref.job >= jobs_.size()) throw SchedulerLogicError("begin on an unknown job");
  begin_fragment(jobs_[ref.job], ref.index);
  running_ = ref;
}

bool JobQueue::advance(double progress_s) {
  if (!running_) throw SchedulerLogicError("advance with nothing Running");
  Job& job = jobs_[running_->job];
  advance_fragment(job, running_->index, progress_s);
  const Fragment& f = job.fragments[running_->index];
  return f.elapsed_s >= f.nominal_duration_s;
}

double JobQueue::complete() {
  if (!running_) throw SchedulerLogicError("complete with nothing Running");
  const double overhead = complete_fragment(jobs_[running_->job], running_->index, ledger_);
  running_.reset();
  return overhead;
}

double JobQueue::preempt() {
  if (!running_) throw SchedulerLogicError("preempt with nothing Running");
  const double lost = preempt_fragment(jobs_[running_->job], running_->index);
  running_.reset();
  return lost;
}

std::size_t JobQueue::completed_jobs() const {
  return static_cast<std::size_t>(
      std::count_if(jobs_.begin(), jobs_.end(), [](const Job& j) { return j.completed(); }));
}

}  // namespace gpuheat::workload
