#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "specflow/ids.hpp"
#include "specflow/task_graph.hpp"

namespace specflow {

/// Snapshot handed to the activation policy when a group's first copy or twin becomes ready.
struct ActivationStats {
  std::size_t ready_tasks = 0;
  std::size_t workers = 0;
  std::size_t group_size = 0;
};

/// Pure predicate deciding whether a group speculates.
using ActivationPolicy = std::function<bool(const ActivationStats&)>;

[[nodiscard]] ActivationPolicy always_enable();
[[nodiscard]] ActivationPolicy never_enable();
/// Speculate only while fewer tasks are ready than there are workers.
[[nodiscard]] ActivationPolicy enable_when_underloaded();

enum class DisableResult { Disabled, TooLate };

/// One activation transition, recorded for tracing and for the scheduler.
struct ActivationChange {
  TaskId task;
  Activation from = Activation::Undefined;
  Activation to = Activation::Undefined;
  /// The disable arrived after the body started (or finished); the task keeps running.
  bool too_late = false;
  GroupId group;

  friend bool operator==(const ActivationChange&, const ActivationChange&) = default;
};

/// Owns the speculative-group state machine: activation decisions and the
/// enable/disable cascades that follow uncertain-task outcomes.
///
/// Not synchronized; the runtime calls it under its scheduler lock.
class SpecEngine {
 public:
  explicit SpecEngine(TaskGraph& graph, ActivationPolicy policy = always_enable());

  void set_policy(ActivationPolicy policy) { policy_ = std::move(policy); }

  /// Registers a freshly built group with its parents. Must be called once the
  /// group's task lists are complete.
  void link_group(GroupId group);

  /// Takes the activation decision. Calling it twice for one group is a logic error.
  Activation decide_activation(GroupId group, const ActivationStats& stats);

  /// Feeds a completed task's wrote-flag to its group, deciding whether the
  /// reporter is authoritative (an original on the normal path, or a twin whose
  /// speculation succeeded).
  std::vector<ActivationChange> on_task_completed(TaskId task);

  /// Applies an authoritative outcome of `task`, one of `group`'s uncertain tasks.
  std::vector<ActivationChange> resolve_uncertain_completion(GroupId group, TaskId task, bool wrote);

  /// Falls back to the normal path in every group reachable from `group`
  /// (which must have failed). Returns the groups visited, `group` first.
  std::vector<GroupId> propagate_to_successors(GroupId group);

  /// Disables a task unless its body already started.
  DisableResult try_disable(TaskId task);

  /// Changes produced since the last call.
  std::vector<ActivationChange> take_changes();

  [[nodiscard]] const std::vector<ActivationChange>& history() const { return history_; }
  [[nodiscard]] std::size_t disables_too_late() const { return too_late_; }

 private:
  void enable(TaskId task);
  void disable(TaskId task);
  void apply_report(SpecGroup& group, TaskId uncertain, bool wrote);
  void mark_failed(SpecGroup& group);
  void fail_speculation(SpecGroup& group);
  void try_succeed(SpecGroup& group);
  void try_mark_clean(SpecGroup& group);
  std::vector<ActivationChange> since(std::size_t mark) const;

  TaskGraph& graph_;
  ActivationPolicy policy_;
  std::vector<ActivationChange> history_;
  std::size_t taken_ = 0;
  std::size_t too_late_ = 0;
};

}  // namespace specflow
