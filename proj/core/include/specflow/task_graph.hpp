#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "specflow/ids.hpp"
#include "specflow/task.hpp"

namespace specflow {

enum class SpeculationOutcome {
  /// Parentless group: it only produces duplicates for later groups.
  NotApplicable,
  Pending,
  Succeeded,
  Failed,
};

/// A speculative task group: the copy/uncertain/original/twin/select tasks tied
/// to one speculation episode.
///
/// `failed` means the hypothesis carried by this group's duplicates is broken
/// (one of its uncertain tasks wrote, an ancestor failed, or the group was
/// disabled), so every successor group must fall back to its normal path.
/// `speculation` is the fate of this group's own twins, which only depends on
/// the parent groups.
struct SpecGroup {
  GroupId id;
  std::optional<TaskId> main_task;

  std::vector<TaskId> copies;
  std::vector<TaskId> uncertain_tasks;
  std::vector<TaskId> originals;
  std::vector<TaskId> twins;
  std::vector<TaskId> selects;

  std::vector<GroupId> parents;
  std::vector<GroupId> successors;

  Activation state = Activation::Undefined;
  bool failed = false;
  SpeculationOutcome speculation = SpeculationOutcome::NotApplicable;

  /// Uncertain tasks whose outcome has been accepted from a valid reporter.
  std::vector<TaskId> reported;
  /// Twin reports that arrived before the group's speculation was resolved.
  std::vector<std::pair<TaskId, bool>> deferred_reports;
  /// Enabled, speculation valid, every uncertain task reported "not written".
  bool clean = false;

  [[nodiscard]] std::size_t task_count() const {
    return copies.size() + uncertain_tasks.size() + originals.size() + twins.size() + selects.size();
  }
};

/// Owns task nodes and speculative groups. Identifiers are dense indices.
class TaskGraph {
 public:
  TaskGraph() = default;
  TaskGraph(const TaskGraph&) = delete;
  TaskGraph& operator=(const TaskGraph&) = delete;

  TaskNode& add_node(TaskKind kind, std::string label = {});
  SpecGroup& add_group();

  /// Adds `from -> to` unless already present.
  void add_edge(TaskId from, TaskId to);

  [[nodiscard]] TaskNode& node(TaskId id) { return *nodes_.at(id.value()); }
  [[nodiscard]] const TaskNode& node(TaskId id) const { return *nodes_.at(id.value()); }
  [[nodiscard]] SpecGroup& group(GroupId id) { return *groups_.at(id.value()); }
  [[nodiscard]] const SpecGroup& group(GroupId id) const { return *groups_.at(id.value()); }

  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] std::size_t group_count() const { return groups_.size(); }

  /// Counts nodes of a given kind.
  [[nodiscard]] std::size_t count(TaskKind kind) const;

 private:
  std::vector<std::unique_ptr<TaskNode>> nodes_;
  std::vector<std::unique_ptr<SpecGroup>> groups_;
};

}  // namespace specflow
