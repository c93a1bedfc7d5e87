#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "specflow/access.hpp"
#include "specflow/data_registry.hpp"
#include "specflow/ids.hpp"
#include "specflow/spec_engine.hpp"
#include "specflow/task.hpp"
#include "specflow/task_graph.hpp"

namespace specflow {

/// What one insertion call created.
struct InsertionReceipt {
  TaskId main_task;
  std::optional<TaskId> speculative_twin;
  std::vector<TaskId> copies;
  std::vector<TaskId> selects;
  std::optional<GroupId> group;
};

/// STF task insertion with speculation: turns user tasks into the
/// copy / twin / select pattern and wires speculative groups.
///
/// Single-threaded; the runtime holds its scheduler lock around every call.
class GraphBuilder {
 public:
  GraphBuilder(TaskGraph& graph, DataRegistry& registry, SpecEngine& engine)
      : graph_(graph), registry_(registry), engine_(engine) {}

  /// Inserts a task that declares no MaybeWrite access.
  InsertionReceipt insert_task(std::vector<AccessRecord> accesses, TaskBody body, TaskOptions options = {});

  /// Inserts a task with at least one MaybeWrite access; its body returns whether it wrote.
  InsertionReceipt insert_uncertain_task(std::vector<AccessRecord> accesses, TaskBody body,
                                         TaskOptions options = {});

  /// One select per (original, duplicate) pair, appended to `group`.
  std::vector<TaskId> build_select_tasks(GroupId group, std::span<const std::pair<DataHandle, DataHandle>> pairs);

 private:
  void validate(const std::vector<AccessRecord>& accesses, bool uncertain) const;
  TaskNode& add_task(TaskKind kind, std::string label, std::vector<AccessRecord> accesses,
                     std::vector<DataId> logical, TaskBody body);
  TaskId add_copy(DataHandle source, DataHandle shadow, GroupId group);
  TaskNode& add_twin(TaskNode& original, const std::vector<AccessRecord>& accesses,
                     const std::vector<DataHandle>& working);

  TaskGraph& graph_;
  DataRegistry& registry_;
  SpecEngine& engine_;
};

}  // namespace specflow
