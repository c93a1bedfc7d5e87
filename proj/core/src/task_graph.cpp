#include "specflow/task_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace specflow {

TaskNode& TaskGraph::add_node(TaskKind kind, std::string label) {
  auto node = std::make_unique<TaskNode>();
  node->id = TaskId{static_cast<TaskId::value_type>(nodes_.size())};
  node->kind = kind;
  node->label = label.empty() ? "t" + std::to_string(node->id.value()) : std::move(label);
  nodes_.push_back(std::move(node));
  return *nodes_.back();
}

SpecGroup& TaskGraph::add_group() {
  auto group = std::make_unique<SpecGroup>();
  group->id = GroupId{static_cast<GroupId::value_type>(groups_.size())};
  groups_.push_back(std::move(group));
  return *groups_.back();
}

void TaskGraph::add_edge(TaskId from, TaskId to) {
  if (!(from < to)) throw std::logic_error("edges must point from earlier to later tasks");
  TaskNode& succ = node(to);
  if (std::find(succ.predecessors.begin(), succ.predecessors.end(), from) != succ.predecessors.end()) return;
  succ.predecessors.push_back(from);
  node(from).successors.push_back(to);
}

std::size_t TaskGraph::count(TaskKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [&](const auto& n) { return n->kind == kind; }));
}

}  // namespace specflow
