#include "specflow/spec_engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace specflow {

ActivationPolicy always_enable() {
  return [](const ActivationStats&) { return true; };
}

ActivationPolicy never_enable() {
  return [](const ActivationStats&) { return false; };
}

ActivationPolicy enable_when_underloaded() {
  return [](const ActivationStats& s) { return s.ready_tasks < s.workers; };
}

SpecEngine::SpecEngine(TaskGraph& graph, ActivationPolicy policy) : graph_(graph), policy_(std::move(policy)) {}

void SpecEngine::link_group(GroupId id) {
  SpecGroup& group = graph_.group(id);
  bool parent_failed = false;
  for (GroupId p : group.parents) {
    SpecGroup& parent = graph_.group(p);
    parent.successors.push_back(id);
    parent_failed = parent_failed || parent.failed;
  }
  if (parent_failed) fail_speculation(group);
}

Activation SpecEngine::decide_activation(GroupId id, const ActivationStats& stats) {
  SpecGroup& group = graph_.group(id);
  if (group.state != Activation::Undefined) throw std::logic_error("activation decided twice for one group");
  if (group.failed) {
    group.state = Activation::Disabled;
    return group.state;
  }
  if (policy_(stats)) {
    group.state = Activation::Enabled;
    for (TaskId t : group.copies) enable(t);
    for (TaskId t : group.twins) enable(t);
    if (group.parents.empty()) {
      try_mark_clean(group);
    } else {
      try_succeed(group);
    }
  } else {
    group.state = Activation::Disabled;
    fail_speculation(group);
  }
  return group.state;
}

std::vector<ActivationChange> SpecEngine::on_task_completed(TaskId id) {
  const std::size_t mark = history_.size();
  const TaskNode& node = graph_.node(id);
  if (!node.reports_write() || !node.group || !node.result_wrote) return {};
  SpecGroup& group = graph_.group(*node.group);
  const bool wrote = *node.result_wrote;

  if (node.kind == TaskKind::Speculative) {
    switch (group.speculation) {
      case SpeculationOutcome::Succeeded: apply_report(group, *node.twin_of, wrote); break;
      case SpeculationOutcome::Pending: group.deferred_reports.emplace_back(*node.twin_of, wrote); break;
      default: break;  // wasted run; the original is the reporter
    }
  } else if (!node.twin || group.speculation == SpeculationOutcome::Failed) {
    apply_report(group, id, wrote);
  }
  return since(mark);
}

std::vector<ActivationChange> SpecEngine::resolve_uncertain_completion(GroupId id, TaskId task, bool wrote) {
  const std::size_t mark = history_.size();
  SpecGroup& group = graph_.group(id);
  if (std::find(group.uncertain_tasks.begin(), group.uncertain_tasks.end(), task) == group.uncertain_tasks.end()) {
    throw std::invalid_argument("task is not an uncertain task of the group");
  }
  apply_report(group, task, wrote);
  return since(mark);
}

std::vector<GroupId> SpecEngine::propagate_to_successors(GroupId id) {
  SpecGroup& root = graph_.group(id);
  if (!root.failed) throw std::logic_error("propagate_to_successors on a group that has not failed");
  std::vector<GroupId> visited{id};
  std::vector<GroupId> stack(root.successors.rbegin(), root.successors.rend());
  while (!stack.empty()) {
    const GroupId g = stack.back();
    stack.pop_back();
    if (std::find(visited.begin(), visited.end(), g) != visited.end()) continue;
    visited.push_back(g);
    SpecGroup& group = graph_.group(g);
    fail_speculation(group);
    for (auto it = group.successors.rbegin(); it != group.successors.rend(); ++it) stack.push_back(*it);
  }
  return visited;
}

DisableResult SpecEngine::try_disable(TaskId id) {
  TaskNode& node = graph_.node(id);
  const GroupId group = node.group.value_or(GroupId{});
  if (node.exec == ExecState::Running || node.exec == ExecState::Done) {
    if (node.activation != Activation::Disabled) {
      if (node.exec == ExecState::Running) ++too_late_;
      history_.push_back({id, node.activation, Activation::Disabled, true, group});
    }
    return DisableResult::TooLate;
  }
  if (node.activation != Activation::Disabled) {
    history_.push_back({id, node.activation, Activation::Disabled, false, group});
    node.activation = Activation::Disabled;
  }
  return DisableResult::Disabled;
}

std::vector<ActivationChange> SpecEngine::take_changes() {
  std::vector<ActivationChange> out(history_.begin() + static_cast<std::ptrdiff_t>(taken_), history_.end());
  taken_ = history_.size();
  return out;
}

void SpecEngine::enable(TaskId id) {
  TaskNode& node = graph_.node(id);
  if (node.activation != Activation::Undefined) return;
  history_.push_back({id, Activation::Undefined, Activation::Enabled, false, node.group.value_or(GroupId{})});
  node.activation = Activation::Enabled;
}

void SpecEngine::disable(TaskId id) { try_disable(id); }

void SpecEngine::apply_report(SpecGroup& group, TaskId uncertain, bool wrote) {
  if (std::find(group.reported.begin(), group.reported.end(), uncertain) != group.reported.end()) return;
  group.reported.push_back(uncertain);
  if (wrote) {
    mark_failed(group);
  } else {
    try_mark_clean(group);
  }
}

void SpecEngine::mark_failed(SpecGroup& group) {
  if (group.failed) return;
  group.failed = true;
  group.clean = false;
  propagate_to_successors(group.id);
}

void SpecEngine::fail_speculation(SpecGroup& group) {
  if (group.speculation == SpeculationOutcome::Pending) {
    group.speculation = SpeculationOutcome::Failed;
    group.deferred_reports.clear();
    for (TaskId t : group.twins) disable(t);
    for (TaskId t : group.copies) disable(t);
    for (TaskId t : group.selects) disable(t);
    for (TaskId t : group.originals) enable(t);
  } else if (group.speculation == SpeculationOutcome::NotApplicable && group.state != Activation::Enabled) {
    for (TaskId t : group.copies) disable(t);
  }
  if (group.state == Activation::Undefined) group.state = Activation::Disabled;
  if (!group.failed) {
    group.failed = true;
    group.clean = false;
    for (GroupId s : group.successors) fail_speculation(graph_.group(s));
  }
}

void SpecEngine::try_succeed(SpecGroup& group) {
  if (group.speculation != SpeculationOutcome::Pending || group.failed || group.state != Activation::Enabled) return;
  const bool parents_clean = std::all_of(group.parents.begin(), group.parents.end(),
                                         [&](GroupId p) { return graph_.group(p).clean; });
  if (!parents_clean) return;
  group.speculation = SpeculationOutcome::Succeeded;
  for (TaskId t : group.originals) disable(t);
  for (TaskId t : group.selects) enable(t);
  auto deferred = std::move(group.deferred_reports);
  group.deferred_reports.clear();
  for (const auto& [task, wrote] : deferred) apply_report(group, task, wrote);
  try_mark_clean(group);
}

void SpecEngine::try_mark_clean(SpecGroup& group) {
  if (group.clean || group.failed || group.state != Activation::Enabled) return;
  if (group.speculation != SpeculationOutcome::NotApplicable && group.speculation != SpeculationOutcome::Succeeded) {
    return;
  }
  if (group.reported.size() != group.uncertain_tasks.size()) return;
  group.clean = true;
  for (GroupId s : group.successors) try_succeed(graph_.group(s));
}

std::vector<ActivationChange> SpecEngine::since(std::size_t mark) const {
  return {history_.begin() + static_cast<std::ptrdiff_t>(mark), history_.end()};
}

}  // namespace specflow
