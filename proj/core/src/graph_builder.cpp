#include "specflow/graph_builder.hpp"

#include <algorithm>
#include <stdexcept>

#include "specflow/errors.hpp"

namespace specflow {

namespace {

std::vector<DataHandle> handles_of(const std::vector<AccessRecord>& accesses, bool modifying_only) {
  std::vector<DataHandle> out;
  for (const AccessRecord& a : accesses) {
    if (!modifying_only || modifies(a.mode)) out.push_back(a.handle);
  }
  return out;
}

std::vector<DataId> ids_of(const std::vector<AccessRecord>& accesses) {
  std::vector<DataId> out;
  out.reserve(accesses.size());
  for (const AccessRecord& a : accesses) out.push_back(a.handle.id);
  return out;
}

}  // namespace

void GraphBuilder::validate(const std::vector<AccessRecord>& accesses, bool uncertain) const {
  bool has_maybe = false;
  for (std::size_t i = 0; i < accesses.size(); ++i) {
    const AccessRecord& a = accesses[i];
    if (!registry_.contains(a.handle)) throw InvalidAccess("unregistered data handle in access list");
    if (registry_.record(a.handle).is_duplicate()) throw InvalidAccess("runtime-internal handle in access list");
    for (std::size_t j = 0; j < i; ++j) {
      if (accesses[j].handle == a.handle) {
        throw InvalidAccess("datum '" + registry_.record(a.handle).name() + "' listed twice in one task");
      }
    }
    has_maybe = has_maybe || a.mode == AccessMode::MaybeWrite;
  }
  if (uncertain && !has_maybe) {
    throw InvalidAccess("uncertain task without maybe-write access; use insert_task");
  }
  if (!uncertain && has_maybe) {
    throw InvalidAccess("maybe-write access on a normal task; use insert_uncertain_task");
  }
}

TaskNode& GraphBuilder::add_task(TaskKind kind, std::string label, std::vector<AccessRecord> accesses,
                                 std::vector<DataId> logical, TaskBody body) {
  TaskNode& node = graph_.add_node(kind, std::move(label));
  node.bound.reserve(accesses.size());
  for (const AccessRecord& a : accesses) node.bound.push_back(&registry_.record(a.handle));
  node.accesses = std::move(accesses);
  node.logical = std::move(logical);
  node.body = std::move(body);
  for (TaskId pred : registry_.resolve_dependencies(node.id, node.accesses)) graph_.add_edge(pred, node.id);
  return node;
}

TaskId GraphBuilder::add_copy(DataHandle source, DataHandle shadow, GroupId group) {
  DataRecord* from = &registry_.record(source);
  DataRecord* to = &registry_.record(shadow);
  TaskNode& node = add_task(TaskKind::Copy, "copy(" + to->name() + ")", {read(source), write(shadow)},
                            {source.id, shadow.id}, [from, to](TaskContext&) {
                              to->fill_from(*from);
                              return false;
                            });
  node.group = group;
  node.category = "runtime";
  graph_.group(group).copies.push_back(node.id);
  return node.id;
}

TaskNode& GraphBuilder::add_twin(TaskNode& original, const std::vector<AccessRecord>& accesses,
                                 const std::vector<DataHandle>& working) {
  std::vector<AccessRecord> shadowed;
  shadowed.reserve(accesses.size());
  for (std::size_t i = 0; i < accesses.size(); ++i) shadowed.push_back({working[i], accesses[i].mode});
  const TaskId original_id = original.id;
  TaskNode& twin = add_task(TaskKind::Speculative, original.label + "'", std::move(shadowed), original.logical,
                            original.body);
  TaskNode& orig = graph_.node(original_id);
  twin.category = orig.category;
  twin.group = orig.group;
  twin.twin_of = original_id;
  twin.speculates_uncertain = orig.kind == TaskKind::Uncertain;
  orig.twin = twin.id;
  graph_.group(*orig.group).twins.push_back(twin.id);
  return twin;
}

std::vector<TaskId> GraphBuilder::build_select_tasks(GroupId group,
                                                     std::span<const std::pair<DataHandle, DataHandle>> pairs) {
  std::vector<TaskId> out;
  for (const auto& [original, duplicate] : pairs) {
    DataRecord* to = &registry_.record(original);
    DataRecord* from = &registry_.record(duplicate);
    if (from->duplicate_of() != original.id) throw std::invalid_argument("select pair is not original/duplicate");
    TaskNode& node = add_task(TaskKind::Select, "select(" + to->name() + ")", {write(original), read(duplicate)},
                              {original.id, duplicate.id}, [to, from](TaskContext&) {
                                to->select_from(*from);
                                return false;
                              });
    node.group = group;
    node.category = "runtime";
    graph_.group(group).selects.push_back(node.id);
    out.push_back(node.id);
  }
  return out;
}

InsertionReceipt GraphBuilder::insert_task(std::vector<AccessRecord> accesses, TaskBody body, TaskOptions options) {
  validate(accesses, false);
  const std::vector<DataHandle> modified = handles_of(accesses, true);
  const std::vector<DataHandle> all = handles_of(accesses, false);
  registry_.clean_duplicates(modified, CleanPredicate::ReadConflict);

  InsertionReceipt receipt;
  const std::vector<GroupId> groups = registry_.find_spec_groups(all);
  const bool known_failed = std::any_of(groups.begin(), groups.end(), [&](GroupId g) {
    const SpecGroup& group = graph_.group(g);
    return group.failed || group.state == Activation::Disabled;
  });

  if (groups.empty() || known_failed) {
    if (known_failed) registry_.clean_duplicates(all, CleanPredicate::Any);
    TaskNode& node = add_task(TaskKind::Normal, std::move(options.label), accesses, ids_of(accesses), std::move(body));
    node.category = std::move(options.category);
    node.activation = Activation::Enabled;
    receipt.main_task = node.id;
    return receipt;
  }

  SpecGroup& group = graph_.add_group();
  const GroupId gid = group.id;
  group.parents = groups;
  group.speculation = SpeculationOutcome::Pending;
  receipt.group = gid;

  // Working handle of every access for the twin.
  std::vector<DataHandle> working;
  working.reserve(accesses.size());
  for (const AccessRecord& a : accesses) {
    const DuplicateEntry* dup = registry_.live_duplicate(a.handle);
    if (a.mode == AccessMode::Read) {
      if (dup != nullptr) {
        working.push_back(DataHandle{dup->duplicate});
        registry_.mark_used_in_read(a.handle);
      } else {
        working.push_back(a.handle);
      }
    } else if (dup != nullptr) {
      working.push_back(DataHandle{dup->duplicate});
    } else {
      const DataHandle shadow = registry_.create_shadow(a.handle);
      receipt.copies.push_back(add_copy(a.handle, shadow, gid));
      working.push_back(shadow);
    }
  }

  TaskNode& node = add_task(TaskKind::Normal, std::move(options.label), accesses, ids_of(accesses), std::move(body));
  node.category = std::move(options.category);
  node.group = gid;
  graph_.group(gid).originals.push_back(node.id);
  graph_.group(gid).main_task = node.id;
  receipt.main_task = node.id;
  receipt.speculative_twin = add_twin(node, accesses, working).id;

  std::vector<std::pair<DataHandle, DataHandle>> pairs;
  for (std::size_t i = 0; i < accesses.size(); ++i) {
    if (modifies(accesses[i].mode)) pairs.emplace_back(accesses[i].handle, working[i]);
  }
  receipt.selects = build_select_tasks(gid, pairs);
  registry_.clean_duplicates(modified, CleanPredicate::Any);
  engine_.link_group(gid);
  return receipt;
}

InsertionReceipt GraphBuilder::insert_uncertain_task(std::vector<AccessRecord> accesses, TaskBody body,
                                                     TaskOptions options) {
  validate(accesses, true);
  const std::vector<DataHandle> modified = handles_of(accesses, true);
  const std::vector<DataHandle> all = handles_of(accesses, false);
  registry_.clean_duplicates(modified, CleanPredicate::ReadConflict);

  InsertionReceipt receipt;
  const std::vector<GroupId> groups = registry_.find_spec_groups(all);
  const bool known_failed = std::any_of(groups.begin(), groups.end(), [&](GroupId g) {
    const SpecGroup& group = graph_.group(g);
    return group.failed || group.state == Activation::Disabled;
  });

  if (groups.empty() || known_failed) {
    // Plain insertion; duplicate the maybe-written data so later tasks can speculate.
    registry_.clean_duplicates(all, CleanPredicate::Any);
    SpecGroup& group = graph_.add_group();
    const GroupId gid = group.id;
    group.speculation = SpeculationOutcome::NotApplicable;
    receipt.group = gid;

    std::vector<DataHandle> shadows;
    for (const AccessRecord& a : accesses) {
      if (a.mode != AccessMode::MaybeWrite) continue;
      const DataHandle shadow = registry_.create_shadow(a.handle);
      receipt.copies.push_back(add_copy(a.handle, shadow, gid));
      shadows.push_back(shadow);
    }
    TaskNode& node =
        add_task(TaskKind::Uncertain, std::move(options.label), accesses, ids_of(accesses), std::move(body));
    node.category = std::move(options.category);
    node.activation = Activation::Enabled;
    node.group = gid;
    graph_.group(gid).uncertain_tasks.push_back(node.id);
    graph_.group(gid).main_task = node.id;
    receipt.main_task = node.id;
    for (DataHandle s : shadows) registry_.publish_duplicate(s, gid);
    engine_.link_group(gid);
    return receipt;
  }

  SpecGroup& group = graph_.add_group();
  const GroupId gid = group.id;
  group.parents = groups;
  group.speculation = SpeculationOutcome::Pending;
  receipt.group = gid;

  std::vector<DataHandle> working;
  working.reserve(accesses.size());
  for (const AccessRecord& a : accesses) {
    const DuplicateEntry* dup = registry_.live_duplicate(a.handle);
    if (a.mode == AccessMode::Read) {
      if (dup != nullptr) {
        working.push_back(DataHandle{dup->duplicate});
        registry_.mark_used_in_read(a.handle);
      } else {
        working.push_back(a.handle);
      }
    } else if (dup != nullptr) {
      working.push_back(DataHandle{dup->duplicate});
    } else {
      const DataHandle shadow = registry_.create_shadow(a.handle);
      receipt.copies.push_back(add_copy(a.handle, shadow, gid));
      working.push_back(shadow);
    }
  }

  // Snapshot of each maybe-written datum as it stands if this task does not write:
  // the duplicate the next speculative tasks will start from.
  std::vector<DataHandle> future;
  for (std::size_t i = 0; i < accesses.size(); ++i) {
    if (accesses[i].mode != AccessMode::MaybeWrite) continue;
    const DataHandle shadow = registry_.create_shadow(working[i]);
    receipt.copies.push_back(add_copy(working[i], shadow, gid));
    future.push_back(shadow);
  }

  TaskNode& node =
      add_task(TaskKind::Uncertain, std::move(options.label), accesses, ids_of(accesses), std::move(body));
  node.category = std::move(options.category);
  node.group = gid;
  graph_.group(gid).uncertain_tasks.push_back(node.id);
  graph_.group(gid).originals.push_back(node.id);
  graph_.group(gid).main_task = node.id;
  receipt.main_task = node.id;
  receipt.speculative_twin = add_twin(node, accesses, working).id;

  std::vector<std::pair<DataHandle, DataHandle>> pairs;
  for (std::size_t i = 0; i < accesses.size(); ++i) {
    if (modifies(accesses[i].mode)) pairs.emplace_back(accesses[i].handle, working[i]);
  }
  receipt.selects = build_select_tasks(gid, pairs);
  registry_.clean_duplicates(modified, CleanPredicate::Any);
  for (DataHandle s : future) registry_.publish_duplicate(s, gid);
  engine_.link_group(gid);
  return receipt;
}

}  // namespace specflow
