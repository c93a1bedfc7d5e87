#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <typeindex>
#include <vector>

#include "specflow/access.hpp"
#include "specflow/errors.hpp"
#include "specflow/ids.hpp"

namespace specflow {

class DataRecord;

enum class TaskKind { Normal, Uncertain, Copy, Speculative, Select };
enum class Activation { Undefined, Enabled, Disabled };
enum class ExecState { Pending, Ready, Running, Done };

[[nodiscard]] constexpr std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Normal: return "normal";
    case TaskKind::Uncertain: return "uncertain";
    case TaskKind::Copy: return "copy";
    case TaskKind::Speculative: return "speculative";
    case TaskKind::Select: return "select";
  }
  return "?";
}

[[nodiscard]] constexpr std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Undefined: return "undefined";
    case Activation::Enabled: return "enabled";
    case Activation::Disabled: return "disabled";
  }
  return "?";
}

/// Maps a user-visible handle to the storage a task instance operates on.
struct ContextBinding {
  DataId logical;
  void* address = nullptr;
  std::type_index type = typeid(void);
  AccessMode mode = AccessMode::Read;
};

/// What a task body sees: its declared data, resolved to originals for normal
/// execution or to shadows for speculative execution.
class TaskContext {
 public:
  TaskContext(TaskId task, std::span<const ContextBinding> bindings, std::size_t worker = 0, bool speculative = false)
      : task_(task), bindings_(bindings), worker_(worker), speculative_(speculative) {}

  /// `T` must be const-qualified for Read accesses.
  template <class T>
  [[nodiscard]] T& get(DataHandle handle) const {
    const ContextBinding& b = binding(handle);
    if (b.type != typeid(std::remove_const_t<T>)) throw InvalidAccess("datum accessed with the wrong type");
    if (b.mode == AccessMode::Read && !std::is_const_v<T>) {
      throw InvalidAccess("datum declared in read mode must be accessed as const");
    }
    return *static_cast<T*>(b.address);
  }

  [[nodiscard]] TaskId task() const { return task_; }
  [[nodiscard]] std::size_t worker() const { return worker_; }
  [[nodiscard]] bool speculative() const { return speculative_; }

 private:
  [[nodiscard]] const ContextBinding& binding(DataHandle handle) const {
    for (const ContextBinding& b : bindings_) {
      if (b.logical == handle.id) return b;
    }
    throw InvalidAccess("datum not declared in the task's access list");
  }

  TaskId task_;
  std::span<const ContextBinding> bindings_;
  std::size_t worker_;
  bool speculative_;
};

/// Returns the wrote-flag for uncertain tasks; ignored for the others.
using TaskBody = std::function<bool(TaskContext&)>;

/// Optional presentation data attached at insertion.
struct TaskOptions {
  std::string label;
  /// Free-form class used to color traces (e.g. "init").
  std::string category;
};

/// One vertex of the task graph.
///
/// Structure (kind, accesses, edges, twin links, group) is frozen once the
/// insertion call returns; activation and execution fields are owned by the
/// scheduler.
struct TaskNode {
  TaskId id;
  TaskKind kind = TaskKind::Normal;
  std::string label;
  std::string category;

  /// Handles actually touched (shadows for speculative twins).
  std::vector<AccessRecord> accesses;
  /// User-visible handle of each access (originals), same order as `accesses`.
  std::vector<DataId> logical;
  std::vector<DataRecord*> bound;

  TaskBody body;

  std::vector<TaskId> predecessors;
  std::vector<TaskId> successors;

  Activation activation = Activation::Undefined;
  std::optional<GroupId> group;
  std::optional<TaskId> twin;     // set on the original of a speculated task
  std::optional<TaskId> twin_of;  // set on the speculative twin

  std::optional<bool> result_wrote;

  ExecState exec = ExecState::Pending;
  /// Ready and sitting in the ready queue (as opposed to parked on an Undefined activation).
  bool queued = false;
  std::size_t unfinished_predecessors = 0;
  bool skipped = false;
  bool failed = false;

  [[nodiscard]] bool reports_write() const {
    return kind == TaskKind::Uncertain || (kind == TaskKind::Speculative && speculates_uncertain);
  }
  bool speculates_uncertain = false;
};

}  // namespace specflow
