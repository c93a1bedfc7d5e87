#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <typeindex>
#include <unordered_map>
#include <vector>

#include "specflow/access.hpp"
#include "specflow/ids.hpp"

namespace specflow {

/// Type-erased capabilities the runtime needs to shadow a datum.
struct DataOps {
  std::type_index type = typeid(void);
  /// Deep copy of `source` into freshly allocated storage.
  std::function<std::shared_ptr<void>(const void* source)> duplicator;
  /// Overwrite `original` with the content of `duplicate`.
  std::function<void(void* original, const void* duplicate)> selector;
};

template <class T>
[[nodiscard]] DataOps make_data_ops() {
  DataOps ops;
  ops.type = typeid(T);
  ops.duplicator = [](const void* source) -> std::shared_ptr<void> {
    return std::make_shared<T>(*static_cast<const T*>(source));
  };
  ops.selector = [](void* original, const void* duplicate) {
    *static_cast<T*>(original) = *static_cast<const T*>(duplicate);
  };
  return ops;
}

/// STF frontier of one datum: the last group of writers and the readers since.
///
/// A "writer group" is a single Write/MaybeWrite task, or a run of Commute
/// (resp. AtomicWrite) tasks that are unordered among themselves. Members of
/// such a run all depend on `group_predecessors`.
struct AccessFrontier {
  std::vector<TaskId> writers;
  AccessMode writer_mode = AccessMode::Write;
  std::vector<TaskId> group_predecessors;
  std::vector<TaskId> readers;
};

/// Everything the runtime knows about one datum (original or shadow).
class DataRecord {
 public:
  DataRecord(DataId id, std::string name, const void* identity, void* storage,
             std::shared_ptr<const DataOps> ops, std::optional<DataId> duplicate_of);

  [[nodiscard]] DataId id() const { return id_; }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const void* identity() const { return identity_; }
  [[nodiscard]] const DataOps& ops() const { return *ops_; }
  [[nodiscard]] const std::shared_ptr<const DataOps>& shared_ops() const { return ops_; }
  [[nodiscard]] std::optional<DataId> duplicate_of() const { return duplicate_of_; }
  [[nodiscard]] bool is_duplicate() const { return duplicate_of_.has_value(); }

  /// Live storage: the user object for originals, the shadow buffer for duplicates
  /// (null until the copy task filled it).
  [[nodiscard]] void* address() const { return is_duplicate() ? shadow_.get() : storage_; }

  /// Executed inside copy tasks: deep-copies `source` into this shadow.
  void fill_from(const DataRecord& source);
  /// Executed inside select tasks: overwrites this original with `duplicate`.
  void select_from(const DataRecord& duplicate);

  AccessFrontier frontier;

 private:
  DataId id_;
  std::string name_;
  const void* identity_;
  void* storage_;
  std::shared_ptr<void> shadow_;
  std::shared_ptr<const DataOps> ops_;
  std::optional<DataId> duplicate_of_;
};

/// Entry of the global duplicates list.
struct DuplicateEntry {
  DataId original;
  DataId duplicate;
  GroupId group;
  bool used_in_read = false;
};

enum class CleanPredicate {
  /// Remove duplicates that speculative tasks already consumed in Read mode.
  ReadConflict,
  Any,
};

/// Registry of user data, their STF access history, and the live duplicates.
///
/// Not synchronized: every mutation happens on the task-insertion thread
/// (the runtime serializes insertion under its scheduler lock).
class DataRegistry {
 public:
  DataRegistry() = default;
  DataRegistry(const DataRegistry&) = delete;
  DataRegistry& operator=(const DataRegistry&) = delete;

  /// Throws DuplicateRegistration if `identity` is already known.
  DataHandle register_data(const void* identity, void* storage, DataOps ops, std::string name = {});

  template <class T>
  DataHandle register_object(T& object, std::string name = {}) {
    return register_data(&object, &object, make_data_ops<T>(), std::move(name));
  }

  [[nodiscard]] bool contains(DataHandle handle) const;
  [[nodiscard]] DataRecord& record(DataHandle handle);
  [[nodiscard]] const DataRecord& record(DataHandle handle) const;
  [[nodiscard]] std::size_t size() const { return records_.size(); }

  /// Computes STF predecessors of `task` and advances the frontiers so the next
  /// resolution sees it. The returned list is sorted and free of duplicates.
  std::vector<TaskId> resolve_dependencies(TaskId task, std::span<const AccessRecord> accesses);

  /// Allocates a shadow handle of `original` without publishing it.
  DataHandle create_shadow(DataHandle original);

  /// Adds `shadow` to the global duplicates list on behalf of `group`.
  /// Throws DuplicateExists if the original already has a live duplicate.
  void publish_duplicate(DataHandle shadow, GroupId group);

  /// create_shadow + publish_duplicate.
  DataHandle duplicate_handle(DataHandle original, GroupId group);

  /// Removes the live duplicates of `originals` matching `predicate`.
  std::vector<DuplicateEntry> clean_duplicates(std::span<const DataHandle> originals, CleanPredicate predicate);

  [[nodiscard]] const DuplicateEntry* live_duplicate(DataHandle original) const;
  void mark_used_in_read(DataHandle original);

  /// Groups owning a live duplicate of any of `originals`, in order of first appearance.
  [[nodiscard]] std::vector<GroupId> find_spec_groups(std::span<const DataHandle> originals) const;

  [[nodiscard]] const std::vector<DuplicateEntry>& duplicates() const { return duplicates_; }

 private:
  std::vector<std::unique_ptr<DataRecord>> records_;
  std::unordered_map<const void*, DataId> by_identity_;
  std::vector<DuplicateEntry> duplicates_;
};

}  // namespace specflow
