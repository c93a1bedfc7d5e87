#include "specflow/data_registry.hpp"

#include <algorithm>
#include <stdexcept>

#include "specflow/errors.hpp"

namespace specflow {

DataRecord::DataRecord(DataId id, std::string name, const void* identity, void* storage,
                       std::shared_ptr<const DataOps> ops, std::optional<DataId> duplicate_of)
    : id_(id),
      name_(std::move(name)),
      identity_(identity),
      storage_(storage),
      ops_(std::move(ops)),
      duplicate_of_(duplicate_of) {}

void DataRecord::fill_from(const DataRecord& source) {
  const void* from = source.address();
  if (from == nullptr) {
    throw std::logic_error("copy of '" + name_ + "' reads an unfilled shadow '" + source.name() + "'");
  }
  shadow_ = ops_->duplicator(from);
}

void DataRecord::select_from(const DataRecord& duplicate) {
  const void* from = duplicate.address();
  if (from == nullptr) {
    throw std::logic_error("select into '" + name_ + "' reads an unfilled shadow '" + duplicate.name() + "'");
  }
  ops_->selector(storage_, from);
}

DataHandle DataRegistry::register_data(const void* identity, void* storage, DataOps ops, std::string name) {
  if (auto it = by_identity_.find(identity); it != by_identity_.end()) {
    throw DuplicateRegistration(it->second, "datum already registered with id " + std::to_string(it->second.value()));
  }
  const DataId id{static_cast<DataId::value_type>(records_.size())};
  if (name.empty()) name = "d" + std::to_string(id.value());
  records_.push_back(std::make_unique<DataRecord>(id, std::move(name), identity, storage,
                                                  std::make_shared<const DataOps>(std::move(ops)), std::nullopt));
  by_identity_.emplace(identity, id);
  return DataHandle{id};
}

bool DataRegistry::contains(DataHandle handle) const {
  return handle.id.valid() && handle.id.value() < records_.size();
}

DataRecord& DataRegistry::record(DataHandle handle) {
  if (!contains(handle)) throw InvalidAccess("unregistered data handle");
  return *records_[handle.id.value()];
}

const DataRecord& DataRegistry::record(DataHandle handle) const {
  if (!contains(handle)) throw InvalidAccess("unregistered data handle");
  return *records_[handle.id.value()];
}

namespace {

void append(std::vector<TaskId>& out, const std::vector<TaskId>& in) { out.insert(out.end(), in.begin(), in.end()); }

}  // namespace

std::vector<TaskId> DataRegistry::resolve_dependencies(TaskId task, std::span<const AccessRecord> accesses) {
  std::vector<TaskId> preds;
  for (const AccessRecord& access : accesses) {
    AccessFrontier& f = record(access.handle).frontier;
    switch (access.mode) {
      case AccessMode::Read:
        append(preds, f.writers);
        f.readers.push_back(task);
        break;
      case AccessMode::Write:
      case AccessMode::MaybeWrite:
        append(preds, f.readers.empty() ? f.writers : f.readers);
        f.writers.assign(1, task);
        f.writer_mode = AccessMode::Write;
        f.group_predecessors.clear();
        f.readers.clear();
        break;
      case AccessMode::Commute:
      case AccessMode::AtomicWrite:
        if (!f.writers.empty() && f.writer_mode == access.mode && f.readers.empty()) {
          append(preds, f.group_predecessors);
          f.writers.push_back(task);
        } else {
          f.group_predecessors = f.readers.empty() ? f.writers : f.readers;
          append(preds, f.group_predecessors);
          f.writers.assign(1, task);
          f.writer_mode = access.mode;
          f.readers.clear();
        }
        break;
    }
  }
  std::sort(preds.begin(), preds.end());
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
  std::erase(preds, task);
  return preds;
}

DataHandle DataRegistry::create_shadow(DataHandle original) {
  const DataRecord& source = record(original);
  const DataId root = source.duplicate_of().value_or(source.id());
  const DataId id{static_cast<DataId::value_type>(records_.size())};
  records_.push_back(std::make_unique<DataRecord>(id, source.name() + "'", nullptr, nullptr,
                                                  records_[root.value()]->shared_ops(), root));
  return DataHandle{id};
}

void DataRegistry::publish_duplicate(DataHandle shadow, GroupId group) {
  const auto original = record(shadow).duplicate_of();
  if (!original) throw std::invalid_argument("publish_duplicate expects a shadow handle");
  if (live_duplicate(DataHandle{*original}) != nullptr) {
    throw DuplicateExists("datum '" + record(DataHandle{*original}).name() + "' already has a live duplicate");
  }
  duplicates_.push_back(DuplicateEntry{*original, shadow.id, group, false});
}

DataHandle DataRegistry::duplicate_handle(DataHandle original, GroupId group) {
  if (record(original).is_duplicate()) throw std::invalid_argument("cannot duplicate a shadow handle");
  if (live_duplicate(original) != nullptr) {
    throw DuplicateExists("datum '" + record(original).name() + "' already has a live duplicate");
  }
  const DataHandle shadow = create_shadow(original);
  publish_duplicate(shadow, group);
  return shadow;
}

std::vector<DuplicateEntry> DataRegistry::clean_duplicates(std::span<const DataHandle> originals,
                                                           CleanPredicate predicate) {
  std::vector<DuplicateEntry> removed;
  std::erase_if(duplicates_, [&](const DuplicateEntry& entry) {
    const bool named = std::any_of(originals.begin(), originals.end(),
                                   [&](DataHandle h) { return h.id == entry.original; });
    const bool match = named && (predicate == CleanPredicate::Any || entry.used_in_read);
    if (match) removed.push_back(entry);
    return match;
  });
  return removed;
}

const DuplicateEntry* DataRegistry::live_duplicate(DataHandle original) const {
  auto it = std::find_if(duplicates_.begin(), duplicates_.end(),
                         [&](const DuplicateEntry& e) { return e.original == original.id; });
  return it == duplicates_.end() ? nullptr : &*it;
}

void DataRegistry::mark_used_in_read(DataHandle original) {
  for (DuplicateEntry& e : duplicates_) {
    if (e.original == original.id) e.used_in_read = true;
  }
}

std::vector<GroupId> DataRegistry::find_spec_groups(std::span<const DataHandle> originals) const {
  std::vector<GroupId> groups;
  for (DataHandle h : originals) {
    if (const DuplicateEntry* e = live_duplicate(h)) {
      if (std::find(groups.begin(), groups.end(), e->group) == groups.end()) groups.push_back(e->group);
    }
  }
  return groups;
}

}  // namespace specflow
