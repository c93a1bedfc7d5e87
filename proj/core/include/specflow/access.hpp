#pragma once

#include <string_view>

#include "specflow/ids.hpp"

namespace specflow {

/// How a task touches a datum.
///
/// `MaybeWrite` is reserved to uncertain tasks: the body reports on completion
/// whether it actually modified the datum. `Commute` accesses to one datum are
/// mutually exclusive but unordered among themselves; `AtomicWrite` accesses
/// carry no ordering among themselves and the body is responsible for atomicity.
enum class AccessMode { Read, Write, MaybeWrite, AtomicWrite, Commute };

[[nodiscard]] constexpr std::string_view to_string(AccessMode mode) {
  switch (mode) {
    case AccessMode::Read: return "read";
    case AccessMode::Write: return "write";
    case AccessMode::MaybeWrite: return "maybe-write";
    case AccessMode::AtomicWrite: return "atomic-write";
    case AccessMode::Commute: return "commute";
  }
  return "?";
}

[[nodiscard]] constexpr bool modifies(AccessMode mode) { return mode != AccessMode::Read; }

/// A lightweight, copyable reference to a registered datum.
struct DataHandle {
  DataId id;

  friend constexpr bool operator==(DataHandle, DataHandle) = default;
};

/// One (datum, mode) pair of a task's access list.
struct AccessRecord {
  DataHandle handle;
  AccessMode mode = AccessMode::Read;

  friend constexpr bool operator==(const AccessRecord&, const AccessRecord&) = default;
};

[[nodiscard]] constexpr AccessRecord read(DataHandle h) { return {h, AccessMode::Read}; }
[[nodiscard]] constexpr AccessRecord write(DataHandle h) { return {h, AccessMode::Write}; }
[[nodiscard]] constexpr AccessRecord maybe_write(DataHandle h) { return {h, AccessMode::MaybeWrite}; }
[[nodiscard]] constexpr AccessRecord atomic_write(DataHandle h) { return {h, AccessMode::AtomicWrite}; }
[[nodiscard]] constexpr AccessRecord commute(DataHandle h) { return {h, AccessMode::Commute}; }

}  // namespace specflow
