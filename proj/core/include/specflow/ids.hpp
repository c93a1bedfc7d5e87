#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>

namespace specflow {

/// Index-based identifier that cannot be mixed up with identifiers of other entities.
template <class Tag>
class StrongId {
 public:
  using value_type = std::uint32_t;

  constexpr StrongId() = default;
  constexpr explicit StrongId(value_type value) : value_(value) {}

  [[nodiscard]] constexpr value_type value() const { return value_; }
  [[nodiscard]] constexpr bool valid() const { return value_ != kInvalid; }

  friend constexpr auto operator<=>(StrongId, StrongId) = default;

  friend std::ostream& operator<<(std::ostream& os, StrongId id) { return os << id.value_; }

 private:
  static constexpr value_type kInvalid = std::numeric_limits<value_type>::max();
  value_type value_ = kInvalid;
};

struct TaskTag {};
struct DataTag {};
struct GroupTag {};

using TaskId = StrongId<TaskTag>;
using DataId = StrongId<DataTag>;
using GroupId = StrongId<GroupTag>;

}  // namespace specflow

template <class Tag>
struct std::hash<specflow::StrongId<Tag>> {
  std::size_t operator()(specflow::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value());
  }
};
