#pragma once

#include <stdexcept>
#include <string>

#include "specflow/ids.hpp"

namespace specflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The same datum identity was registered twice.
class DuplicateRegistration : public Error {
 public:
  DuplicateRegistration(DataId existing, const std::string& what) : Error(what), existing_(existing) {}
  [[nodiscard]] DataId existing() const { return existing_; }

 private:
  DataId existing_;
};

/// An access list violates the insertion contract (unknown handle, wrong mode for the task kind, ...).
class InvalidAccess : public Error {
 public:
  using Error::Error;
};

/// A handle already has a live duplicate in the global duplicates list.
class DuplicateExists : public Error {
 public:
  using Error::Error;
};

/// A task body threw; raised from the wait functions once the runtime has drained.
class TaskFailure : public Error {
 public:
  TaskFailure(TaskId task, const std::string& what) : Error(what), task_(task) {}
  [[nodiscard]] TaskId task() const { return task_; }

 private:
  TaskId task_;
};

}  // namespace specflow
