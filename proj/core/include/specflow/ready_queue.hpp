#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include "specflow/ids.hpp"

namespace specflow {

enum class QueuePolicy { Fifo, Lifo };

/// Ready tasks awaiting a worker. Callers synchronize.
class ReadyQueue {
 public:
  explicit ReadyQueue(QueuePolicy policy = QueuePolicy::Fifo) : policy_(policy) {}

  void push(TaskId task) { tasks_.push_back(task); }

  /// Removes and returns the first task, in policy order, accepted by `eligible`.
  template <class Pred>
  std::optional<TaskId> take_first(Pred&& eligible) {
    if (policy_ == QueuePolicy::Fifo) {
      for (auto it = tasks_.begin(); it != tasks_.end(); ++it) {
        if (eligible(*it)) {
          const TaskId t = *it;
          tasks_.erase(it);
          return t;
        }
      }
    } else {
      for (auto it = tasks_.rbegin(); it != tasks_.rend(); ++it) {
        if (eligible(*it)) {
          const TaskId t = *it;
          tasks_.erase(std::next(it).base());
          return t;
        }
      }
    }
    return std::nullopt;
  }

  [[nodiscard]] std::size_t size() const { return tasks_.size(); }
  [[nodiscard]] bool empty() const { return tasks_.empty(); }
  void clear() { tasks_.clear(); }

 private:
  QueuePolicy policy_;
  std::deque<TaskId> tasks_;
};

}  // namespace specflow
