#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "specflow/access.hpp"
#include "specflow/data_registry.hpp"
#include "specflow/graph_builder.hpp"
#include "specflow/ready_queue.hpp"
#include "specflow/spec_engine.hpp"
#include "specflow/task.hpp"
#include "specflow/task_graph.hpp"
#include "specflow/trace.hpp"

namespace specflow {

/// Worker count from SPECFLOW_NUM_THREADS, else the hardware concurrency (at least 1).
[[nodiscard]] std::size_t default_worker_count();

struct RuntimeOptions {
  /// 0 selects default_worker_count().
  std::size_t workers = 0;
  ActivationPolicy policy = always_enable();
  QueuePolicy queue = QueuePolicy::Fifo;
};

struct RuntimeStats {
  std::size_t tasks_run = 0;
  std::size_t tasks_skipped = 0;
  /// Speculative twins that ran although their speculation failed.
  std::size_t tasks_wasted = 0;
  std::size_t disables_too_late = 0;
};

enum class TaskStatus { Done, Skipped, Failed };

struct TaskResult {
  TaskStatus status = TaskStatus::Done;
  /// Set for tasks that report whether they wrote.
  std::optional<bool> wrote;
};

/// Typed view of a registered datum.
template <class T>
class Handle {
 public:
  Handle() = default;
  explicit Handle(DataHandle raw) : raw_(raw) {}
  [[nodiscard]] DataHandle raw() const { return raw_; }
  operator DataHandle() const { return raw_; }  // NOLINT(google-explicit-constructor)

 private:
  DataHandle raw_;
};

template <class T, AccessMode Mode>
struct TypedAccess {
  DataHandle handle;
  using value_type = std::conditional_t<Mode == AccessMode::Read, const T, T>;
  operator AccessRecord() const { return {handle, Mode}; }  // NOLINT(google-explicit-constructor)
};

template <class T>
[[nodiscard]] TypedAccess<T, AccessMode::Read> read(Handle<T> h) { return {h.raw()}; }
template <class T>
[[nodiscard]] TypedAccess<T, AccessMode::Write> write(Handle<T> h) { return {h.raw()}; }
template <class T>
[[nodiscard]] TypedAccess<T, AccessMode::MaybeWrite> maybe_write(Handle<T> h) { return {h.raw()}; }
template <class T>
[[nodiscard]] TypedAccess<T, AccessMode::AtomicWrite> atomic_write(Handle<T> h) { return {h.raw()}; }
template <class T>
[[nodiscard]] TypedAccess<T, AccessMode::Commute> commute(Handle<T> h) { return {h.raw()}; }

/// Speculative STF runtime: a worker pool executing the graph built by
/// successive insertions from one thread.
class Runtime {
 public:
  explicit Runtime(RuntimeOptions options = {});
  explicit Runtime(std::size_t workers) : Runtime(RuntimeOptions{.workers = workers}) {}
  ~Runtime();

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  template <class T>
  Handle<T> register_data(T& object, std::string name = {}) {
    return Handle<T>(register_raw(&object, &object, make_data_ops<T>(), std::move(name)));
  }
  DataHandle register_raw(const void* identity, void* storage, DataOps ops, std::string name = {});

  InsertionReceipt insert_task(std::vector<AccessRecord> accesses, TaskBody body, TaskOptions options = {});
  InsertionReceipt insert_uncertain_task(std::vector<AccessRecord> accesses, TaskBody body,
                                         TaskOptions options = {});

  /// `task([options,] accesses..., fn)`: `fn` receives one reference per access,
  /// const for reads.
  template <class... Args>
  InsertionReceipt task(Args&&... args) {
    return typed_insert<false>(std::forward<Args>(args)...);
  }

  /// Same as task() for uncertain tasks; `fn` returns whether it wrote.
  template <class... Args>
  InsertionReceipt potential_task(Args&&... args) {
    return typed_insert<true>(std::forward<Args>(args)...);
  }

  /// Blocks until every inserted task completed or was skipped. Throws
  /// TaskFailure if a body threw.
  void wait_all();
  /// Blocks until at most `remaining` tasks are unfinished.
  void wait_remain(std::size_t remaining);
  TaskResult wait_task(TaskId task);
  /// Result of the logical task: the main task if it ran, else its twin.
  TaskResult wait(const InsertionReceipt& receipt);

  /// Discards graph, data registrations, statistics and trace. Waits for idleness first.
  void reset();

  void set_activation_policy(ActivationPolicy policy);

  [[nodiscard]] std::size_t worker_count() const { return workers_.size(); }
  [[nodiscard]] RuntimeStats stats() const;
  /// Execution records ordered by start time.
  [[nodiscard]] std::vector<TraceRecord> trace() const;
  [[nodiscard]] std::vector<ActivationChange> activation_log() const;
  [[nodiscard]] std::string generate_dot() const;

  /// Direct access; only meaningful while no task is running.
  [[nodiscard]] const TaskGraph& graph() const { return *graph_; }
  [[nodiscard]] const DataRegistry& registry() const { return *registry_; }

 private:
  template <bool Uncertain, class First, class... Rest>
  InsertionReceipt typed_insert(First&& first, Rest&&... rest) {
    if constexpr (std::is_same_v<std::remove_cvref_t<First>, TaskOptions>) {
      return split_insert<Uncertain>(TaskOptions(first), std::forward_as_tuple(rest...),
                                     std::make_index_sequence<sizeof...(Rest) - 1>{});
    } else {
      return split_insert<Uncertain>(TaskOptions{}, std::forward_as_tuple(first, rest...),
                                     std::make_index_sequence<sizeof...(Rest)>{});
    }
  }

  template <bool Uncertain, class Tuple, std::size_t... I>
  InsertionReceipt split_insert(TaskOptions options, Tuple&& args, std::index_sequence<I...>) {
    constexpr std::size_t n = sizeof...(I);
    auto fn = std::get<n>(args);
    auto accesses = std::make_tuple(std::get<I>(args)...);
    std::vector<AccessRecord> records{AccessRecord(std::get<I>(args))...};
    TaskBody body = [fn = std::move(fn), accesses](TaskContext& ctx) mutable -> bool {
      return std::apply(
          [&](const auto&... a) -> bool {
            using Result = decltype(fn(ctx.template get<typename std::remove_cvref_t<decltype(a)>::value_type>(
                a.handle)...));
            if constexpr (std::is_void_v<Result>) {
              fn(ctx.template get<typename std::remove_cvref_t<decltype(a)>::value_type>(a.handle)...);
              return false;
            } else {
              return static_cast<bool>(
                  fn(ctx.template get<typename std::remove_cvref_t<decltype(a)>::value_type>(a.handle)...));
            }
          },
          accesses);
    };
    if constexpr (Uncertain) {
      return insert_uncertain_task(std::move(records), std::move(body), std::move(options));
    } else {
      return insert_task(std::move(records), std::move(body), std::move(options));
    }
  }

  InsertionReceipt after_insertion(InsertionReceipt receipt, std::size_t first_new);
  void worker_loop(std::size_t worker);
  void on_ready(TaskNode& node);
  void finish(TaskNode& node);
  void pump();
  bool eligible(const TaskNode& node) const;
  void rebuild();
  [[nodiscard]] std::int64_t now_ns() const;
  void throw_if_failed();

  RuntimeOptions options_;
  std::unique_ptr<TaskGraph> graph_;
  std::unique_ptr<DataRegistry> registry_;
  std::unique_ptr<SpecEngine> engine_;
  std::unique_ptr<GraphBuilder> builder_;

  mutable std::mutex mutex_;
  std::condition_variable work_cv_;
  std::condition_variable done_cv_;
  ReadyQueue queue_;
  std::vector<TaskId> skip_list_;
  std::vector<const DataRecord*> held_tokens_;
  std::size_t unfinished_ = 0;
  std::size_t running_ = 0;
  bool stop_ = false;
  std::optional<std::pair<TaskId, std::string>> failure_;
  std::size_t tasks_run_ = 0;
  std::size_t tasks_skipped_ = 0;
  std::vector<std::vector<TraceRecord>> traces_;
  std::vector<ActivationChange> changes_;
  std::chrono::steady_clock::time_point epoch_;

  std::vector<std::thread> workers_;
};

}  // namespace specflow
