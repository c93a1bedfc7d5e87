#include "specflow/runtime.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>

namespace specflow {

std::size_t default_worker_count() {
  if (const char* env = std::getenv("SPECFLOW_NUM_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
      // fall through to the hardware value
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Runtime::Runtime(RuntimeOptions options) : options_(std::move(options)), queue_(options_.queue) {
  if (options_.workers == 0) options_.workers = default_worker_count();
  rebuild();
  traces_.resize(options_.workers);
  workers_.reserve(options_.workers);
  for (std::size_t w = 0; w < options_.workers; ++w) workers_.emplace_back([this, w] { worker_loop(w); });
}

Runtime::~Runtime() {
  {
    std::unique_lock lock(mutex_);
    done_cv_.wait(lock, [&] { return unfinished_ == 0; });
    stop_ = true;
  }
  work_cv_.notify_all();
  for (std::thread& t : workers_) t.join();
}

void Runtime::rebuild() {
  graph_ = std::make_unique<TaskGraph>();
  registry_ = std::make_unique<DataRegistry>();
  engine_ = std::make_unique<SpecEngine>(*graph_, options_.policy);
  builder_ = std::make_unique<GraphBuilder>(*graph_, *registry_, *engine_);
  epoch_ = std::chrono::steady_clock::now();
}

std::int64_t Runtime::now_ns() const {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - epoch_).count();
}

DataHandle Runtime::register_raw(const void* identity, void* storage, DataOps ops, std::string name) {
  std::lock_guard lock(mutex_);
  return registry_->register_data(identity, storage, std::move(ops), std::move(name));
}

InsertionReceipt Runtime::insert_task(std::vector<AccessRecord> accesses, TaskBody body, TaskOptions options) {
  std::lock_guard lock(mutex_);
  const std::size_t first = graph_->size();
  return after_insertion(builder_->insert_task(std::move(accesses), std::move(body), std::move(options)), first);
}

InsertionReceipt Runtime::insert_uncertain_task(std::vector<AccessRecord> accesses, TaskBody body,
                                                TaskOptions options) {
  std::lock_guard lock(mutex_);
  const std::size_t first = graph_->size();
  return after_insertion(builder_->insert_uncertain_task(std::move(accesses), std::move(body), std::move(options)),
                         first);
}

InsertionReceipt Runtime::after_insertion(InsertionReceipt receipt, std::size_t first_new) {
  const std::size_t end = graph_->size();
  unfinished_ += end - first_new;
  for (std::size_t i = first_new; i < end; ++i) {
    TaskNode& node = graph_->node(TaskId{static_cast<TaskId::value_type>(i)});
    node.unfinished_predecessors = static_cast<std::size_t>(
        std::count_if(node.predecessors.begin(), node.predecessors.end(),
                      [&](TaskId p) { return graph_->node(p).exec != ExecState::Done; }));
    if (node.unfinished_predecessors == 0) on_ready(node);
  }
  pump();
  return receipt;
}

void Runtime::on_ready(TaskNode& node) {
  node.exec = ExecState::Ready;
  if (failure_) {
    skip_list_.push_back(node.id);
    return;
  }
  if (node.activation == Activation::Undefined && node.group &&
      (node.kind == TaskKind::Copy || node.kind == TaskKind::Speculative)) {
    SpecGroup& group = graph_->group(*node.group);
    if (group.state == Activation::Undefined) {
      engine_->decide_activation(group.id, ActivationStats{queue_.size(), workers_.size(), group.task_count()});
    }
  }
  switch (node.activation) {
    case Activation::Enabled:
      node.queued = true;
      queue_.push(node.id);
      work_cv_.notify_one();
      break;
    case Activation::Disabled: skip_list_.push_back(node.id); break;
    case Activation::Undefined: break;  // parked until its group resolves
  }
}

void Runtime::pump() {
  for (;;) {
    for (const ActivationChange& change : engine_->take_changes()) {
      changes_.push_back(change);
      TaskNode& node = graph_->node(change.task);
      if (node.exec != ExecState::Ready || node.queued) continue;
      if (node.activation == Activation::Enabled) {
        node.queued = true;
        queue_.push(node.id);
        work_cv_.notify_one();
      } else if (node.activation == Activation::Disabled) {
        skip_list_.push_back(node.id);
      }
    }
    if (skip_list_.empty()) break;
    const TaskId id = skip_list_.back();
    skip_list_.pop_back();
    TaskNode& node = graph_->node(id);
    if (node.exec == ExecState::Done) continue;
    node.skipped = true;
    ++tasks_skipped_;
    finish(node);
  }
  if (unfinished_ == 0) done_cv_.notify_all();
}

void Runtime::finish(TaskNode& node) {
  node.exec = ExecState::Done;
  node.queued = false;
  --unfinished_;
  for (TaskId s : node.successors) {
    TaskNode& succ = graph_->node(s);
    if (--succ.unfinished_predecessors == 0) on_ready(succ);
  }
  if (!node.skipped) engine_->on_task_completed(node.id);
  done_cv_.notify_all();
}

bool Runtime::eligible(const TaskNode& node) const {
  if (node.activation == Activation::Disabled) return true;
  for (std::size_t i = 0; i < node.accesses.size(); ++i) {
    if (node.accesses[i].mode != AccessMode::Commute) continue;
    if (std::find(held_tokens_.begin(), held_tokens_.end(), node.bound[i]) != held_tokens_.end()) return false;
  }
  return true;
}

void Runtime::worker_loop(std::size_t worker) {
  std::unique_lock lock(mutex_);
  for (;;) {
    std::optional<TaskId> picked;
    work_cv_.wait(lock, [&] {
      if (stop_) return true;
      picked = queue_.take_first([&](TaskId t) { return eligible(graph_->node(t)); });
      return picked.has_value();
    });
    if (!picked) return;

    TaskNode& node = graph_->node(*picked);
    node.queued = false;
    if (node.activation == Activation::Disabled || failure_) {
      node.skipped = true;
      ++tasks_skipped_;
      finish(node);
      pump();
      continue;
    }

    std::vector<const DataRecord*> tokens;
    std::vector<ContextBinding> bindings;
    bindings.reserve(node.accesses.size());
    for (std::size_t i = 0; i < node.accesses.size(); ++i) {
      const DataRecord* rec = node.bound[i];
      if (node.accesses[i].mode == AccessMode::Commute) tokens.push_back(rec);
      bindings.push_back(ContextBinding{node.logical[i], rec->address(), rec->ops().type, node.accesses[i].mode});
    }
    held_tokens_.insert(held_tokens_.end(), tokens.begin(), tokens.end());
    node.exec = ExecState::Running;
    ++running_;
    TaskBody& body = node.body;
    const bool speculative = node.kind == TaskKind::Speculative;
    lock.unlock();

    const std::int64_t start = now_ns();
    bool wrote = false;
    std::optional<std::string> error;
    try {
      TaskContext ctx(*picked, bindings, worker, speculative);
      wrote = body(ctx);
    } catch (const std::exception& e) {
      error = e.what();
    } catch (...) {
      error = "unknown exception";
    }
    const std::int64_t end = now_ns();

    lock.lock();
    --running_;
    for (const DataRecord* t : tokens) {
      held_tokens_.erase(std::find(held_tokens_.begin(), held_tokens_.end(), t));
    }
    if (!tokens.empty()) work_cv_.notify_all();
    ++tasks_run_;
    if (error) {
      node.failed = true;
      wrote = true;
      if (!failure_) {
        failure_.emplace(node.id, "task '" + node.label + "' failed: " + *error);
        // Drain: parked tasks may wait on groups that will never resolve now.
        for (std::size_t i = 0; i < graph_->size(); ++i) {
          TaskNode& other = graph_->node(TaskId{static_cast<TaskId::value_type>(i)});
          if (other.exec == ExecState::Ready && !other.queued) skip_list_.push_back(other.id);
        }
      }
    }
    if (node.reports_write()) node.result_wrote = wrote;
    traces_[worker].push_back(
        TraceRecord{node.id, worker, start, end, node.kind, node.group, node.label, node.category});
    finish(node);
    pump();
  }
}

void Runtime::throw_if_failed() {
  if (failure_) throw TaskFailure(failure_->first, failure_->second);
}

void Runtime::wait_all() { wait_remain(0); }

void Runtime::wait_remain(std::size_t remaining) {
  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [&] { return unfinished_ <= remaining; });
  throw_if_failed();
}

TaskResult Runtime::wait_task(TaskId task) {
  std::unique_lock lock(mutex_);
  const TaskNode& node = graph_->node(task);
  done_cv_.wait(lock, [&] { return node.exec == ExecState::Done; });
  if (node.failed) return {TaskStatus::Failed, node.result_wrote};
  if (node.skipped) return {TaskStatus::Skipped, std::nullopt};
  return {TaskStatus::Done, node.result_wrote};
}

TaskResult Runtime::wait(const InsertionReceipt& receipt) {
  TaskResult main = wait_task(receipt.main_task);
  if (main.status != TaskStatus::Skipped || !receipt.speculative_twin) return main;
  return wait_task(*receipt.speculative_twin);
}

void Runtime::reset() {
  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [&] { return unfinished_ == 0; });
  queue_.clear();
  skip_list_.clear();
  failure_.reset();
  tasks_run_ = 0;
  tasks_skipped_ = 0;
  for (auto& t : traces_) t.clear();
  changes_.clear();
  rebuild();
}

void Runtime::set_activation_policy(ActivationPolicy policy) {
  std::lock_guard lock(mutex_);
  options_.policy = policy;
  engine_->set_policy(std::move(policy));
}

RuntimeStats Runtime::stats() const {
  std::lock_guard lock(mutex_);
  RuntimeStats s;
  s.tasks_run = tasks_run_;
  s.tasks_skipped = tasks_skipped_;
  s.disables_too_late = engine_->disables_too_late();
  for (std::size_t i = 0; i < graph_->size(); ++i) {
    const TaskNode& n = graph_->node(TaskId{static_cast<TaskId::value_type>(i)});
    if (n.kind != TaskKind::Speculative || n.exec != ExecState::Done || n.skipped) continue;
    if (graph_->group(*n.group).speculation == SpeculationOutcome::Failed) ++s.tasks_wasted;
  }
  return s;
}

std::vector<TraceRecord> Runtime::trace() const {
  std::lock_guard lock(mutex_);
  std::vector<TraceRecord> out;
  for (const auto& per_worker : traces_) out.insert(out.end(), per_worker.begin(), per_worker.end());
  std::stable_sort(out.begin(), out.end(), [](const TraceRecord& a, const TraceRecord& b) {
    return a.start_ns != b.start_ns ? a.start_ns < b.start_ns : a.task < b.task;
  });
  return out;
}

std::vector<ActivationChange> Runtime::activation_log() const {
  std::lock_guard lock(mutex_);
  return changes_;
}

std::string Runtime::generate_dot() const {
  std::lock_guard lock(mutex_);
  return specflow::generate_dot(*graph_);
}

}  // namespace specflow
