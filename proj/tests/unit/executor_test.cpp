#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <future>
#include <thread>

#include "specflow/errors.hpp"
#include "specflow/runtime.hpp"

namespace {

using namespace std::chrono_literals;
using specflow::Runtime;
using specflow::TaskStatus;

const specflow::TraceRecord& find(const std::vector<specflow::TraceRecord>& trace, const std::string& label) {
  for (const auto& r : trace) {
    if (r.label == label) return r;
  }
  throw std::runtime_error("no trace record for " + label);
}

bool ran(const std::vector<specflow::TraceRecord>& trace, const std::string& label) {
  return std::any_of(trace.begin(), trace.end(), [&](const auto& r) { return r.label == label; });
}

TEST(Executor, EmptyWaitReturns) {
  Runtime rt(2);
  rt.wait_all();
  rt.wait_remain(0);
  EXPECT_EQ(rt.stats().tasks_run, 0U);
}

TEST(Executor, WorkerCountFromEnvironment) {
  ::setenv("SPECFLOW_NUM_THREADS", "3", 1);
  EXPECT_EQ(specflow::default_worker_count(), 3U);
  Runtime rt;
  EXPECT_EQ(rt.worker_count(), 3U);
  ::unsetenv("SPECFLOW_NUM_THREADS");
  EXPECT_GE(specflow::default_worker_count(), 1U);
}

TEST(Executor, UnusedSpeculationStillGivesSequentialResult) {
  Runtime rt(1);
  int x = 1;
  const auto hx = rt.register_data(x, "x");
  std::promise<void> gate;
  auto opened = gate.get_future().share();
  rt.task(specflow::TaskOptions{"A", {}}, specflow::write(hx), [opened](int& v) {
    opened.wait();
    v += 1;
  });
  const auto b = rt.potential_task(specflow::TaskOptions{"B", {}}, specflow::maybe_write(hx),
                                   [](int& v) { return v < 0; });
  const auto c = rt.task(specflow::TaskOptions{"C", {}}, specflow::write(hx), [](int& v) { v *= 10; });
  rt.task(specflow::TaskOptions{"D", {}}, specflow::write(hx), [](int& v) { v += 3; });
  gate.set_value();
  rt.wait_all();

  EXPECT_EQ(x, 23);
  EXPECT_EQ(rt.wait(b).wrote, std::optional<bool>(false));
  EXPECT_EQ(rt.wait_task(c.main_task).status, TaskStatus::Skipped);
  EXPECT_EQ(rt.wait(c).status, TaskStatus::Done);
  EXPECT_EQ(rt.wait_task(c.selects[0]).status, TaskStatus::Done);

  const auto trace = rt.trace();
  EXPECT_FALSE(ran(trace, "C"));
  EXPECT_TRUE(ran(trace, "C'"));
  // One worker: no two records overlap.
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i - 1].end_ns, trace[i].start_ns);
  EXPECT_EQ(rt.stats().tasks_skipped, 1U);
}

TEST(Executor, WriteDiscardsSpeculativeResult) {
  Runtime rt(1);
  int x = 1;
  const auto hx = rt.register_data(x, "x");
  rt.potential_task(specflow::maybe_write(hx), [](int& v) {
    v = 7;
    return true;
  });
  const auto c = rt.task(specflow::write(hx), [](int& v) { v *= 10; });
  rt.wait_all();
  EXPECT_EQ(x, 70);
  EXPECT_EQ(rt.wait_task(c.main_task).status, TaskStatus::Done);
  EXPECT_EQ(rt.wait_task(c.selects[0]).status, TaskStatus::Skipped);
}

TEST(Executor, TwinOverlapsUncertainTask) {
  Runtime rt(2);
  int x = 0;
  const auto hx = rt.register_data(x, "x");
  rt.potential_task(specflow::TaskOptions{"B", {}}, specflow::maybe_write(hx), [](int&) {
    std::this_thread::sleep_for(60ms);
    return false;
  });
  rt.task(specflow::TaskOptions{"C", {}}, specflow::write(hx), [](int& v) {
    std::this_thread::sleep_for(60ms);
    v = 5;
  });
  rt.wait_all();
  EXPECT_EQ(x, 5);
  const auto trace = rt.trace();
  const auto& b = find(trace, "B");
  const auto& twin = find(trace, "C'");
  EXPECT_LT(twin.start_ns, b.end_ns);
  EXPECT_LT(b.start_ns, twin.end_ns);
  EXPECT_NE(b.worker, twin.worker);
}

TEST(Executor, DisableArrivingWhileTwinRuns) {
  Runtime rt(2);
  int x = 1;
  const auto hx = rt.register_data(x, "x");
  rt.potential_task(specflow::maybe_write(hx), [](int& v) {
    std::this_thread::sleep_for(20ms);
    v = 2;
    return true;
  });
  rt.task(specflow::write(hx), [](int& v) {
    std::this_thread::sleep_for(150ms);
    v += 40;
  });
  rt.wait_all();
  EXPECT_EQ(x, 42);
  const auto s = rt.stats();
  EXPECT_EQ(s.disables_too_late, 1U);
  EXPECT_EQ(s.tasks_wasted, 1U);
  const auto log = rt.activation_log();
  EXPECT_TRUE(std::any_of(log.begin(), log.end(), [](const auto& c) { return c.too_late; }));
}

TEST(Executor, WaitRemainAndWaitTask) {
  Runtime rt(1);
  int x = 0;
  const auto hx = rt.register_data(x);
  std::vector<specflow::InsertionReceipt> receipts;
  for (int i = 0; i < 5; ++i) receipts.push_back(rt.task(specflow::write(hx), [](int& v) { ++v; }));
  rt.wait_remain(2);
  EXPECT_GE(x, 3);
  EXPECT_EQ(rt.wait_task(receipts[4].main_task).status, TaskStatus::Done);
  EXPECT_EQ(x, 5);
}

TEST(Executor, BodyExceptionBecomesTaskFailure) {
  Runtime rt(2);
  int x = 0;
  const auto hx = rt.register_data(x);
  const auto bad = rt.task(specflow::write(hx), [](int&) { throw std::runtime_error("boom"); });
  const auto after = rt.task(specflow::write(hx), [](int& v) { v = 1; });
  try {
    rt.wait_all();
    FAIL() << "expected TaskFailure";
  } catch (const specflow::TaskFailure& e) {
    EXPECT_EQ(e.task(), bad.main_task);
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
  EXPECT_EQ(rt.wait_task(bad.main_task).status, TaskStatus::Failed);
  EXPECT_EQ(rt.wait_task(after.main_task).status, TaskStatus::Skipped);
  EXPECT_EQ(x, 0);

  rt.reset();
  int y = 0;
  const auto hy = rt.register_data(y);
  rt.task(specflow::write(hy), [](int& v) { v = 9; });
  rt.wait_all();
  EXPECT_EQ(y, 9);
}

TEST(Executor, TypedAccessors) {
  Runtime rt(2);
  std::vector<double> values{1.0, 2.0, 3.0};
  double sum = 0;
  const auto hv = rt.register_data(values, "values");
  const auto hs = rt.register_data(sum, "sum");
  static_assert(std::is_same_v<decltype(specflow::read(hv))::value_type, const std::vector<double>>);
  rt.task(specflow::read(hv), specflow::write(hs), [](const std::vector<double>& v, double& s) {
    for (double d : v) s += d;
  });
  rt.wait_all();
  EXPECT_DOUBLE_EQ(sum, 6.0);
  EXPECT_THROW(rt.register_data(sum), specflow::DuplicateRegistration);
}

TEST(Executor, CommutingTasksNeverOverlap) {
  Runtime rt(4);
  int counter = 0;
  std::atomic<int> inside{0};
  std::atomic<int> worst{0};
  const auto hc = rt.register_data(counter);
  for (int i = 0; i < 12; ++i) {
    rt.task(specflow::commute(hc), [&](int& c) {
      const int now = ++inside;
      worst = std::max(worst.load(), now);
      std::this_thread::sleep_for(2ms);
      ++c;
      --inside;
    });
  }
  rt.wait_all();
  EXPECT_EQ(counter, 12);
  EXPECT_EQ(worst.load(), 1);
}

TEST(Executor, AtomicWritersMayOverlap) {
  Runtime rt(2);
  std::atomic<int> total{0};
  int anchor = 0;
  const auto ha = rt.register_data(anchor);
  std::atomic<int> inside{0};
  std::atomic<int> worst{0};
  for (int i = 0; i < 4; ++i) {
    rt.task(specflow::atomic_write(ha), [&](int&) {
      const int now = ++inside;
      worst = std::max(worst.load(), now);
      std::this_thread::sleep_for(30ms);
      ++total;
      --inside;
    });
  }
  rt.wait_all();
  EXPECT_EQ(total.load(), 4);
  EXPECT_EQ(worst.load(), 2);
}

TEST(Executor, LifoQueueRunsLatestReadyFirst) {
  Runtime rt(specflow::RuntimeOptions{.workers = 1, .queue = specflow::QueuePolicy::Lifo});
  std::vector<int> data(4);
  std::vector<int> order;
  std::promise<void> gate;
  auto opened = gate.get_future().share();
  int g = 0;
  const auto hg = rt.register_data(g);
  rt.task(specflow::write(hg), [opened](int&) { opened.wait(); });
  for (int i = 0; i < 4; ++i) {
    const auto h = rt.register_data(data[static_cast<std::size_t>(i)]);
    rt.task(specflow::read(hg), specflow::write(h), [&order, i](const int&, int&) { order.push_back(i); });
  }
  gate.set_value();
  rt.wait_all();
  EXPECT_EQ(order, (std::vector<int>{3, 2, 1, 0}));
}

TEST(Executor, NeverEnableRunsOnlyTheNormalPath) {
  Runtime rt(specflow::RuntimeOptions{.workers = 2, .policy = specflow::never_enable()});
  int x = 3;
  const auto hx = rt.register_data(x);
  rt.potential_task(specflow::maybe_write(hx), [](int&) { return false; });
  rt.task(specflow::write(hx), [](int& v) { v *= 2; });
  rt.wait_all();
  EXPECT_EQ(x, 6);
  for (const auto& r : rt.trace()) EXPECT_NE(r.kind, specflow::TaskKind::Speculative);
}

}  // namespace
