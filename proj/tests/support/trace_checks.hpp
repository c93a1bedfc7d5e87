#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "specflow/task_graph.hpp"
#include "specflow/trace.hpp"

namespace testsupport {

/// Executed dependency edges u -> v with end(u) > start(v), as "u->v" strings.
inline std::vector<std::string> timeline_violations(const specflow::TaskGraph& graph,
                                                    const std::vector<specflow::TraceRecord>& trace) {
  std::map<specflow::TaskId, const specflow::TraceRecord*> by_task;
  for (const auto& r : trace) by_task[r.task] = &r;
  std::vector<std::string> bad;
  for (const auto& [id, rec] : by_task) {
    for (specflow::TaskId succ : graph.node(id).successors) {
      auto it = by_task.find(succ);
      if (it != by_task.end() && rec->end_ns > it->second->start_ns) {
        bad.push_back(std::to_string(id.value()) + "->" + std::to_string(succ.value()));
      }
    }
  }
  return bad;
}

/// Records on one worker that overlap.
inline std::size_t worker_overlaps(const std::vector<specflow::TraceRecord>& trace) {
  std::map<std::size_t, std::vector<const specflow::TraceRecord*>> rows;
  for (const auto& r : trace) rows[r.worker].push_back(&r);
  std::size_t n = 0;
  for (auto& [w, row] : rows) {
    std::sort(row.begin(), row.end(), [](auto* a, auto* b) { return a->start_ns < b->start_ns; });
    for (std::size_t i = 1; i < row.size(); ++i) n += row[i - 1]->end_ns > row[i]->start_ns ? 1 : 0;
  }
  return n;
}

}  // namespace testsupport
