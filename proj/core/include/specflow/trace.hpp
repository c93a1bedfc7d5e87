#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "specflow/ids.hpp"
#include "specflow/task.hpp"
#include "specflow/task_graph.hpp"

namespace specflow {

/// One executed task body. Skipped (disabled) tasks produce no record.
struct TraceRecord {
  TaskId task;
  std::size_t worker = 0;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  TaskKind kind = TaskKind::Normal;
  std::optional<GroupId> group;
  std::string label;
  std::string category;
};

/// DOT digraph of every node (disabled ones included), sorted by id.
[[nodiscard]] std::string generate_dot(const TaskGraph& graph);

/// CSV timeline: `task_id,worker,start_ns,end_ns,kind,group,label`.
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> records);

/// Self-contained SVG Gantt chart, one row per worker.
[[nodiscard]] std::string render_svg(std::span<const TraceRecord> records);

/// Legend class of a record: "init", "normal", "speculative" or "runtime".
[[nodiscard]] std::string trace_class(const TraceRecord& record);

/// Writes `csv_path` and the SVG next to it (a `.trace.csv` suffix becomes `.svg`).
/// Returns the SVG path.
std::string write_trace_files(const std::string& csv_path, std::span<const TraceRecord> records);

}  // namespace specflow
