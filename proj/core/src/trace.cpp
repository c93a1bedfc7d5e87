#include "specflow/trace.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace specflow {

namespace {

std::string escape_dot(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string escape_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

const char* dot_color(TaskKind kind) {
  switch (kind) {
    case TaskKind::Normal: return "black";
    case TaskKind::Uncertain: return "orange";
    case TaskKind::Copy: return "blue";
    case TaskKind::Speculative: return "red";
    case TaskKind::Select: return "darkgreen";
  }
  return "black";
}

const char* svg_fill(const std::string& cls) {
  if (cls == "init") return "#7f7f7f";
  if (cls == "speculative") return "#d62728";
  if (cls == "runtime") return "#1f77b4";
  return "#2ca02c";
}

}  // namespace

std::string generate_dot(const TaskGraph& graph) {
  std::string out = "digraph {\n";
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const TaskNode& n = graph.node(TaskId{static_cast<TaskId::value_type>(i)});
    out += fmt::format("  t{} [label=\"{}\", kind=\"{}\", activation=\"{}\", color=\"{}\"", i, escape_dot(n.label),
                       to_string(n.kind), to_string(n.activation), dot_color(n.kind));
    if (n.group) out += fmt::format(", group=\"{}\"", n.group->value());
    out += "];\n";
  }
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const TaskNode& n = graph.node(TaskId{static_cast<TaskId::value_type>(i)});
    std::vector<TaskId> succ = n.successors;
    std::sort(succ.begin(), succ.end());
    for (TaskId s : succ) out += fmt::format("  t{} -> t{};\n", i, s.value());
  }
  out += "}\n";
  return out;
}

std::string trace_class(const TraceRecord& record) {
  if (record.kind == TaskKind::Copy || record.kind == TaskKind::Select) return "runtime";
  if (record.category == "init") return "init";
  if (record.kind == TaskKind::Speculative) return "speculative";
  return "normal";
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> records) {
  out << "task_id,worker,start_ns,end_ns,kind,group,label\n";
  for (const TraceRecord& r : records) {
    out << r.task.value() << ',' << r.worker << ',' << r.start_ns << ',' << r.end_ns << ',' << to_string(r.kind)
        << ',';
    if (r.group) out << r.group->value();
    out << ',' << escape_csv(r.label) << '\n';
  }
}

std::string render_svg(std::span<const TraceRecord> records) {
  constexpr double width = 1000.0;
  constexpr double row_height = 24.0;
  constexpr double margin = 60.0;
  std::size_t workers = 1;
  std::int64_t t0 = 0;
  std::int64_t t1 = 1;
  if (!records.empty()) {
    t0 = records.front().start_ns;
    t1 = records.front().end_ns;
    for (const TraceRecord& r : records) {
      workers = std::max(workers, r.worker + 1);
      t0 = std::min(t0, r.start_ns);
      t1 = std::max(t1, r.end_ns);
    }
  }
  const double span_ns = std::max<double>(1.0, static_cast<double>(t1 - t0));
  const double height = margin + row_height * static_cast<double>(workers) + 40.0;

  std::ostringstream svg;
  svg << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"10\">\n",
      width + margin + 20.0, height);
  for (std::size_t w = 0; w < workers; ++w) {
    svg << fmt::format("<text x=\"4\" y=\"{}\">worker {}</text>\n", margin + row_height * (w + 0.65), w);
  }
  for (const TraceRecord& r : records) {
    const double x = margin + width * static_cast<double>(r.start_ns - t0) / span_ns;
    const double w = std::max(0.5, width * static_cast<double>(r.end_ns - r.start_ns) / span_ns);
    const double y = margin + row_height * static_cast<double>(r.worker) + 2.0;
    const std::string cls = trace_class(r);
    svg << fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" class=\"{}\">"
        "<title>{} ({})</title></rect>\n",
        x, y, w, row_height - 4.0, svg_fill(cls), cls, escape_xml(r.label), to_string(r.kind));
  }
  double lx = margin;
  for (const char* cls : {"init", "normal", "speculative", "runtime"}) {
    svg << fmt::format("<rect x=\"{}\" y=\"20\" width=\"12\" height=\"12\" fill=\"{}\"/>", lx, svg_fill(cls));
    svg << fmt::format("<text x=\"{}\" y=\"30\">{}</text>\n", lx + 16.0, cls);
    lx += 110.0;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string write_trace_files(const std::string& csv_path, std::span<const TraceRecord> records) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open trace file '" + csv_path + "'");
  write_trace_csv(csv, records);

  std::string svg_path = csv_path;
  constexpr std::string_view suffix = ".trace.csv";
  if (svg_path.size() >= suffix.size() && svg_path.ends_with(suffix)) {
    svg_path.replace(svg_path.size() - suffix.size(), suffix.size(), ".svg");
  } else if (svg_path.ends_with(".csv")) {
    svg_path.replace(svg_path.size() - 4, 4, ".svg");
  } else {
    svg_path += ".svg";
  }
  std::ofstream svg(svg_path);
  if (!svg) throw std::runtime_error("cannot open trace file '" + svg_path + "'");
  svg << render_svg(records);
  return svg_path;
}

}  // namespace specflow
