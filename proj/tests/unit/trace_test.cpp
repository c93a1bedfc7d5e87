#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "builder_fixture.hpp"
#include "dot_parser.hpp"
#include "specflow/mc/simulation.hpp"
#include "specflow/runtime.hpp"
#include "trace_checks.hpp"

namespace {

using specflow::TaskKind;
using testsupport::BuilderFixture;

std::string node(specflow::TaskId t) { return "t" + std::to_string(t.value()); }

TEST(Dot, EmptyGraph) {
  specflow::TaskGraph g;
  EXPECT_EQ(specflow::generate_dot(g), "digraph {\n}\n");
  const auto parsed = testsupport::parse_dot(specflow::generate_dot(g));
  EXPECT_TRUE(parsed.nodes.empty());
  EXPECT_TRUE(parsed.edges.empty());
}

TEST(Dot, PlainChain) {
  BuilderFixture f;
  int x = 0;
  const auto h = f.registry.register_object(x);
  std::vector<specflow::TaskId> ids;
  for (const char* name : {"A", "B", "C", "D"}) ids.push_back(f.normal({specflow::write(h)}, name).main_task);
  const auto g = testsupport::parse_dot(specflow::generate_dot(f.graph));
  EXPECT_EQ(g.nodes.size(), 4U);
  EXPECT_EQ(g.edges.size(), 3U);
  for (std::size_t i = 1; i < ids.size(); ++i) EXPECT_TRUE(g.has_edge(node(ids[i - 1]), node(ids[i])));
  EXPECT_EQ(g.nodes.at(node(ids[1])).at("label"), "B");
}

TEST(Dot, SpeculativeChainEncodesRolesAndActivation) {
  BuilderFixture f;
  int x = 0;
  const auto h = f.registry.register_object(x);
  (void)f.normal({specflow::write(h)}, "A");
  const auto b = f.uncertain({specflow::maybe_write(h)}, "B");
  const auto c = f.normal({specflow::write(h)}, "C");
  (void)f.normal({specflow::write(h)}, "D");
  f.decide(b);
  f.decide(c);
  (void)f.engine.resolve_uncertain_completion(*b.group, b.main_task, false);

  const std::string text = specflow::generate_dot(f.graph);
  const auto g = testsupport::parse_dot(text);
  ASSERT_EQ(g.nodes.size(), 7U);
  EXPECT_TRUE(g.acyclic());
  const auto& twin = g.nodes.at(node(*c.speculative_twin));
  EXPECT_EQ(twin.at("kind"), "speculative");
  EXPECT_EQ(twin.at("label"), "C'");
  EXPECT_EQ(g.nodes.at(node(c.main_task)).at("activation"), "disabled");
  EXPECT_EQ(g.nodes.at(node(c.selects[0])).at("activation"), "enabled");
  EXPECT_EQ(g.nodes.at(node(b.copies[0])).at("kind"), "copy");
  EXPECT_EQ(g.nodes.at(node(b.main_task)).at("kind"), "uncertain");
}

TEST(Dot, IdenticalInsertionsGiveIdenticalBytes) {
  auto build = [] {
    BuilderFixture f;
    int x = 0, y = 0;
    const auto hx = f.registry.register_object(x);
    const auto hy = f.registry.register_object(y);
    (void)f.uncertain({specflow::maybe_write(hx)});
    (void)f.normal({specflow::read(hx), specflow::write(hy)});
    (void)f.uncertain({specflow::maybe_write(hy)});
    (void)f.normal({specflow::write(hx), specflow::write(hy)});
    return specflow::generate_dot(f.graph);
  };
  EXPECT_EQ(build(), build());
}

TEST(Timeline, EmptyTraceIsHeaderOnly) {
  std::ostringstream out;
  specflow::write_trace_csv(out, {});
  EXPECT_EQ(out.str(), "task_id,worker,start_ns,end_ns,kind,group,label\n");
}

TEST(Timeline, RecordsRespectDependencies) {
  specflow::Runtime rt(3);
  std::vector<int> data(3);
  std::vector<specflow::Handle<int>> h;
  for (auto& d : data) h.push_back(rt.register_data(d));
  for (int i = 0; i < 20; ++i) {
    const auto a = static_cast<std::size_t>(i % 3);
    const auto b = static_cast<std::size_t>((i + 1) % 3);
    if (i % 4 == 1) {
      rt.potential_task(specflow::read(h[a]), specflow::maybe_write(h[b]), [i](const int& u, int& v) {
        if (i % 8 == 1) v += u;
        return i % 8 == 1;
      });
    } else {
      rt.task(specflow::read(h[a]), specflow::write(h[b]), [](const int& u, int& v) { v = v * 3 + u + 1; });
    }
  }
  rt.wait_all();
  const auto trace = rt.trace();
  EXPECT_TRUE(testsupport::timeline_violations(rt.graph(), trace).empty());
  EXPECT_EQ(testsupport::worker_overlaps(trace), 0U);
  for (const auto& r : trace) {
    EXPECT_LE(r.start_ns, r.end_ns);
    EXPECT_FALSE(rt.graph().node(r.task).skipped);
  }
  EXPECT_TRUE(testsupport::parse_dot(rt.generate_dot()).acyclic());
}

TEST(Timeline, CsvAndSvgFiles) {
  std::vector<specflow::TraceRecord> records{
      {specflow::TaskId{0}, 0, 0, 100, TaskKind::Normal, std::nullopt, "init0", "init"},
      {specflow::TaskId{1}, 1, 100, 250, TaskKind::Speculative, specflow::GroupId{2}, "a,b", ""},
      {specflow::TaskId{2}, 0, 120, 130, TaskKind::Copy, specflow::GroupId{2}, "copy(x')", "runtime"},
      {specflow::TaskId{3}, 0, 130, 200, TaskKind::Uncertain, specflow::GroupId{2}, "step", "move"},
  };
  EXPECT_EQ(specflow::trace_class(records[0]), "init");
  EXPECT_EQ(specflow::trace_class(records[1]), "speculative");
  EXPECT_EQ(specflow::trace_class(records[2]), "runtime");
  EXPECT_EQ(specflow::trace_class(records[3]), "normal");

  const auto dir = std::filesystem::temp_directory_path() / "specflow_trace_test";
  std::filesystem::create_directories(dir);
  const std::string csv = (dir / "run.trace.csv").string();
  const std::string svg = specflow::write_trace_files(csv, records);
  EXPECT_EQ(svg, (dir / "run.svg").string());

  std::ifstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5U);
  EXPECT_EQ(lines[1], "0,0,0,100,normal,,init0");
  EXPECT_EQ(lines[2], "1,1,100,250,speculative,2,\"a,b\"");

  std::ifstream svg_in(svg);
  const std::string text((std::istreambuf_iterator<char>(svg_in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text.rfind("<svg", 0), 0U);
  EXPECT_NE(text.find("</svg>"), std::string::npos);
  for (const char* cls : {"init", "normal", "speculative", "runtime"}) {
    EXPECT_NE(text.find(std::string("class=\"") + cls), std::string::npos) << cls;
  }

  EXPECT_EQ(specflow::write_trace_files((dir / "plain.csv").string(), {}), (dir / "plain.svg").string());
  EXPECT_EQ(specflow::write_trace_files((dir / "noext").string(), {}), (dir / "noext.svg").string());
  std::filesystem::remove_all(dir);
}

specflow::mc::McConfig tiny(specflow::mc::Mode mode) {
  specflow::mc::McConfig c;
  c.particles = 20;
  c.iterations = 1;
  c.mode = mode;
  return c;
}

TEST(Timeline, TaskModeMonteCarloIsSerial) {
  specflow::Runtime rt(4);
  (void)specflow::mc::run_mc(tiny(specflow::mc::Mode::Task), rt);
  auto trace = rt.trace();
  ASSERT_EQ(trace.size(), 6U);
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i - 1].end_ns, trace[i].start_ns);
  EXPECT_EQ(specflow::trace_class(trace[0]), "init");
}

TEST(Timeline, SpecModeMonteCarloTwinsWaitOnlyForCopies) {
  specflow::Runtime rt(5);
  (void)specflow::mc::run_mc(tiny(specflow::mc::Mode::Spec), rt);
  const auto& g = rt.graph();
  std::size_t twins = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& n = g.node(specflow::TaskId{static_cast<specflow::TaskId::value_type>(i)});
    if (n.kind != TaskKind::Speculative) continue;
    ++twins;
    for (auto p : n.predecessors) EXPECT_EQ(g.node(p).kind, TaskKind::Copy);
  }
  EXPECT_EQ(twins, 4U);
  EXPECT_TRUE(testsupport::timeline_violations(g, rt.trace()).empty());
}

}  // namespace
