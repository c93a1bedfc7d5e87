#include <gtest/gtest.h>

#include <random>

#include "builder_fixture.hpp"
#include "random_graph.hpp"
#include "specflow/errors.hpp"

namespace {

using specflow::TaskId;
using specflow::TaskKind;
using testsupport::BuilderFixture;

class GraphBuilderTest : public ::testing::Test, protected BuilderFixture {
 protected:
  int x = 0;
  int y = 0;
  int z = 0;
  specflow::DataHandle hx = registry.register_object(x, "x");
  specflow::DataHandle hy = registry.register_object(y, "y");
  specflow::DataHandle hz = registry.register_object(z, "z");
};

TEST_F(GraphBuilderTest, TwoTaskChainCreatesCopyTwinAndSelect) {
  const auto a = normal({specflow::write(hx)}, "A");
  const auto b = uncertain({specflow::maybe_write(hx)}, "B");
  const auto c = normal({specflow::write(hx)}, "C");
  const auto d = normal({specflow::write(hx)}, "D");

  EXPECT_EQ(graph.size(), 7U);
  EXPECT_EQ(graph.count(TaskKind::Copy), 1U);
  EXPECT_EQ(graph.count(TaskKind::Speculative), 1U);
  EXPECT_EQ(graph.count(TaskKind::Select), 1U);

  ASSERT_EQ(b.copies.size(), 1U);
  EXPECT_FALSE(b.speculative_twin.has_value());
  ASSERT_TRUE(c.speculative_twin.has_value());
  ASSERT_EQ(c.selects.size(), 1U);
  EXPECT_TRUE(c.copies.empty());
  EXPECT_FALSE(d.speculative_twin.has_value());
  EXPECT_FALSE(d.group.has_value());

  const TaskId copy = b.copies[0];
  const TaskId twin = *c.speculative_twin;
  const TaskId select = c.selects[0];
  EXPECT_TRUE(edge(a.main_task, copy));
  EXPECT_TRUE(edge(copy, b.main_task));
  EXPECT_TRUE(edge(b.main_task, c.main_task));
  EXPECT_TRUE(edge(copy, twin));
  EXPECT_TRUE(edge(twin, select));
  EXPECT_TRUE(edge(c.main_task, select));
  EXPECT_TRUE(edge(select, d.main_task));
  EXPECT_EQ(edge_count(), 7U);

  EXPECT_EQ(graph.group(*c.group).parents, std::vector<specflow::GroupId>{*b.group});
}

TEST_F(GraphBuilderTest, PlainInsertionWithoutDuplicates) {
  const auto d = normal({specflow::write(hx)});
  EXPECT_FALSE(d.speculative_twin);
  EXPECT_FALSE(d.group);
  EXPECT_TRUE(d.copies.empty());
  EXPECT_TRUE(d.selects.empty());
  EXPECT_EQ(activation(d.main_task), specflow::Activation::Enabled);
}

TEST_F(GraphBuilderTest, TwinSharesThirdPartyReadData) {
  (void)normal({specflow::write(hy)}, "E");
  (void)uncertain({specflow::maybe_write(hx)}, "B");
  const auto c = normal({specflow::read(hy), specflow::write(hx)}, "C");
  ASSERT_TRUE(c.speculative_twin);
  const auto& twin = graph.node(*c.speculative_twin);
  EXPECT_EQ(twin.accesses[0].handle, hy);
  EXPECT_EQ(twin.accesses[0].mode, specflow::AccessMode::Read);
  EXPECT_TRUE(registry.record(twin.accesses[1].handle).is_duplicate());
  EXPECT_TRUE(c.copies.empty());
  EXPECT_EQ(c.selects.size(), 1U);
}

TEST_F(GraphBuilderTest, TwinWritingThirdPartyDataGetsAnExtraCopy) {
  (void)uncertain({specflow::maybe_write(hx)}, "B");
  const auto c = normal({specflow::write(hy), specflow::write(hx)}, "C");
  ASSERT_EQ(c.copies.size(), 1U);
  EXPECT_EQ(graph.node(c.copies[0]).accesses[0].handle, hy);
  EXPECT_EQ(c.selects.size(), 2U);
}

TEST_F(GraphBuilderTest, RejectsMaybeWriteOnNormalInsertion) {
  EXPECT_THROW((void)normal({specflow::maybe_write(hx)}), specflow::InvalidAccess);
  EXPECT_EQ(graph.size(), 0U);
}

TEST_F(GraphBuilderTest, RejectsUncertainInsertionWithoutMaybeWrite) {
  EXPECT_THROW((void)uncertain({specflow::write(hx)}), specflow::InvalidAccess);
}

TEST_F(GraphBuilderTest, RejectsUnknownOrRepeatedHandles) {
  EXPECT_THROW((void)normal({specflow::write(specflow::DataHandle{specflow::DataId{99}})}), specflow::InvalidAccess);
  EXPECT_THROW((void)normal({specflow::write(hx), specflow::read(hx)}), specflow::InvalidAccess);
}

TEST_F(GraphBuilderTest, FirstUncertainTaskOpensParentlessGroup) {
  (void)normal({specflow::write(hx)}, "A");
  const auto b = uncertain({specflow::maybe_write(hx)}, "B");
  EXPECT_FALSE(b.speculative_twin);
  ASSERT_EQ(b.copies.size(), 1U);
  ASSERT_TRUE(b.group);
  const auto& g = group_of(b);
  EXPECT_TRUE(g.parents.empty());
  EXPECT_EQ(g.main_task, b.main_task);
  EXPECT_EQ(g.uncertain_tasks, std::vector<TaskId>{b.main_task});
  EXPECT_EQ(activation(b.main_task), specflow::Activation::Enabled);
  ASSERT_NE(registry.live_duplicate(hx), nullptr);
  EXPECT_EQ(registry.live_duplicate(hx)->group, *b.group);
}

TEST_F(GraphBuilderTest, SecondUncertainTaskSpeculatesOnPreChainCopy) {
  const auto b = uncertain({specflow::maybe_write(hx)}, "B");
  const auto c = uncertain({specflow::maybe_write(hx)}, "C");
  ASSERT_TRUE(c.speculative_twin);
  EXPECT_EQ(group_of(c).parents, std::vector<specflow::GroupId>{*b.group});
  const auto& twin = graph.node(*c.speculative_twin);
  EXPECT_EQ(twin.accesses[0].handle, graph.node(b.copies[0]).accesses[1].handle);
  EXPECT_TRUE(twin.reports_write());
  EXPECT_EQ(group_of(c).uncertain_tasks, std::vector<TaskId>{c.main_task});
  EXPECT_EQ(group_of(c).originals, std::vector<TaskId>{c.main_task});
  // The next speculative tasks start from a snapshot owned by C's group.
  EXPECT_EQ(registry.live_duplicate(hx)->group, *c.group);
}

TEST_F(GraphBuilderTest, KnownFailedGroupFallsBackToPlainInsertion) {
  const auto b = uncertain({specflow::maybe_write(hx)}, "B");
  decide(b);
  (void)engine.resolve_uncertain_completion(*b.group, b.main_task, true);
  const auto c = uncertain({specflow::maybe_write(hx)}, "C");
  EXPECT_FALSE(c.speculative_twin);
  ASSERT_TRUE(c.group);
  EXPECT_TRUE(group_of(c).parents.empty());
  EXPECT_EQ(registry.live_duplicate(hx)->group, *c.group);

  const auto d = normal({specflow::write(hy)});
  EXPECT_FALSE(d.group);
}

TEST_F(GraphBuilderTest, KnownFailedGroupNormalTaskDropsDuplicates) {
  const auto b = uncertain({specflow::maybe_write(hx)}, "B");
  decide(b);
  (void)engine.resolve_uncertain_completion(*b.group, b.main_task, true);
  const auto c = normal({specflow::write(hx)}, "C");
  EXPECT_FALSE(c.speculative_twin);
  EXPECT_FALSE(c.group);
  EXPECT_EQ(registry.live_duplicate(hx), nullptr);
}

TEST_F(GraphBuilderTest, SelectTasksOnePerPair) {
  const auto b = uncertain({specflow::maybe_write(hx)});
  const auto s1 = registry.create_shadow(hx);
  const auto s2 = registry.create_shadow(hy);
  const auto s3 = registry.create_shadow(hz);

  const std::vector<std::pair<specflow::DataHandle, specflow::DataHandle>> one{{hx, s1}};
  const auto single = builder.build_select_tasks(*b.group, one);
  ASSERT_EQ(single.size(), 1U);
  const auto& sel = graph.node(single[0]);
  EXPECT_EQ(sel.kind, TaskKind::Select);
  EXPECT_EQ(sel.accesses[0], specflow::write(hx));
  EXPECT_EQ(sel.accesses[1], specflow::read(s1));
  EXPECT_EQ(sel.activation, specflow::Activation::Undefined);

  EXPECT_TRUE(builder.build_select_tasks(*b.group, {}).empty());

  const std::vector<std::pair<specflow::DataHandle, specflow::DataHandle>> three{{hx, s1}, {hy, s2}, {hz, s3}};
  EXPECT_EQ(builder.build_select_tasks(*b.group, three).size(), 3U);
}

TEST_F(GraphBuilderTest, ReadOnlySuccessorNeedsNoSelect) {
  (void)uncertain({specflow::maybe_write(hx)}, "B");
  const auto c = normal({specflow::read(hx)}, "C");
  ASSERT_TRUE(c.speculative_twin);
  EXPECT_TRUE(c.selects.empty());
  EXPECT_TRUE(registry.live_duplicate(hx)->used_in_read);
}

TEST_F(GraphBuilderTest, SeveralGroupsBecomeParentsOfOneChild) {
  const auto b1 = uncertain({specflow::maybe_write(hx)});
  const auto b2 = uncertain({specflow::maybe_write(hy)});
  const auto c = normal({specflow::write(hx), specflow::write(hy)});
  EXPECT_EQ(group_of(c).parents, (std::vector<specflow::GroupId>{*b1.group, *b2.group}));
  EXPECT_EQ(c.selects.size(), 2U);
}

TEST_F(GraphBuilderTest, TwoUncertainThenNormalShape) {
  (void)normal({specflow::write(hx)}, "A");
  (void)uncertain({specflow::maybe_write(hx)}, "B");
  (void)uncertain({specflow::maybe_write(hx)}, "C");
  (void)normal({specflow::write(hx)}, "D");
  EXPECT_EQ(graph.size(), 10U);
  EXPECT_EQ(graph.count(TaskKind::Copy), 2U);
  EXPECT_EQ(graph.count(TaskKind::Speculative), 2U);
  EXPECT_EQ(graph.count(TaskKind::Select), 2U);
}

TEST_F(GraphBuilderTest, ChainOfUncertainTasksKeepsTwinsOffTheNormalPath) {
  for (std::size_t n : {1U, 2U, 4U, 7U}) {
    BuilderFixture f;
    int v = 0;
    const auto h = f.registry.register_object(v);
    const auto head = f.normal({specflow::write(h)});
    std::vector<specflow::InsertionReceipt> chain;
    for (std::size_t i = 0; i < n; ++i) chain.push_back(f.uncertain({specflow::maybe_write(h)}));
    chain.push_back(f.normal({specflow::write(h)}));

    EXPECT_FALSE(chain.front().speculative_twin);
    for (std::size_t i = 1; i < chain.size(); ++i) {
      ASSERT_TRUE(chain[i].speculative_twin) << "n=" << n << " i=" << i;
      for (TaskId p : f.graph.node(*chain[i].speculative_twin).predecessors) {
        EXPECT_EQ(f.graph.node(p).kind, TaskKind::Copy);
      }
    }
    for (std::size_t i = 0; i < f.graph.size(); ++i) {
      const auto& node = f.graph.node(TaskId{static_cast<TaskId::value_type>(i)});
      if (node.kind != TaskKind::Copy) continue;
      for (TaskId p : node.predecessors) {
        EXPECT_TRUE(f.graph.node(p).kind == TaskKind::Copy || p == head.main_task);
      }
    }
  }
}

TEST(GraphBuilderProperty, EdgesAlwaysPointForward) {
  std::mt19937_64 rng(5);
  for (int g = 0; g < 300; ++g) {
    const auto program = testsupport::random_program(rng);
    BuilderFixture f;
    std::vector<std::uint64_t> data = program.initial;
    for (auto& d : data) (void)f.registry.register_object(d);
    for (const auto& t : program.tasks) {
      std::vector<specflow::AccessRecord> acc;
      for (const auto& [d, m] : t.accesses) {
        acc.push_back({specflow::DataHandle{specflow::DataId{static_cast<specflow::DataId::value_type>(d)}}, m});
      }
      if (t.uncertain) {
        (void)f.uncertain(acc);
      } else {
        (void)f.normal(acc);
      }
      // Never two live duplicates of one datum.
      const auto& dups = f.registry.duplicates();
      for (std::size_t i = 0; i < dups.size(); ++i) {
        for (std::size_t j = i + 1; j < dups.size(); ++j) EXPECT_NE(dups[i].original, dups[j].original);
      }
    }
    for (std::size_t i = 0; i < f.graph.size(); ++i) {
      const auto& node = f.graph.node(TaskId{static_cast<TaskId::value_type>(i)});
      for (TaskId p : node.predecessors) EXPECT_LT(p, node.id);
    }
  }
}

}  // namespace
