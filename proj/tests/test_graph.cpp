#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "bdgm/graph.hpp"

using namespace bdgm;

TEST(GraphKey, SingleEdgeInThreeNodeTriangle) {
  Graph g(3);
  g.add_edge(0, 2);
  const GraphKey k = encode_key(g);
  ASSERT_EQ(k.bytes().size(), 1u);
  EXPECT_EQ(k.bytes()[0], 0x02);
}

TEST(GraphKey, Lengths) {
  EXPECT_EQ(GraphKey::byte_length(8), 4u);
  EXPECT_EQ(GraphKey::byte_length(100), 619u);
  EXPECT_EQ(encode_key(Graph::full(100)).bytes().size(), 619u);
}

TEST(GraphKey, PadBitsAreZero) {
  const GraphKey k = encode_key(Graph::full(3));
  EXPECT_EQ(k.bytes()[0], 0x07);
}

TEST(GraphKey, EmptyAndFullRoundTrip) {
  for (const Graph& g : {Graph(5), Graph::full(5)}) EXPECT_EQ(decode_key(encode_key(g)), g);
}

TEST(GraphKey, RandomRoundTrip) {
  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    const int p = static_cast<int>(uniform_int(rng, 2, 30));
    Graph g(p);
    for (std::size_t k = 0; k < g.cell_count(); ++k)
      if (uniform01(rng) < 0.5) g.add_edge(pair_at(p, k).i, pair_at(p, k).j);
    ASSERT_EQ(decode_key(encode_key(g)), g) << "p=" << p;
  }
}

TEST(GraphKey, KeysEqualIffEdgeSetsEqual) {
  std::set<std::vector<std::uint8_t>> seen;
  for (unsigned m = 0; m < 64; ++m) {
    Graph g(4);
    for (std::size_t k = 0; k < 6; ++k)
      if (m >> k & 1U) g.add_edge(pair_at(4, k).i, pair_at(4, k).j);
    seen.insert(encode_key(g).bytes());
  }
  EXPECT_EQ(seen.size(), 64u);
}

TEST(GraphKey, DecodeRejectsBadLength) {
  const std::vector<std::uint8_t> bytes(2, 0);
  EXPECT_THROW(decode_key(3, bytes), Error);
}

TEST(GraphKey, DecodeRejectsNonzeroPadding) {
  const std::vector<std::uint8_t> bytes{0x08};
  EXPECT_THROW(decode_key(3, bytes), Error);
}

TEST(Neighbors, Counts) {
  const auto count = [](const Graph& g, JumpKind kind) {
    int c = 0;
    for (const auto& n : neighbors_one_edge(g)) c += n.kind == kind;
    return c;
  };
  EXPECT_EQ(count(Graph(3), JumpKind::birth), 3);
  EXPECT_EQ(count(Graph(3), JumpKind::death), 0);
  EXPECT_EQ(count(Graph::full(3), JumpKind::birth), 0);
  EXPECT_EQ(count(Graph::full(3), JumpKind::death), 3);
  Graph one(4);
  one.add_edge(1, 3);
  EXPECT_EQ(count(one, JumpKind::birth), 5);
  EXPECT_EQ(count(one, JumpKind::death), 1);
  EXPECT_EQ(neighbors_one_edge(one).size(), 6u);
  for (const auto& n : neighbors_one_edge(one)) EXPECT_EQ(n.graph, one.toggled(n.edge));
}

TEST(Families, Hub) {
  Rng rng(1);
  const Graph g = generate_graph({FamilyKind::hub}, 5, rng);
  const std::vector<Edge> want{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
  EXPECT_EQ(g.edges(), want);
}

TEST(Families, Circle) {
  Rng rng(1);
  const Graph g = generate_graph({FamilyKind::circle}, 4, rng);
  EXPECT_EQ(g.edge_count(), 4u);
  EXPECT_TRUE(g.has_edge(0, 1) && g.has_edge(1, 2) && g.has_edge(2, 3) && g.has_edge(0, 3));
}

TEST(Families, Ar2) {
  Rng rng(1);
  const Graph g = generate_graph({FamilyKind::ar2}, 5, rng);
  EXPECT_EQ(g.edge_count(), 7u);
  for (int v = 1; v < 5; ++v) EXPECT_TRUE(g.has_edge(v, v - 1));
  for (int v = 2; v < 5; ++v) EXPECT_TRUE(g.has_edge(v, v - 2));
}

TEST(Families, ClusterCountAndNoCrossEdges) {
  EXPECT_EQ(cluster_count(60), 3);
  EXPECT_EQ(cluster_count(20), 2);
  Rng rng(3);
  const Graph g = generate_graph({FamilyKind::cluster, 0.9}, 60, rng);
  for (const auto& e : g.edges()) EXPECT_EQ(e.i / 20, e.j / 20) << e.i << "-" << e.j;
  EXPECT_GT(g.edge_count(), 0u);
}

TEST(Families, RandomEdgeCountMean) {
  const int p = 10;
  const double q = 0.3;
  const double cells = 45.0;
  Rng rng(5);
  double sum = 0.0;
  const int draws = 2000;
  for (int t = 0; t < draws; ++t) sum += static_cast<double>(generate_graph({FamilyKind::random, q}, p, rng).edge_count());
  const double se = std::sqrt(cells * q * (1 - q) / draws);
  EXPECT_NEAR(sum / draws, q * cells, 3 * se);
}

TEST(Families, RandomDefaultProbability) {
  const int p = 21;
  Rng rng(6);
  double sum = 0.0;
  const int draws = 2000;
  for (int t = 0; t < draws; ++t) sum += static_cast<double>(generate_graph({FamilyKind::random}, p, rng).edge_count());
  const double q = 2.0 / (p - 1), cells = 210.0;
  EXPECT_NEAR(sum / draws, q * cells, 3 * std::sqrt(cells * q * (1 - q) / draws));
}

TEST(Families, ScaleFreeIsConnectedTree) {
  Rng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const int p = 3 + rep % 20;
    const Graph g = generate_graph({FamilyKind::scale_free}, p, rng);
    EXPECT_EQ(g.edge_count(), static_cast<std::size_t>(p - 1));
    std::vector<int> stack{0};
    std::vector<bool> mark(static_cast<std::size_t>(p), false);
    mark[0] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u : g.neighbors(v))
        if (!mark[static_cast<std::size_t>(u)]) {
          mark[static_cast<std::size_t>(u)] = true;
          stack.push_back(u);
        }
    }
    for (bool m : mark) EXPECT_TRUE(m);
  }
}

TEST(Families, DeterministicFamilies) {
  Rng a(1), b(999);
  for (auto kind : {FamilyKind::hub, FamilyKind::ar2, FamilyKind::circle})
    EXPECT_EQ(generate_graph({kind}, 9, a), generate_graph({kind}, 9, b));
}

TEST(Families, FixedAndErrors) {
  Rng rng(1);
  Graph g(4);
  g.add_edge(1, 2);
  EXPECT_EQ(generate_graph({FamilyKind::fixed, std::nullopt, g}, 4, rng), g);
  EXPECT_THROW(generate_graph({FamilyKind::fixed}, 4, rng), UsageError);
  EXPECT_THROW(generate_graph({FamilyKind::random, 1.5}, 4, rng), UsageError);
  EXPECT_THROW(parse_family("lattice"), UsageError);
}

TEST(Export, Dot) {
  Graph g(3);
  g.add_edge(0, 2);
  std::ostringstream os;
  write_dot(os, g);
  EXPECT_NE(os.str().find("\"X1\" -- \"X3\""), std::string::npos);
}
