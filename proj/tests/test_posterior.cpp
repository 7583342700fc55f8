#include <gtest/gtest.h>

#include "bdgm/posterior.hpp"
#include "bdgm/sampler.hpp"
#include "oracles.hpp"

using namespace bdgm;

namespace {

ChainTrace trace_of(int p, bool history = true) { return ChainTrace(p, Algorithm::bdmcmc, Method::ggm, 10, 0, history); }

Graph edge_graph(int p, int i, int j) {
  Graph g(p);
  g.add_edge(i, j);
  return g;
}

}  // namespace

TEST(Plinks, WeightedFrequency) {
  ChainTrace t = trace_of(3);
  const Matrix k = Matrix::Identity(3, 3);
  t.record(edge_graph(3, 0, 1), k, 2.0);
  t.record(Graph(3), k, 1.0);
  const Matrix pl = plinks(t);
  EXPECT_DOUBLE_EQ(pl(0, 1), 2.0 / 3.0);
  EXPECT_EQ(pl(0, 2), 0.0);
  EXPECT_EQ(pl(1, 0), 0.0);
}

TEST(Plinks, AllFullGraphs) {
  ChainTrace t = trace_of(4);
  for (int r = 0; r < 5; ++r) t.record(Graph::full(4), Matrix::Identity(4, 4), 0.1 * (r + 1));
  const Matrix pl = plinks(t);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) EXPECT_DOUBLE_EQ(pl(i, j), 1.0);
}

TEST(Plinks, EmptyTraceRejected) {
  const ChainTrace t = trace_of(3);
  EXPECT_THROW(plinks(t), NoSamplesError);
  EXPECT_THROW(k_hat(t), NoSamplesError);
  EXPECT_THROW(graph_table(t), NoSamplesError);
}

TEST(KHat, SingleRecordAndWeightedMean) {
  ChainTrace one = trace_of(2);
  Matrix k1(2, 2), k2(2, 2);
  k1 << 2.0, 0.3, 0.3, 1.0;
  k2 << 1.0, 0.0, 0.0, 4.0;
  one.record(Graph::full(2), k1, 0.7);
  EXPECT_TRUE(k_hat(one).isApprox(k1, 1e-15));
  ChainTrace two = trace_of(2);
  two.record(Graph::full(2), k1, 2.0);
  two.record(Graph(2), k2, 1.0);
  EXPECT_TRUE(k_hat(two).isApprox((2.0 * k1 + k2) / 3.0, 1e-15));
}

TEST(Select, BmaCuts) {
  Matrix pl = Matrix::Zero(4, 4);
  EXPECT_EQ(select_bma(pl).edge_count(), 0u);
  pl(0, 1) = 0.999;
  pl(0, 2) = 0.99;
  pl(1, 3) = 0.5;
  pl(2, 3) = 1.0;
  const Graph g = select_bma(pl, 0.995);
  EXPECT_TRUE(g.has_edge(0, 1) && g.has_edge(2, 3));
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_FALSE(select_bma(pl, 0.5).has_edge(1, 3));
  EXPECT_EQ(select_bma(pl, 1.0).edge_count(), 0u);
  EXPECT_THROW(select_bma(pl, 1.5), UsageError);
}

TEST(Select, BmaIsMonotoneInCut) {
  Rng rng(1);
  Matrix pl = Matrix::Zero(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) pl(i, j) = uniform01(rng);
  for (int step = 0; step < 20; ++step) {
    const Graph a = select_bma(pl, step / 20.0), b = select_bma(pl, (step + 1) / 20.0);
    for (const auto& e : b.edges()) EXPECT_TRUE(a.has_edge(e.i, e.j));
  }
}

TEST(Select, MapByTotalWeight) {
  ChainTrace t = trace_of(3);
  const Graph a = edge_graph(3, 0, 1), b = edge_graph(3, 1, 2);
  const Matrix k = Matrix::Identity(3, 3);
  t.record(a, k, 3.0);
  t.record(b, k, 2.0);
  t.record(a, k, 1.0);
  EXPECT_EQ(select_map(t), a);
  const auto table = graph_table(t);
  ASSERT_EQ(table.size(), 2u);
  EXPECT_DOUBLE_EQ(table[0].weight, 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(table[1].weight, 2.0 / 6.0);
}

TEST(Select, MapNeedsHistory) {
  ChainTrace t = trace_of(3, false);
  t.record(Graph(3), Matrix::Identity(3, 3), 1.0);
  EXPECT_THROW(select_map(t), RequiresHistoryError);
  EXPECT_TRUE(summarize(t).graph_table.empty());
}

TEST(Merge, AccumulatorsAdd) {
  ChainTrace a = trace_of(3), b = trace_of(3);
  const Matrix k = Matrix::Identity(3, 3);
  a.record(edge_graph(3, 0, 1), k, 1.0);
  b.record(Graph(3), k, 1.0);
  b.record(edge_graph(3, 0, 1), k, 2.0);
  a.merge(b);
  EXPECT_EQ(a.records(), 3u);
  EXPECT_DOUBLE_EQ(plinks(a)(0, 1), 3.0 / 4.0);
  double total = 0.0;
  for (const auto& row : graph_table(a)) total += row.weight;
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_THROW(a.merge(trace_of(4)), UsageError);
}

TEST(Select, MapMatchesEnumerationOnThreeNodes) {
  Matrix k = Matrix::Identity(3, 3);
  k(0, 1) = k(1, 0) = 0.6;
  int agree = 0;
  const int runs = 20;
  for (int r = 0; r < runs; ++r) {
    Rng rng(100 + static_cast<std::uint64_t>(r));
    const auto st = SufficientStats::from_data(oracle::gaussian_rows(k, 20, rng));
    SamplerConfig c;
    c.iter = 3000;
    c.burnin = 500;
    c.mc_samples = 2000;
    c.seed = 200 + static_cast<std::uint64_t>(r);
    c.save_all = true;
    MarginalModel model(backend_for(c, 3), st.S, st.n, mix_seed(c.seed, bank_stream));
    unsigned best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (unsigned m = 0; m < 8; ++m) {
      const double v = model.log_marginal(oracle::graph_from_mask(3, m));
      if (v > best_v) {
        best_v = v;
        best = m;
      }
    }
    agree += oracle::mask_of(select_map(run_chain(st, c))) == best;
  }
  EXPECT_GE(agree, 19) << agree << " of " << runs;
}

TEST(KHat, NoDataMatchesPriorMean) {
  // With n = 0 the chain's K draws are prior draws averaged over a flat graph
  // posterior; the reference is a direct Monte Carlo average over all eight graphs.
  SamplerConfig c;
  c.mc_samples = 10;
  MarginalModel model(backend_for(c, 3), Matrix::Zero(3, 3), 0, 1);
  const auto post = posterior_sampler(model);
  Rng rng(2);
  ChainTrace t(3, Algorithm::bdmcmc, Method::ggm, 1, 0, false);
  ChainState s = initial_state(c, 3, post, rng);
  const int steps = 40000;
  for (int i = 0; i < steps; ++i) s = advance(s, c, model, post, rng, t, true);

  Rng orng(3);
  const GWishartSampler prior(GWishartParams::identity(3));
  Matrix ref = Matrix::Zero(3, 3), sq = Matrix::Zero(3, 3);
  const int per = 5000;
  for (unsigned m = 0; m < 8; ++m)
    for (int d = 0; d < per; ++d) {
      const Matrix kd = prior.draw(oracle::graph_from_mask(3, m), orng);
      ref += kd;
      sq += kd.cwiseProduct(kd);
    }
  ref /= 8.0 * per;
  const Matrix var = sq / (8.0 * per) - ref.cwiseProduct(ref);
  const Matrix got = k_hat(t);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double se = std::sqrt(var(i, j) / steps) + std::sqrt(var(i, j) / (8.0 * per));
      EXPECT_NEAR(got(i, j), ref(i, j), 3 * se) << i << "," << j;
    }
}
