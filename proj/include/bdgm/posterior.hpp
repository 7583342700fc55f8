#ifndef BDGM_POSTERIOR_HPP
#define BDGM_POSTERIOR_HPP

#include <algorithm>
#include <cstddef>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bdgm/error.hpp"
#include "bdgm/graph.hpp"
#include "bdgm/gwishart.hpp"
#include "bdgm/trace.hpp"

namespace bdgm {

class NoSamplesError : public UsageError {
 public:
  NoSamplesError() : UsageError("trace holds no post-burn-in samples") {}
};

class RequiresHistoryError : public UsageError {
 public:
  RequiresHistoryError() : UsageError("MAP selection needs the full key history (run with save-all)") {}
};

/// Weighted edge frequencies; only the upper triangle is filled.
inline Matrix plinks(const ChainTrace& trace) {
  if (trace.empty() || !(trace.total_weight > 0.0)) throw NoSamplesError();
  Matrix out = Matrix::Zero(trace.p, trace.p);
  for (int i = 0; i < trace.p; ++i)
    for (int j = i + 1; j < trace.p; ++j) out(i, j) = std::clamp(trace.edge_weight(i, j) / trace.total_weight, 0.0, 1.0);
  return out;
}

inline Matrix k_hat(const ChainTrace& trace) {
  if (trace.empty() || !(trace.total_weight > 0.0)) throw NoSamplesError();
  if (!trace.has_k) throw UsageError("trace carries no precision-matrix accumulator");
  return trace.k_weight / trace.total_weight;
}

/// Edges whose inclusion probability is strictly above cut.
inline Graph select_bma(const Matrix& links, double cut = 0.5) {
  if (!(cut >= 0.0 && cut <= 1.0)) throw UsageError("cut must lie in [0, 1]");
  const int p = static_cast<int>(links.rows());
  Graph g(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (links(i, j) > cut) g.add_edge(i, j);
  return g;
}

struct GraphWeight {
  GraphKey key;
  double weight = 0.0;
  std::size_t first_seen = 0;
};

/// Visited graphs with their normalized total weight, heaviest first; equal
/// weights keep first-visit order.
inline std::vector<GraphWeight> graph_table(const ChainTrace& trace) {
  if (trace.empty()) throw NoSamplesError();
  if (!trace.keys) throw RequiresHistoryError();
  std::unordered_map<GraphKey, std::size_t, GraphKeyHash> slot;
  std::vector<GraphWeight> rows;
  double total = 0.0;
  for (std::size_t r = 0; r < trace.records(); ++r) {
    GraphKey key = trace.keys->key_copy(r);
    auto [it, fresh] = slot.try_emplace(key, rows.size());
    if (fresh) rows.push_back({std::move(key), 0.0, r});
    rows[it->second].weight += trace.weights[r];
    total += trace.weights[r];
  }
  for (auto& row : rows) row.weight /= total;
  std::stable_sort(rows.begin(), rows.end(), [](const GraphWeight& a, const GraphWeight& b) { return a.weight > b.weight; });
  return rows;
}

/// Graph with the largest accumulated weight.
inline Graph select_map(const ChainTrace& trace) { return decode_key(graph_table(trace).front().key); }

struct PosteriorSummary {
  Matrix plinks;
  Matrix k_hat;
  Graph selected;
  std::vector<GraphWeight> graph_table;  // empty without the key history
};

inline PosteriorSummary summarize(const ChainTrace& trace, double cut = 0.5) {
  PosteriorSummary s;
  s.plinks = plinks(trace);
  if (trace.has_k) s.k_hat = k_hat(trace);
  s.selected = select_bma(s.plinks, cut);
  if (trace.keys) s.graph_table = graph_table(trace);
  return s;
}

}  // namespace bdgm

#endif  // BDGM_POSTERIOR_HPP
