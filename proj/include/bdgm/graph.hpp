#ifndef BDGM_GRAPH_HPP
#define BDGM_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bdgm/error.hpp"
#include "bdgm/rng.hpp"

namespace bdgm {

/// Unordered node pair stored canonically with i < j. Nodes are 0-based.
struct Edge {
  int i = 0;
  int j = 0;

  Edge() = default;
  Edge(int a, int b) : i(std::min(a, b)), j(std::max(a, b)) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Number of cells in the strict upper triangle of a p x p matrix.
constexpr std::size_t pair_count(int p) {
  return p < 2 ? 0 : static_cast<std::size_t>(p) * static_cast<std::size_t>(p - 1) / 2;
}

/// Row-major position of (i, j), i < j, within the strict upper triangle.
constexpr std::size_t pair_index(int p, int i, int j) {
  const auto ii = static_cast<std::size_t>(i);
  return ii * static_cast<std::size_t>(p) - ii * (ii + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

/// Inverse of pair_index.
inline Edge pair_at(int p, std::size_t k) {
  int i = 0;
  std::size_t row = static_cast<std::size_t>(p - 1);
  while (k >= row) {
    k -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + static_cast<int>(k)};
}

/// Simple undirected loop-free graph on nodes 0..p-1.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int p) : p_(p), cells_(pair_count(p), 0) {
    if (p < 1) throw UsageError("graph needs at least one node");
  }

  static Graph full(int p) {
    Graph g(p);
    std::fill(g.cells_.begin(), g.cells_.end(), 1);
    g.edges_ = g.cells_.size();
    return g;
  }

  static Graph from_edges(int p, std::span<const Edge> edges) {
    Graph g(p);
    for (const auto& e : edges) g.add_edge(e.i, e.j);
    return g;
  }

  int nodes() const noexcept { return p_; }
  std::size_t edge_count() const noexcept { return edges_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }

  bool has_edge(int a, int b) const {
    if (a == b) return false;
    const Edge e(a, b);
    return cells_[pair_index(p_, e.i, e.j)] != 0;
  }

  /// Membership by upper-triangle cell index.
  bool has_cell(std::size_t k) const { return cells_[k] != 0; }

  void add_edge(int a, int b) { set(a, b, true); }
  void remove_edge(int a, int b) { set(a, b, false); }
  void toggle(const Edge& e) { set(e.i, e.j, !has_edge(e.i, e.j)); }

  Graph toggled(const Edge& e) const {
    Graph g = *this;
    g.toggle(e);
    return g;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edges_);
    for (std::size_t k = 0; k < cells_.size(); ++k)
      if (cells_[k]) out.push_back(pair_at(p_, k));
    return out;
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (int u = 0; u < p_; ++u)
      if (u != v && has_edge(u, v)) out.push_back(u);
    return out;
  }

  int degree(int v) const {
    int d = 0;
    for (int u = 0; u < p_; ++u)
      if (u != v && has_edge(u, v)) ++d;
    return d;
  }

  const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.p_ == b.p_ && a.cells_ == b.cells_;
  }

 private:
  void set(int a, int b, bool on) {
    if (a == b) throw UsageError("self loops are not allowed");
    if (a < 0 || b < 0 || a >= p_ || b >= p_) throw UsageError("edge endpoint out of range");
    const Edge e(a, b);
    auto& cell = cells_[pair_index(p_, e.i, e.j)];
    if (static_cast<bool>(cell) == on) return;
    cell = on ? 1 : 0;
    edges_ = on ? edges_ + 1 : edges_ - 1;
  }

  int p_ = 0;
  std::vector<std::uint8_t> cells_;
  std::size_t edges_ = 0;
};

// ---------------------------------------------------------------------------
// Compact keys
// ---------------------------------------------------------------------------

/// Upper triangle packed row-major into bits, LSB-first within each byte.
class GraphKey {
 public:
  GraphKey() = default;
  GraphKey(int p, std::vector<std::uint8_t> bytes) : p_(p), bytes_(std::move(bytes)) {}

  static constexpr std::size_t byte_length(int p) { return (pair_count(p) + 7) / 8; }

  int nodes() const noexcept { return p_; }
  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

  std::string hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes_.size() * 2);
    for (auto b : bytes_) {
      s.push_back(digits[b >> 4]);
      s.push_back(digits[b & 0xF]);
    }
    return s;
  }

  friend bool operator==(const GraphKey&, const GraphKey&) = default;

 private:
  int p_ = 0;
  std::vector<std::uint8_t> bytes_;
};

/// FNV-1a over the key bytes.
inline std::uint64_t hash_bytes(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

struct GraphKeyHash {
  std::size_t operator()(const GraphKey& k) const noexcept {
    return static_cast<std::size_t>(hash_bytes(k.bytes()) ^ static_cast<std::uint64_t>(k.nodes()));
  }
};

inline void encode_key_into(const Graph& g, std::span<std::uint8_t> out) {
  std::fill(out.begin(), out.end(), 0);
  const auto& cells = g.cells();
  for (std::size_t k = 0; k < cells.size(); ++k)
    if (cells[k]) out[k >> 3] |= static_cast<std::uint8_t>(1u << (k & 7));
}

inline GraphKey encode_key(const Graph& g) {
  std::vector<std::uint8_t> bytes(GraphKey::byte_length(g.nodes()), 0);
  encode_key_into(g, bytes);
  return {g.nodes(), std::move(bytes)};
}

inline Graph decode_key(int p, std::span<const std::uint8_t> bytes) {
  if (bytes.size() != GraphKey::byte_length(p))
    throw InputError("malformed graph key: expected " + std::to_string(GraphKey::byte_length(p)) +
                     " bytes for p=" + std::to_string(p) + ", got " + std::to_string(bytes.size()));
  const std::size_t cells = pair_count(p);
  for (std::size_t k = cells; k < bytes.size() * 8; ++k)
    if (bytes[k >> 3] & (1u << (k & 7))) throw InputError("malformed graph key: nonzero pad bits");
  Graph g(p);
  for (std::size_t k = 0; k < cells; ++k)
    if (bytes[k >> 3] & (1u << (k & 7))) {
      const Edge e = pair_at(p, k);
      g.add_edge(e.i, e.j);
    }
  return g;
}

inline Graph decode_key(const GraphKey& key) { return decode_key(key.nodes(), key.bytes()); }

// ---------------------------------------------------------------------------
// One-edge neighborhood
// ---------------------------------------------------------------------------

enum class JumpKind { birth, death };

struct Neighbor {
  Graph graph;
  Edge edge;
  JumpKind kind;
};

inline std::vector<Neighbor> neighbors_one_edge(const Graph& g) {
  std::vector<Neighbor> out;
  out.reserve(g.cell_count());
  for (std::size_t k = 0; k < g.cell_count(); ++k) {
    const Edge e = pair_at(g.nodes(), k);
    out.push_back({g.toggled(e), e, g.has_cell(k) ? JumpKind::death : JumpKind::birth});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic structures
// ---------------------------------------------------------------------------

enum class FamilyKind { random, cluster, scale_free, hub, ar2, circle, fixed };

struct GraphFamily {
  FamilyKind kind = FamilyKind::random;
  std::optional<double> prob;    // edge probability for random/cluster
  std::optional<Graph> fixed;    // required when kind == fixed
};

inline std::string_view to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::random: return "random";
    case FamilyKind::cluster: return "cluster";
    case FamilyKind::scale_free: return "scale-free";
    case FamilyKind::hub: return "hub";
    case FamilyKind::ar2: return "AR2";
    case FamilyKind::circle: return "circle";
    case FamilyKind::fixed: return "fixed";
  }
  return "?";
}

inline FamilyKind parse_family(std::string_view s) {
  if (s == "random") return FamilyKind::random;
  if (s == "cluster") return FamilyKind::cluster;
  if (s == "scale-free" || s == "scale_free" || s == "scalefree") return FamilyKind::scale_free;
  if (s == "hub") return FamilyKind::hub;
  if (s == "AR2" || s == "ar2") return FamilyKind::ar2;
  if (s == "circle") return FamilyKind::circle;
  if (s == "fixed") return FamilyKind::fixed;
  throw UsageError("unknown graph family '" + std::string(s) + "'");
}

namespace detail {

// Bernoulli(prob) on every pair inside nodes [first, first + size).
inline void bernoulli_block(Graph& g, int first, int size, double prob, Rng& rng) {
  for (int a = first; a < first + size; ++a)
    for (int b = a + 1; b < first + size; ++b)
      if (uniform01(rng) < prob) g.add_edge(a, b);
}

inline double sparse_default_prob(int size) { return size < 2 ? 0.0 : std::min(1.0, 2.0 / (size - 1)); }

}  // namespace detail

/// Number of blocks used by the cluster family.
constexpr int cluster_count(int p) { return std::max(2, p / 20); }

inline Graph generate_graph(const GraphFamily& family, int p, Rng& rng) {
  if (family.prob && (*family.prob <= 0.0 || *family.prob >= 1.0))
    throw UsageError("edge probability must lie in (0, 1)");
  if (family.kind == FamilyKind::fixed) {
    if (!family.fixed) throw UsageError("fixed family requires a graph");
    if (family.fixed->nodes() != p) throw UsageError("fixed graph has the wrong node count");
    return *family.fixed;
  }
  if (p < 2) throw UsageError("graph generation needs p >= 2");

  Graph g(p);
  switch (family.kind) {
    case FamilyKind::random:
      detail::bernoulli_block(g, 0, p, family.prob.value_or(detail::sparse_default_prob(p)), rng);
      break;
    case FamilyKind::cluster: {
      const int blocks = std::min(cluster_count(p), p);
      const int base = p / blocks;
      const int extra = p % blocks;
      int first = 0;
      for (int c = 0; c < blocks; ++c) {
        const int size = base + (c < extra ? 1 : 0);
        detail::bernoulli_block(g, first, size,
                                family.prob.value_or(detail::sparse_default_prob(size)), rng);
        first += size;
      }
      break;
    }
    case FamilyKind::scale_free: {
      // Preferential attachment from a 2-node chain, one link per new node.
      g.add_edge(0, 1);
      std::vector<int> degree(static_cast<std::size_t>(p), 0);
      degree[0] = degree[1] = 1;
      int total = 2;
      for (int v = 2; v < p; ++v) {
        auto pick = uniform_int(rng, 0, total - 1);
        int target = 0;
        while (pick >= degree[static_cast<std::size_t>(target)]) {
          pick -= degree[static_cast<std::size_t>(target)];
          ++target;
        }
        g.add_edge(v, target);
        ++degree[static_cast<std::size_t>(v)];
        ++degree[static_cast<std::size_t>(target)];
        total += 2;
      }
      break;
    }
    case FamilyKind::hub:
      for (int v = 1; v < p; ++v) g.add_edge(0, v);
      break;
    case FamilyKind::ar2:
      for (int v = 1; v < p; ++v) {
        g.add_edge(v, v - 1);
        if (v >= 2) g.add_edge(v, v - 2);
      }
      break;
    case FamilyKind::circle:
      for (int v = 1; v < p; ++v) g.add_edge(v, v - 1);
      if (p > 2) g.add_edge(0, p - 1);
      break;
    case FamilyKind::fixed:
      break;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Text export
// ---------------------------------------------------------------------------

inline std::vector<std::string> default_labels(int p) {
  std::vector<std::string> labels;
  for (int v = 1; v <= p; ++v) labels.push_back("X" + std::to_string(v));
  return labels;
}

inline void write_dot(std::ostream& os, const Graph& g, std::vector<std::string> labels = {}) {
  if (labels.empty()) labels = default_labels(g.nodes());
  os << "graph G {\n";
  for (int v = 0; v < g.nodes(); ++v) os << "  \"" << labels[static_cast<std::size_t>(v)] << "\";\n";
  for (const auto& e : g.edges())
    os << "  \"" << labels[static_cast<std::size_t>(e.i)] << "\" -- \""
       << labels[static_cast<std::size_t>(e.j)] << "\";\n";
  os << "}\n";
}

}  // namespace bdgm

#endif  // BDGM_GRAPH_HPP
