#ifndef BDGM_TRACE_HPP
#define BDGM_TRACE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bdgm/error.hpp"
#include "bdgm/graph.hpp"
#include "bdgm/gwishart.hpp"

namespace bdgm {

enum class Algorithm : std::uint8_t { bdmcmc = 0, rjmcmc = 1 };
enum class Method : std::uint8_t { ggm = 0, gcgm = 1 };

inline std::string_view to_string(Algorithm a) { return a == Algorithm::bdmcmc ? "bdmcmc" : "rjmcmc"; }
inline std::string_view to_string(Method m) { return m == Method::ggm ? "ggm" : "gcgm"; }

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "bdmcmc") return Algorithm::bdmcmc;
  if (s == "rjmcmc") return Algorithm::rjmcmc;
  throw UsageError("unknown algorithm '" + std::string(s) + "'");
}

inline Method parse_method(std::string_view s) {
  if (s == "ggm") return Method::ggm;
  if (s == "gcgm") return Method::gcgm;
  throw UsageError("unknown method '" + std::string(s) + "'");
}

struct ChainState {
  Graph g;
  Matrix K;
  long iteration = 0;
};

/// Append-only store of packed graph keys, one fixed-width slot per record.
class KeyHistory {
 public:
  KeyHistory() = default;
  explicit KeyHistory(int p) : p_(p), width_(GraphKey::byte_length(p)) {}

  int nodes() const noexcept { return p_; }
  std::size_t key_width() const noexcept { return width_; }
  std::size_t size() const noexcept { return count_; }

  void reserve(std::size_t records) { arena_.reserve(records * width_); }

  void push(const Graph& g) {
    const auto at = arena_.size();
    arena_.resize(at + width_);
    encode_key_into(g, std::span(arena_).subspan(at, width_));
    ++count_;
  }

  void push(std::span<const std::uint8_t> key) {
    if (key.size() != width_) throw InputError("key width does not match history");
    arena_.insert(arena_.end(), key.begin(), key.end());
    ++count_;
  }

  std::span<const std::uint8_t> key(std::size_t record) const {
    return std::span(arena_).subspan(record * width_, width_);
  }

  GraphKey key_copy(std::size_t record) const {
    const auto k = key(record);
    return {p_, std::vector<std::uint8_t>(k.begin(), k.end())};
  }

  Graph graph(std::size_t record) const { return decode_key(p_, key(record)); }

  /// Heap bytes held by the key arena.
  std::size_t bytes_used() const noexcept { return arena_.capacity(); }

 private:
  int p_ = 0;
  std::size_t width_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> arena_;
};

/// Post-burn-in record of a chain plus running Rao-Blackwell accumulators.
struct ChainTrace {
  int p = 0;
  Algorithm algorithm = Algorithm::bdmcmc;
  Method method = Method::ggm;
  long iter = 0;
  long burnin = 0;

  std::vector<double> weights;
  std::vector<std::int32_t> sizes;
  std::optional<KeyHistory> keys;  // present when the full history is saved

  Matrix edge_weight;  // upper triangle: sum of W over records containing the edge
  Matrix k_weight;     // sum of W * K
  double total_weight = 0.0;
  bool has_k = true;

  std::optional<ChainState> initial_state;
  std::optional<ChainState> final_state;
  long clamped_rates = 0;

  ChainTrace() = default;
  ChainTrace(int nodes, Algorithm a, Method m, long iterations, long burn, bool save_all)
      : p(nodes), algorithm(a), method(m), iter(iterations), burnin(burn),
        edge_weight(Matrix::Zero(nodes, nodes)), k_weight(Matrix::Zero(nodes, nodes)) {
    const auto expected = static_cast<std::size_t>(iterations - burn);
    weights.reserve(expected);
    sizes.reserve(expected);
    if (save_all) {
      keys.emplace(nodes);
      keys->reserve(expected);
    }
  }

  std::size_t records() const noexcept { return weights.size(); }
  bool empty() const noexcept { return weights.empty(); }

  void record(const Graph& g, const Matrix& k, double w) {
    weights.push_back(w);
    sizes.push_back(static_cast<std::int32_t>(g.edge_count()));
    if (keys) keys->push(g);
    for (const auto& e : g.edges()) edge_weight(e.i, e.j) += w;
    k_weight += w * k;
    total_weight += w;
  }

  /// Combines two traces of the same model; accumulators add.
  void merge(const ChainTrace& other) {
    if (other.p != p) throw UsageError("cannot merge traces with different p");
    weights.insert(weights.end(), other.weights.begin(), other.weights.end());
    sizes.insert(sizes.end(), other.sizes.begin(), other.sizes.end());
    if (keys && other.keys)
      for (std::size_t r = 0; r < other.keys->size(); ++r) keys->push(other.keys->key(r));
    else
      keys.reset();
    edge_weight += other.edge_weight;
    k_weight += other.k_weight;
    total_weight += other.total_weight;
    has_k = has_k && other.has_k;
    if (other.final_state) final_state = other.final_state;
  }
};

}  // namespace bdgm

#endif  // BDGM_TRACE_HPP
