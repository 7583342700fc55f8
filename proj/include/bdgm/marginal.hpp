#ifndef BDGM_MARGINAL_HPP
#define BDGM_MARGINAL_HPP

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "bdgm/error.hpp"
#include "bdgm/graph.hpp"
#include "bdgm/gwishart.hpp"
#include "bdgm/rng.hpp"

namespace bdgm {

// Marginal likelihood of a graph with K integrated out:
//
//   log [ I_G(b + n, D + S) / I_G(b, D) ] = log E_{K ~ W_G(b, D)} [ |K|^{n/2} exp(-tr(SK)/2) ]
//
// estimated by averaging the Gaussian likelihood kernel over exact prior
// draws. The graph prior is uniform, so posterior ratios between graphs are
// differences of these values.

struct MarginalBackend {
  long mc_samples = 200;
  GWishartParams prior;

  void validate() const {
    if (mc_samples < 1) throw UsageError("marginal backend needs mc_samples >= 1");
    prior.validate();
  }
};

inline double log_likelihood_kernel(const Matrix& k, const Matrix& s, long n) {
  if (n == 0) return 0.0;
  return 0.5 * static_cast<double>(n) * log_det_spd(k, "precision matrix") - 0.5 * s.cwiseProduct(k).sum();
}

inline double log_mean_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : values) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - mx);
  return mx + std::log(acc / static_cast<double>(values.size()));
}

/// Identifies the data a cache was filled for.
inline std::uint64_t data_fingerprint(const Matrix& s, long n) {
  const auto cells = std::as_bytes(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())));
  std::vector<std::uint8_t> bytes(cells.size() + sizeof(long));
  std::transform(cells.begin(), cells.end(), bytes.begin(), [](std::byte b) { return static_cast<std::uint8_t>(b); });
  const auto tail = std::as_bytes(std::span<const long, 1>(&n, 1));
  std::transform(tail.begin(), tail.end(), bytes.begin() + static_cast<std::ptrdiff_t>(cells.size()),
                 [](std::byte b) { return static_cast<std::uint8_t>(b); });
  return hash_bytes(bytes) ^ static_cast<std::uint64_t>(s.rows());
}

/// Insert-once store of log marginal values keyed by graph. Readers share a
/// lock; inserts never overwrite.
class MarginalCache {
 public:
  explicit MarginalCache(std::uint64_t fingerprint = 0) : fingerprint_(fingerprint) {}

  MarginalCache(const MarginalCache&) = delete;
  MarginalCache& operator=(const MarginalCache&) = delete;

  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  std::optional<double> find(const GraphKey& key) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  /// Returns the stored value, which is the earlier one if the key was present.
  double insert_if_absent(const GraphKey& key, double value) {
    std::unique_lock lock(mutex_);
    return entries_.try_emplace(key, value).first->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

  void reset(std::uint64_t fingerprint) {
    std::unique_lock lock(mutex_);
    entries_.clear();
    fingerprint_ = fingerprint;
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<GraphKey, double, GraphKeyHash> entries_;
  std::uint64_t fingerprint_;
};

class StaleCacheError : public UsageError {
 public:
  StaleCacheError() : UsageError("marginal cache was filled for different data") {}
};

namespace detail {

inline void check_stats(const Matrix& s, long n, int p) {
  if (n < 0) throw UsageError("sample size must be non-negative");
  if (s.rows() != p || s.cols() != p) throw UsageError("cross-product matrix has the wrong dimension");
}

/// Kernel of the completed draw: log|K| = -log|W|, tr(SK) = tr(W^{-1} S).
inline double kernel_from_covariance(const Matrix& w, const Matrix& s, long n) {
  if (n == 0) return 0.0;
  Eigen::LLT<Matrix> llt(w);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("completed covariance");
  double logdet_w = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) logdet_w += std::log(llt.matrixLLT()(i, i));
  logdet_w *= 2.0;
  const double trace = llt.solve(s).trace();
  return -0.5 * static_cast<double>(n) * logdet_w - 0.5 * trace;
}

}  // namespace detail

/// Fresh-draw estimate with caching by graph key. Draws come from rng.
inline double log_marginal(const Graph& g, const Matrix& s, long n, const MarginalBackend& backend,
                           MarginalCache& cache, Rng& rng) {
  detail::check_stats(s, n, g.nodes());
  if (cache.fingerprint() != data_fingerprint(s, n)) throw StaleCacheError();
  const GraphKey key = encode_key(g);
  if (auto hit = cache.find(key)) return *hit;
  double value = 0.0;
  if (n > 0) {
    backend.validate();
    const GWishartSampler sampler(backend.prior);
    std::vector<double> terms(static_cast<std::size_t>(backend.mc_samples));
    for (auto& t : terms) t = log_likelihood_kernel(sampler.draw(g, rng), s, n);
    value = log_mean_exp(terms);
  }
  return cache.insert_if_absent(key, value);
}

inline void check_one_edge_apart(const Graph& from, const Graph& to) {
  if (from.nodes() != to.nodes()) throw UsageError("graphs differ in node count");
  std::size_t diff = 0;
  for (std::size_t k = 0; k < from.cell_count(); ++k) diff += from.has_cell(k) != to.has_cell(k);
  if (diff > 1) throw UsageError("posterior ratio requires graphs that differ by one edge");
}

inline double log_posterior_ratio(const Graph& from, const Graph& to, const Matrix& s, long n,
                                  const MarginalBackend& backend, MarginalCache& cache, Rng& rng) {
  check_one_edge_apart(from, to);
  if (from == to) return 0.0;
  return log_marginal(to, s, n, backend, cache, rng) - log_marginal(from, s, n, backend, cache, rng);
}

/// Marginal likelihood surface for one data set. A fixed bank of prior draws
/// is shared by every graph (common random numbers): each unconstrained
/// Wishart covariance is completed onto the graph in question, which is an
/// exact W_G(b, D) draw, and neighboring graphs see correlated errors.
class MarginalModel {
 public:
  MarginalModel(MarginalBackend backend, Matrix s, long n, std::uint64_t seed)
      : backend_(std::move(backend)), s_(std::move(s)), n_(n), cache_(data_fingerprint(s_, n_)) {
    backend_.validate();
    detail::check_stats(s_, n_, backend_.prior.dim());
    const GWishartSampler sampler(backend_.prior);
    Rng rng(seed);
    bank_.reserve(static_cast<std::size_t>(backend_.mc_samples));
    for (long m = 0; m < backend_.mc_samples; ++m) bank_.push_back(sampler.draw_full_covariance(rng));
  }

  int dim() const noexcept { return backend_.prior.dim(); }
  long sample_size() const noexcept { return n_; }
  const Matrix& cross_product() const noexcept { return s_; }
  const MarginalBackend& backend() const noexcept { return backend_; }
  const MarginalCache& cache() const noexcept { return cache_; }

  /// Swaps in new data (the copula layer does this every sweep); the cache
  /// is scoped to one data set and is cleared, the draw bank is kept.
  void rebind(Matrix s, long n) {
    detail::check_stats(s, n, dim());
    s_ = std::move(s);
    n_ = n;
    cache_.reset(data_fingerprint(s_, n_));
  }

  double log_marginal(const Graph& g) { return log_marginal(g, encode_key(g)); }

  double log_marginal(const Graph& g, const GraphKey& key) {
    if (auto hit = cache_.find(key)) return *hit;
    return cache_.insert_if_absent(key, estimate(g));
  }

  double log_posterior_ratio(const Graph& from, const Graph& to) {
    check_one_edge_apart(from, to);
    if (from == to) return 0.0;
    return log_marginal(to) - log_marginal(from);
  }

  /// Uncached estimate from the bank.
  double estimate(const Graph& g) const {
    if (g.nodes() != dim()) throw UsageError("graph and model disagree on p");
    if (n_ == 0) return 0.0;
    std::vector<double> terms(bank_.size());
    for (std::size_t m = 0; m < bank_.size(); ++m)
      terms[m] = detail::kernel_from_covariance(complete_covariance(bank_[m], g), s_, n_);
    return log_mean_exp(terms);
  }

 private:
  MarginalBackend backend_;
  Matrix s_;
  long n_;
  MarginalCache cache_;
  std::vector<Matrix> bank_;
};

}  // namespace bdgm

#endif  // BDGM_MARGINAL_HPP
