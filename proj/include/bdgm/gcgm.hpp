#ifndef BDGM_GCGM_HPP
#define BDGM_GCGM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "bdgm/error.hpp"
#include "bdgm/gwishart.hpp"
#include "bdgm/marginal.hpp"
#include "bdgm/rng.hpp"
#include "bdgm/sampler.hpp"
#include "bdgm/trace.hpp"
#include "bdgm/truncnorm.hpp"

namespace bdgm {

enum class VarKind : std::uint8_t { continuous, ordinal, count, binary };

inline std::string_view to_string(VarKind k) {
  switch (k) {
    case VarKind::continuous: return "continuous";
    case VarKind::ordinal: return "ordinal";
    case VarKind::count: return "count";
    case VarKind::binary: return "binary";
  }
  return "continuous";
}

inline VarKind parse_kind(std::string_view s) {
  if (s == "continuous" || s == "gaussian" || s == "Gaussian" || s == "non-Gaussian") return VarKind::continuous;
  if (s == "ordinal") return VarKind::ordinal;
  if (s == "count") return VarKind::count;
  if (s == "binary") return VarKind::binary;
  throw InputError("unknown variable kind '" + std::string(s) + "'");
}

using Mask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Observations with per-column kinds; missing(i, j) != 0 marks an absent cell
/// whose entry in y is ignored.
struct MixedData {
  Matrix y;
  std::vector<VarKind> kinds;
  Mask missing;

  static MixedData complete(Matrix y, std::vector<VarKind> kinds) {
    Mask m = Mask::Zero(y.rows(), y.cols());
    return {std::move(y), std::move(kinds), std::move(m)};
  }

  int dim() const noexcept { return static_cast<int>(y.cols()); }
  long rows() const noexcept { return static_cast<long>(y.rows()); }
  bool observed(Eigen::Index i, Eigen::Index j) const { return missing(i, j) == 0; }
  bool any_missing() const { return (missing.array() != 0).any(); }

  void validate() const {
    if (static_cast<Eigen::Index>(kinds.size()) != y.cols()) throw InputError("one kind per column is required");
    if (missing.rows() != y.rows() || missing.cols() != y.cols()) throw InputError("missing mask has the wrong shape");
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      bool seen = false;
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        if (!observed(i, j)) continue;
        seen = true;
        const double v = y(i, j);
        if (!std::isfinite(v)) throw InputError("non-finite observed value in column " + std::to_string(j + 1));
        if (kinds[static_cast<std::size_t>(j)] != VarKind::continuous && v != std::round(v))
          throw InputError("column " + std::to_string(j + 1) + " is " +
                           std::string(to_string(kinds[static_cast<std::size_t>(j)])) + " but holds a non-integer");
      }
      if (!seen) throw InputError("column " + std::to_string(j + 1) + " has no observed values");
    }
  }
};

struct LatentState {
  Matrix z;
};

struct Bounds {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// L = max{z_s : y_s < y_r}, U = min{z_s : y_r < y_s}, over observed rows s.
/// Rows tied with r bound nothing.
inline Bounds truncation_bounds(std::span<const double> y, std::span<const double> z, std::size_t r,
                                std::span<const std::uint8_t> missing = {}) {
  Bounds b;
  for (std::size_t s = 0; s < y.size(); ++s) {
    if (!missing.empty() && missing[s] != 0) continue;
    if (y[s] < y[r]) b.lower = std::max(b.lower, z[s]);
    else if (y[r] < y[s]) b.upper = std::min(b.upper, z[s]);
  }
  return b;
}

/// Per-column level structure that keeps the latent extremes of each observed
/// level, so bounds cost O(levels) instead of O(n).
class ColumnLevels {
 public:
  ColumnLevels(const MixedData& data, Eigen::Index col) {
    const long n = data.rows();
    std::vector<double> values;
    for (long i = 0; i < n; ++i)
      if (data.observed(i, col)) values.push_back(data.y(i, col));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    level_.assign(static_cast<std::size_t>(n), -1);
    members_.resize(values.size());
    for (long i = 0; i < n; ++i) {
      if (!data.observed(i, col)) continue;
      const auto it = std::lower_bound(values.begin(), values.end(), data.y(i, col));
      const int l = static_cast<int>(it - values.begin());
      level_[static_cast<std::size_t>(i)] = l;
      members_[static_cast<std::size_t>(l)].push_back(i);
    }
    lo_.resize(values.size());
    hi_.resize(values.size());
  }

  std::size_t levels() const noexcept { return members_.size(); }
  int level(long row) const { return level_[static_cast<std::size_t>(row)]; }

  void refresh(const Matrix& z, Eigen::Index col) {
    for (std::size_t l = 0; l < members_.size(); ++l) refresh_level(z, col, l);
  }

  void refresh_level(const Matrix& z, Eigen::Index col, std::size_t l) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (long i : members_[l]) {
      lo = std::min(lo, z(i, col));
      hi = std::max(hi, z(i, col));
    }
    lo_[l] = lo;
    hi_[l] = hi;
  }

  Bounds bounds(long row) const {
    Bounds b;
    const int l = level(row);
    if (l < 0) return b;
    for (int m = 0; m < l; ++m) b.lower = std::max(b.lower, hi_[static_cast<std::size_t>(m)]);
    for (std::size_t m = static_cast<std::size_t>(l) + 1; m < members_.size(); ++m) b.upper = std::min(b.upper, lo_[m]);
    return b;
  }

 private:
  std::vector<int> level_;
  std::vector<std::vector<long>> members_;
  std::vector<double> lo_, hi_;
};

/// One Gibbs sweep over variables then observations. Each latent value is
/// drawn from its conditional normal N(-sum_{r' != r} K_rr' z_r' / K_rr, 1/K_rr),
/// truncated to its rank bounds when observed.
inline void gibbs_update_latent(LatentState& state, const MixedData& data, const Matrix& k,
                                std::vector<ColumnLevels>& levels, Rng& rng) {
  Matrix& z = state.z;
  const int p = data.dim();
  const long n = data.rows();
  for (int r = 0; r < p; ++r) {
    const double krr = k(r, r);
    if (!(krr > 0.0)) throw NotPositiveDefinite("precision diagonal in latent update");
    const double sd = 1.0 / std::sqrt(krr);
    ColumnLevels& col = levels[static_cast<std::size_t>(r)];
    col.refresh(z, r);
    for (long j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int q = 0; q < p; ++q)
        if (q != r) acc += k(r, q) * z(j, q);
      const double mean = -acc / krr;
      const Bounds b = col.bounds(j);
      z(j, r) = truncated_normal(mean, sd, b.lower, b.upper, rng);
      const int l = col.level(j);
      if (l >= 0) col.refresh_level(z, r, static_cast<std::size_t>(l));
    }
  }
}

inline std::vector<ColumnLevels> column_levels(const MixedData& data) {
  std::vector<ColumnLevels> out;
  out.reserve(static_cast<std::size_t>(data.dim()));
  for (int j = 0; j < data.dim(); ++j) out.emplace_back(data, j);
  return out;
}

inline void gibbs_update_latent(LatentState& state, const MixedData& data, const Matrix& k, Rng& rng) {
  auto levels = column_levels(data);
  gibbs_update_latent(state, data, k, levels, rng);
}

/// Average ranks (1-based) of the given values.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t s = 0; s < idx.size();) {
    std::size_t e = s;
    while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[s]]) ++e;
    const double avg = 0.5 * static_cast<double>(s + e) + 1.0;
    for (std::size_t t = s; t <= e; ++t) rank[idx[t]] = avg;
    s = e + 1;
  }
  return rank;
}

/// Normal scores Phi^{-1}(rank / (n + 1)) with average ranks for ties.
inline Vector gaussianize(std::span<const double> column) {
  if (column.empty()) throw InputError("cannot gaussianize an empty column");
  const auto [mn, mx] = std::minmax_element(column.begin(), column.end());
  if (*mn == *mx) throw InputError("cannot gaussianize a constant column");
  const auto rank = average_ranks(column);
  const boost::math::normal_distribution<double> unit;
  const double denom = static_cast<double>(column.size()) + 1.0;
  Vector out(static_cast<Eigen::Index>(column.size()));
  for (std::size_t i = 0; i < column.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = boost::math::quantile(unit, rank[i] / denom);
  return out;
}

inline Matrix gaussianize(const Matrix& y) {
  Matrix out(y.rows(), y.cols());
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const Vector col = y.col(j);
    out.col(j) = gaussianize(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
  }
  return out;
}

/// Starting latent values Phi^{-1}((rank - 0.5) / n_obs) per column, with a
/// 1e-6 * (position within tie) offset; missing cells start at 0.
inline LatentState initial_latent(const MixedData& data) {
  const boost::math::normal_distribution<double> unit;
  LatentState s{Matrix::Zero(data.rows(), data.dim())};
  for (int j = 0; j < data.dim(); ++j) {
    std::vector<long> rows;
    std::vector<double> vals;
    for (long i = 0; i < data.rows(); ++i)
      if (data.observed(i, j)) {
        rows.push_back(i);
        vals.push_back(data.y(i, j));
      }
    const auto rank = average_ranks(vals);
    const double m = static_cast<double>(vals.size());
    std::vector<std::size_t> order(vals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    double prev = std::numeric_limits<double>::quiet_NaN();
    int within = 0;
    for (std::size_t t : order) {
      within = vals[t] == prev ? within + 1 : 0;
      prev = vals[t];
      s.z(rows[t], j) = boost::math::quantile(unit, (rank[t] - 0.5) / m) + 1e-6 * within;
    }
  }
  return s;
}

/// True when every observed latent value lies strictly inside its bounds.
inline bool bounds_hold(const LatentState& state, const MixedData& data) {
  for (int j = 0; j < data.dim(); ++j) {
    const Vector y = data.y.col(j);
    const Vector z = state.z.col(j);
    std::vector<std::uint8_t> miss(static_cast<std::size_t>(data.rows()));
    for (long i = 0; i < data.rows(); ++i) miss[static_cast<std::size_t>(i)] = data.missing(i, j);
    const std::span<const double> ys(y.data(), static_cast<std::size_t>(y.size()));
    const std::span<const double> zs(z.data(), static_cast<std::size_t>(z.size()));
    for (long i = 0; i < data.rows(); ++i) {
      if (!data.observed(i, j)) continue;
      const Bounds b = truncation_bounds(ys, zs, static_cast<std::size_t>(i), miss);
      if (!(b.lower < z(i) && z(i) < b.upper)) return false;
    }
  }
  return true;
}

/// Called after each latent sweep with the iteration index and the state.
using LatentObserver = std::function<void(long, const LatentState&)>;

/// Copula chain: latent sweep given K, S = Z'Z, then one graph move and a
/// fresh K from W_G(b + n, D + S).
inline ChainTrace run_chain_gcgm(const MixedData& data, const SamplerConfig& config,
                                 const LatentObserver& observe = {}) {
  config.validate();
  data.validate();
  const int p = data.dim();
  const long n = data.rows();
  if (p < 2) throw InputError("need at least two variables");

  LatentState latent = initial_latent(data);
  auto levels = column_levels(data);
  Rng latent_rng(mix_seed(config.seed, latent_stream));
  Rng rng(mix_seed(config.seed, chain_stream));

  MarginalModel model(backend_for(config, p), latent.z.transpose() * latent.z, n,
                      mix_seed(config.seed, bank_stream));
  const long burnin = config.burnin_count();
  ChainTrace trace(p, config.algorithm, Method::gcgm, config.iter, burnin, config.save_all);
  ChainState state = initial_state(config, p, posterior_sampler(model), rng);
  trace.initial_state = state;
  for (long t = 0; t < config.iter; ++t) {
    gibbs_update_latent(latent, data, state.K, levels, latent_rng);
    if (observe) observe(t, latent);
    model.rebind(latent.z.transpose() * latent.z, n);
    state = advance(state, config, model, posterior_sampler(model), rng, trace, t >= burnin);
  }
  trace.final_state = state;
  return trace;
}

}  // namespace bdgm

#endif  // BDGM_GCGM_HPP
