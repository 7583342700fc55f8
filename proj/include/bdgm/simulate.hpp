#ifndef BDGM_SIMULATE_HPP
#define BDGM_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "bdgm/error.hpp"
#include "bdgm/gcgm.hpp"
#include "bdgm/graph.hpp"
#include "bdgm/gwishart.hpp"
#include "bdgm/rng.hpp"

namespace bdgm {

enum class DataType { gaussian, non_gaussian, discrete, binary, mixed };

inline std::string_view to_string(DataType t) {
  switch (t) {
    case DataType::gaussian: return "Gaussian";
    case DataType::non_gaussian: return "non-Gaussian";
    case DataType::discrete: return "discrete";
    case DataType::binary: return "binary";
    case DataType::mixed: return "mixed";
  }
  return "Gaussian";
}

inline DataType parse_data_type(std::string_view s) {
  if (s == "Gaussian" || s == "gaussian") return DataType::gaussian;
  if (s == "non-Gaussian" || s == "non-gaussian" || s == "nongaussian") return DataType::non_gaussian;
  if (s == "discrete") return DataType::discrete;
  if (s == "binary") return DataType::binary;
  if (s == "mixed") return DataType::mixed;
  throw UsageError("unknown data type '" + std::string(s) + "'");
}

struct SimSpec {
  long n = 0;
  int p = 0;
  DataType type = DataType::gaussian;
  GraphFamily family;
  int cut = 4;
  double b = 3.0;
  std::optional<Matrix> K;
  std::optional<Matrix> sigma;

  void validate() const {
    if (n < 1) throw UsageError("simulation needs n >= 1");
    if (p < 2) throw UsageError("simulation needs p >= 2");
    if (cut < 2) throw UsageError("cut must be at least 2");
    if (!(b > 2.0)) throw UsageError("prior degrees of freedom must exceed 2");
    for (const auto* m : {&K, &sigma})
      if (*m && ((*m)->rows() != p || (*m)->cols() != p)) throw InputError("supplied matrix must be p x p");
  }
};

struct SimOutput {
  MixedData data;
  Graph graph;
  Matrix K;
  Matrix latent;  // the Gaussian draws before any marginal transform
};

/// Band matrix with 1 on the diagonal, 0.5 on the first and 0.25 on the second off-diagonal.
inline Matrix ar2_precision(int p) {
  Matrix k = Matrix::Identity(p, p);
  for (int i = 1; i < p; ++i) k(i, i - 1) = k(i - 1, i) = 0.5;
  for (int i = 2; i < p; ++i) k(i, i - 2) = k(i - 2, i) = 0.25;
  return k;
}

/// 1 on the diagonal, 0.5 between consecutive nodes, 0.4 closing the cycle.
inline Matrix circle_precision(int p) {
  Matrix k = Matrix::Identity(p, p);
  for (int i = 1; i < p; ++i) k(i, i - 1) = k(i - 1, i) = 0.5;
  if (p > 2) k(0, p - 1) = k(p - 1, 0) = 0.4;
  return k;
}

inline Matrix simulate_precision(const Graph& g, FamilyKind family, Rng& rng, double b = 3.0) {
  const int p = g.nodes();
  Matrix k;
  if (family == FamilyKind::ar2) k = ar2_precision(p);
  else if (family == FamilyKind::circle) k = circle_precision(p);
  else return sample(GWishartParams::identity(p, b), g, rng);
  if (!is_positive_definite(k)) throw NotPositiveDefinite(std::string(to_string(family)) + " precision at p=" + std::to_string(p));
  return k;
}

/// Graph whose edges are the entries of k larger than tol in magnitude.
inline Graph support_graph(const Matrix& k, double tol = kPatternTol) {
  Graph g(static_cast<int>(k.rows()));
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = i + 1; j < k.cols(); ++j)
      if (std::abs(k(i, j)) > tol) g.add_edge(static_cast<int>(i), static_cast<int>(j));
  return g;
}

namespace detail {

/// 0-based rank of every entry (ties cannot occur for continuous draws but
/// are broken by position).
inline std::vector<long> order_ranks(const Vector& x) {
  std::vector<long> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), 0L);
  std::stable_sort(idx.begin(), idx.end(), [&](long a, long b) { return x(a) < x(b); });
  std::vector<long> rank(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) rank[static_cast<std::size_t>(idx[r])] = static_cast<long>(r);
  return rank;
}

/// Equal-mass categories 1..cut from empirical quantiles.
inline Vector cut_column(const Vector& x, int cut) {
  const auto rank = order_ranks(x);
  const double n = static_cast<double>(x.size());
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out(i) = 1.0 + std::floor(static_cast<double>(rank[static_cast<std::size_t>(i)]) * cut / n);
  return out;
}

/// Exponential(1) quantile of Phi(x), computed on the upper tail.
inline Vector exponential_map(const Vector& x) {
  const boost::math::normal_distribution<double> unit;
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out(i) = -std::log(boost::math::cdf(boost::math::complement(unit, x(i))));
  return out;
}

/// Smallest k with Poisson(mean) CDF(k) >= Phi(x).
inline Vector poisson_map(const Vector& x, double mean) {
  const boost::math::normal_distribution<double> unit;
  const boost::math::poisson_distribution<double> pois(mean);
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = boost::math::cdf(unit, x(i));
    double k = 0.0;
    while (boost::math::cdf(pois, k) < u && k < 1e6) k += 1.0;
    out(i) = k;
  }
  return out;
}

}  // namespace detail

inline constexpr double kCountMean = 5.0;

/// Column kinds of the mixed type, assigned round-robin.
inline VarKind mixed_kind(int column) {
  switch (column % 5) {
    case 0: return VarKind::count;
    case 1: return VarKind::ordinal;
    case 2: return VarKind::binary;
    default: return VarKind::continuous;
  }
}

inline SimOutput simulate_data(const SimSpec& spec, Rng& rng) {
  spec.validate();
  const int p = spec.p;
  SimOutput out;
  if (spec.K && spec.sigma) {
    const Matrix prod = *spec.K * *spec.sigma;
    if (!prod.isApprox(Matrix::Identity(p, p), 1e-6)) throw InputError("supplied K and sigma are not inverses");
  }
  if (spec.K) {
    if (!is_positive_definite(*spec.K)) throw NotPositiveDefinite("supplied K");
    out.K = *spec.K;
  } else if (spec.sigma) {
    out.K = inverse_spd(*spec.sigma, "supplied sigma");
  }
  if (spec.K || spec.sigma) {
    out.graph = support_graph(out.K);
  } else {
    out.graph = generate_graph(spec.family, p, rng);
    out.K = simulate_precision(out.graph, spec.family.kind, rng, spec.b);
  }

  // Rows x = L^{-T} z with K = L L' have covariance K^{-1}.
  Eigen::LLT<Matrix> llt(out.K);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("precision matrix");
  Matrix z(spec.n, p);
  for (long i = 0; i < spec.n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = standard_normal(rng);
  Matrix x = llt.matrixU().solve(z.transpose()).transpose();
  out.latent = x;

  Matrix y(spec.n, p);
  std::vector<VarKind> kinds(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    const Vector col = x.col(j);
    VarKind kind = VarKind::continuous;
    bool heavy = false;
    switch (spec.type) {
      case DataType::gaussian: break;
      case DataType::non_gaussian: heavy = true; break;
      case DataType::discrete: kind = VarKind::ordinal; break;
      case DataType::binary: kind = VarKind::binary; break;
      case DataType::mixed:
        kind = mixed_kind(j);
        heavy = j % 5 == 4;
        break;
    }
    switch (kind) {
      case VarKind::continuous: y.col(j) = heavy ? detail::exponential_map(col) : col; break;
      case VarKind::ordinal: y.col(j) = detail::cut_column(col, spec.cut); break;
      case VarKind::binary: y.col(j) = detail::cut_column(col, 2).array() - 1.0; break;
      case VarKind::count: y.col(j) = detail::poisson_map(col, kCountMean); break;
    }
    kinds[static_cast<std::size_t>(j)] = kind;
  }
  out.data = MixedData::complete(std::move(y), std::move(kinds));
  return out;
}

/// Hides each cell independently with the given probability, keeping at
/// least one observed value per column.
inline void mask_at_random(MixedData& data, double fraction, Rng& rng) {
  if (fraction < 0.0 || fraction >= 1.0) throw UsageError("missing fraction must lie in [0, 1)");
  for (Eigen::Index j = 0; j < data.y.cols(); ++j) {
    for (Eigen::Index i = 0; i < data.y.rows(); ++i) data.missing(i, j) = uniform01(rng) < fraction ? 1 : 0;
    if ((data.missing.col(j).array() != 0).all()) data.missing(0, j) = 0;
  }
}

}  // namespace bdgm

#endif  // BDGM_SIMULATE_HPP
