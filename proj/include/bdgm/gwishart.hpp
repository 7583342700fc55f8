#ifndef BDGM_GWISHART_HPP
#define BDGM_GWISHART_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "bdgm/error.hpp"
#include "bdgm/graph.hpp"
#include "bdgm/rng.hpp"

namespace bdgm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPatternTol = 1e-8;

inline bool is_symmetric(const Matrix& m, double tol = kSymmetryTol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol * std::max(1.0, std::abs(m(i, j)))) return false;
  return true;
}

inline bool is_positive_definite(const Matrix& m) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

/// log|m| of an SPD matrix via Cholesky.
inline double log_det_spd(const Matrix& m, const char* what = "log-determinant") {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(what);
  const auto& l = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

inline Matrix inverse_spd(const Matrix& m, const char* what = "inverse") {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(what);
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

/// True when every off-graph entry is within tol of zero.
inline bool respects_graph(const Matrix& k, const Graph& g, double tol = kPatternTol) {
  for (int i = 0; i < g.nodes(); ++i)
    for (int j = i + 1; j < g.nodes(); ++j)
      if (!g.has_edge(i, j) && (std::abs(k(i, j)) > tol || std::abs(k(j, i)) > tol)) return false;
  return true;
}

struct GWishartParams {
  double b = 3.0;
  Matrix D;

  static GWishartParams identity(int p, double b = 3.0) {
    return {b, Matrix::Identity(p, p)};
  }

  int dim() const { return static_cast<int>(D.rows()); }

  void validate() const {
    if (!(b > 2.0)) throw UsageError("G-Wishart degrees of freedom must exceed 2");
    if (D.rows() == 0 || !is_symmetric(D)) throw UsageError("G-Wishart scale must be square and symmetric");
    if (!is_positive_definite(D)) throw NotPositiveDefinite("G-Wishart scale matrix");
  }
};

/// ((b-2)/2) log|K| - tr(DK)/2.
inline double log_unnorm_density(const Matrix& k, const GWishartParams& params) {
  const double logdet = log_det_spd(k, "precision matrix");
  return 0.5 * (params.b - 2.0) * logdet - 0.5 * (params.D.cwiseProduct(k)).sum();
}

// ---------------------------------------------------------------------------
// Iterative completion onto the cone of graph-compatible precision matrices
// ---------------------------------------------------------------------------

struct CompletionOptions {
  double tol = 1e-8;
  int max_sweeps = 10000;
};

/// Covariance W agreeing with sigma on the diagonal and on the edges of g,
/// whose inverse vanishes off g. Nodes are swept in ascending order. The
/// sweep stops once the largest entry change falls below tol times
/// max(1, max_i sigma_ii).
inline Matrix complete_covariance(const Matrix& sigma, const Graph& g,
                                  const CompletionOptions& opts = {}) {
  const int p = g.nodes();
  if (sigma.rows() != p || sigma.cols() != p) throw UsageError("completion: dimension mismatch");
  if (!(opts.tol > 0.0)) throw UsageError("completion tolerance must be positive");

  std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(p));
  bool full = true;
  for (int i = 0; i < p; ++i) {
    nbrs[static_cast<std::size_t>(i)] = g.neighbors(i);
    full = full && static_cast<int>(nbrs[static_cast<std::size_t>(i)].size()) == p - 1;
  }
  if (full) return sigma;

  const double scale = std::max(1.0, sigma.diagonal().maxCoeff());
  Matrix w = sigma;
  std::vector<Matrix> subs(static_cast<std::size_t>(p));
  std::vector<Vector> rhs(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    const auto& ni = nbrs[static_cast<std::size_t>(i)];
    const auto m = static_cast<Eigen::Index>(ni.size());
    subs[static_cast<std::size_t>(i)].resize(m, m);
    rhs[static_cast<std::size_t>(i)].resize(m);
    for (Eigen::Index a = 0; a < m; ++a) rhs[static_cast<std::size_t>(i)](a) = sigma(ni[static_cast<std::size_t>(a)], i);
  }
  Eigen::LLT<Matrix> llt(p);
  Vector beta(p), column(p);
  double change = 0.0;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    change = 0.0;
    for (int i = 0; i < p; ++i) {
      const auto& ni = nbrs[static_cast<std::size_t>(i)];
      const auto m = static_cast<Eigen::Index>(ni.size());
      column.setZero();
      if (m > 0) {
        Matrix& sub = subs[static_cast<std::size_t>(i)];
        for (Eigen::Index a = 0; a < m; ++a)
          for (Eigen::Index c = 0; c < m; ++c)
            sub(a, c) = w(ni[static_cast<std::size_t>(a)], ni[static_cast<std::size_t>(c)]);
        llt.compute(sub);
        if (llt.info() != Eigen::Success) throw NotPositiveDefinite("completion neighbor block");
        beta.head(m) = llt.solve(rhs[static_cast<std::size_t>(i)]);
        for (Eigen::Index a = 0; a < m; ++a) column += w.col(ni[static_cast<std::size_t>(a)]) * beta(a);
      }
      for (int j = 0; j < p; ++j) {
        if (j == i) continue;
        change = std::max(change, std::abs(column(j) - w(j, i)));
        w(j, i) = column(j);
        w(i, j) = column(j);
      }
    }
    if (change < opts.tol * scale) return w;
  }
  throw ConvergenceFailure(opts.max_sweeps, change);
}

/// Inverts a completed covariance and zeroes the (numerically tiny) off-graph entries.
inline Matrix precision_from_completion(const Matrix& w, const Graph& g) {
  Matrix k = inverse_spd(w, "completed covariance");
  for (int i = 0; i < g.nodes(); ++i)
    for (int j = i + 1; j < g.nodes(); ++j)
      if (!g.has_edge(i, j)) k(i, j) = k(j, i) = 0.0;
  return k;
}

inline Matrix complete_to_cone(const Matrix& sigma, const Graph& g, const CompletionOptions& opts = {}) {
  return precision_from_completion(complete_covariance(sigma, g, opts), g);
}

// ---------------------------------------------------------------------------
// Exact sampling
// ---------------------------------------------------------------------------

/// Draws from W_G(b, D) for any graph on dim(D) nodes. Holds the Cholesky
/// factor of D^{-1} so repeated draws skip the factorization.
class GWishartSampler {
 public:
  explicit GWishartSampler(GWishartParams params, CompletionOptions opts = {})
      : params_(std::move(params)), opts_(opts) {
    params_.validate();
    Eigen::LLT<Matrix> llt(inverse_spd(params_.D, "G-Wishart scale"));
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("inverse scale");
    scale_factor_ = llt.matrixL();
  }

  const GWishartParams& params() const noexcept { return params_; }
  int dim() const noexcept { return params_.dim(); }

  /// Unconstrained draw from the density on the full graph: the standard
  /// Wishart with b + p - 1 degrees of freedom and scale D^{-1} (Bartlett).
  Matrix draw_full(Rng& rng) const {
    const int p = dim();
    const double df = params_.b + p - 1.0;
    Matrix a = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
      a(i, i) = std::sqrt(chi_squared(rng, df - i));
      for (int j = 0; j < i; ++j) a(i, j) = standard_normal(rng);
    }
    const Matrix la = scale_factor_ * a;
    Matrix k = la * la.transpose();
    return 0.5 * (k + k.transpose());
  }

  /// Covariance of an unconstrained draw; the completion starts from it.
  Matrix draw_full_covariance(Rng& rng) const { return inverse_spd(draw_full(rng), "Wishart draw"); }

  Matrix draw(const Graph& g, Rng& rng) const {
    check_graph(g);
    const Matrix k_free = draw_full(rng);
    if (g.edge_count() == g.cell_count()) return k_free;
    return complete_to_cone(inverse_spd(k_free, "Wishart draw"), g, opts_);
  }

 private:
  void check_graph(const Graph& g) const {
    if (g.nodes() != dim()) throw UsageError("graph and scale matrix disagree on p");
  }

  GWishartParams params_;
  CompletionOptions opts_;
  Matrix scale_factor_;
};

inline Matrix sample(const GWishartParams& params, const Graph& g, Rng& rng) {
  return GWishartSampler(params).draw(g, rng);
}

// ---------------------------------------------------------------------------
// Normalizing constants
// ---------------------------------------------------------------------------

inline double log_multivariate_gamma(int q, double a) {
  double s = 0.25 * q * (q - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= q; ++j) s += std::lgamma(a + 0.5 * (1 - j));
  return s;
}

/// log I for the full graph on the given (sub-)scale: the Wishart constant.
inline double log_norm_constant_full(double b, const Matrix& d) {
  const int q = static_cast<int>(d.rows());
  if (q == 0) return 0.0;
  const double a = 0.5 * (b + q - 1.0);
  return q * a * std::log(2.0) + log_multivariate_gamma(q, a) - a * log_det_spd(d, "scale block");
}

/// Maximum cardinality search order; a graph is decomposable iff, in this
/// order, every vertex's earlier neighbors form a clique.
inline std::vector<int> max_cardinality_order(const Graph& g) {
  const int p = g.nodes();
  std::vector<int> weight(static_cast<std::size_t>(p), 0), order;
  std::vector<bool> done(static_cast<std::size_t>(p), false);
  for (int step = 0; step < p; ++step) {
    int best = -1;
    for (int v = 0; v < p; ++v)
      if (!done[static_cast<std::size_t>(v)] &&
          (best < 0 || weight[static_cast<std::size_t>(v)] > weight[static_cast<std::size_t>(best)]))
        best = v;
    done[static_cast<std::size_t>(best)] = true;
    order.push_back(best);
    for (int u = 0; u < p; ++u)
      if (!done[static_cast<std::size_t>(u)] && g.has_edge(u, best)) ++weight[static_cast<std::size_t>(u)];
  }
  return order;
}

/// Perfect sequence of (clique-like set, separator) pairs, or nullopt when g
/// is not decomposable.
inline std::optional<std::vector<std::pair<std::vector<int>, std::vector<int>>>> perfect_sequence(
    const Graph& g) {
  const auto order = max_cardinality_order(g);
  std::vector<std::pair<std::vector<int>, std::vector<int>>> seq;
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::vector<int> sep;
    for (std::size_t m = 0; m < k; ++m)
      if (g.has_edge(order[k], order[m])) sep.push_back(order[m]);
    for (std::size_t a = 0; a < sep.size(); ++a)
      for (std::size_t c = a + 1; c < sep.size(); ++c)
        if (!g.has_edge(sep[a], sep[c])) return std::nullopt;
    auto clique = sep;
    clique.push_back(order[k]);
    seq.emplace_back(std::move(clique), std::move(sep));
  }
  return seq;
}

inline bool is_decomposable(const Graph& g) { return perfect_sequence(g).has_value(); }

namespace detail {
inline Matrix sub_block(const Matrix& d, const std::vector<int>& idx) {
  const auto m = static_cast<Eigen::Index>(idx.size());
  Matrix out(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index c = 0; c < m; ++c)
      out(a, c) = d(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(c)]);
  return out;
}
}  // namespace detail

/// Closed-form log I_G(b, D) for decomposable graphs (full and empty included).
inline double log_norm_constant_exact(const GWishartParams& params, const Graph& g) {
  params.validate();
  if (g.nodes() != params.dim()) throw UsageError("graph and scale matrix disagree on p");
  const auto seq = perfect_sequence(g);
  if (!seq) throw UsageError("normalizing constant has no closed form: graph is not decomposable");
  double s = 0.0;
  for (const auto& [clique, sep] : *seq) {
    s += log_norm_constant_full(params.b, detail::sub_block(params.D, clique));
    s -= log_norm_constant_full(params.b, detail::sub_block(params.D, sep));
  }
  return s;
}

/// Monte Carlo log I_G(b, cI) on the upper-triangular Cholesky parametrization
/// K = Psi' Psi: free entries are chi/normal variates and the constrained
/// entries follow from the zero pattern. Only scalar multiples of I are handled.
inline double log_norm_constant_mc(const GWishartParams& params, const Graph& g, long samples, Rng& rng) {
  params.validate();
  const int p = params.dim();
  if (g.nodes() != p) throw UsageError("graph and scale matrix disagree on p");
  if (samples < 1) throw UsageError("Monte Carlo normalizing constant needs samples >= 1");
  const double c = params.D(0, 0);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (std::abs(params.D(i, j) - (i == j ? c : 0.0)) > kSymmetryTol * std::max(1.0, c))
        throw UsageError(
            "Monte Carlo normalizing constant supports only D = c*I; use log_norm_constant_exact "
            "for decomposable graphs or the marginal-likelihood module");

  const double b = params.b;
  std::vector<int> upper_degree(static_cast<std::size_t>(p), 0);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (g.has_edge(i, j)) ++upper_degree[static_cast<std::size_t>(i)];

  double log_const = 0.0;
  for (int i = 0; i < p; ++i) {
    const double nu = upper_degree[static_cast<std::size_t>(i)];
    log_const += 0.5 * (b + nu) * std::log(2.0) + 0.5 * nu * std::log(2.0 * std::numbers::pi) +
                 std::lgamma(0.5 * (b + nu));
  }

  const bool has_missing = g.edge_count() < g.cell_count();
  double log_expectation = 0.0;
  if (has_missing) {
    Matrix psi = Matrix::Zero(p, p);
    std::vector<double> log_terms(static_cast<std::size_t>(samples));
    for (long m = 0; m < samples; ++m) {
      for (int i = 0; i < p; ++i) {
        psi(i, i) = std::sqrt(chi_squared(rng, b + upper_degree[static_cast<std::size_t>(i)]));
        for (int j = i + 1; j < p; ++j) psi(i, j) = g.has_edge(i, j) ? standard_normal(rng) : 0.0;
      }
      double penalty = 0.0;
      for (int r = 0; r < p; ++r)
        for (int s = r + 1; s < p; ++s) {
          if (g.has_edge(r, s)) continue;
          double acc = 0.0;
          for (int k = 0; k < r; ++k) acc += psi(k, r) * psi(k, s);
          psi(r, s) = -acc / psi(r, r);
          penalty += psi(r, s) * psi(r, s);
        }
      log_terms[static_cast<std::size_t>(m)] = -0.5 * penalty;
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : log_terms) mx = std::max(mx, v);
    double acc = 0.0;
    for (double v : log_terms) acc += std::exp(v - mx);
    log_expectation = mx + std::log(acc / static_cast<double>(samples));
  }

  // I_G(b, cI) = c^{-(p(b-2)/2 + p + |E|)} I_G(b, I)
  const double scale_power = -(0.5 * p * (b - 2.0) + p + static_cast<double>(g.edge_count()));
  return log_const + log_expectation + scale_power * std::log(c);
}

}  // namespace bdgm

#endif  // BDGM_GWISHART_HPP
