#ifndef BDGM_EVALUATE_HPP
#define BDGM_EVALUATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bdgm/error.hpp"
#include "bdgm/graph.hpp"
#include "bdgm/gwishart.hpp"
#include "bdgm/rng.hpp"
#include "bdgm/trace.hpp"

namespace bdgm {

struct MetricsReport {
  long tp = 0, tn = 0, fp = 0, fn = 0;
  double tpr = 0.0, fpr = 0.0, accuracy = 0.0, f1 = 0.0, ppv = 0.0;
};

namespace detail {
inline double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }
}  // namespace detail

/// Confusion counts and rates from cell counts.
inline MetricsReport metrics_from_counts(long tp, long tn, long fp, long fn) {
  MetricsReport m{tp, tn, fp, fn};
  const auto d = [](long v) { return static_cast<double>(v); };
  m.tpr = detail::ratio_or_zero(d(tp), d(tp + fn));
  m.fpr = detail::ratio_or_zero(d(fp), d(fp + tn));
  m.accuracy = detail::ratio_or_zero(d(tp + tn), d(tp + tn + fp + fn));
  m.f1 = detail::ratio_or_zero(2.0 * d(tp), d(2 * tp + fp + fn));
  m.ppv = detail::ratio_or_zero(d(tp), d(tp + fp));
  return m;
}

inline MetricsReport compare(const Graph& truth, const Graph& estimate) {
  if (truth.nodes() != estimate.nodes()) throw UsageError("compare: graphs differ in node count");
  long tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t k = 0; k < truth.cell_count(); ++k) {
    const bool t = truth.has_cell(k), e = estimate.has_cell(k);
    if (t && e) ++tp;
    else if (!t && !e) ++tn;
    else if (e) ++fp;
    else ++fn;
  }
  return metrics_from_counts(tp, tn, fp, fn);
}

/// Rows in the order TP, TN, FP, FN, TPR, FPR, accuracy, F1, PPV with one
/// column per named report.
inline std::string format_compare_table(const std::vector<std::string>& names,
                                        const std::vector<MetricsReport>& reports) {
  if (names.size() != reports.size()) throw UsageError("one name per report is required");
  std::size_t width = 8;
  for (const auto& n : names) width = std::max(width, n.size() + 2);
  const auto pad = [&](const std::string& s) { return std::string(width > s.size() ? width - s.size() : 0, ' ') + s; };
  const auto num = [](double v) {
    char buf[32];
    if (v == std::round(v)) std::snprintf(buf, sizeof buf, "%.0f", v);
    else std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::string out = std::string(10, ' ');
  for (const auto& n : names) out += pad(n);
  out += '\n';
  const auto row = [&](const char* label, auto get) {
    std::string line = label;
    line.resize(10, ' ');
    for (const auto& r : reports) line += pad(get(r));
    out += line + '\n';
  };
  row("true pos", [](const MetricsReport& r) { return std::to_string(r.tp); });
  row("true neg", [](const MetricsReport& r) { return std::to_string(r.tn); });
  row("fals pos", [](const MetricsReport& r) { return std::to_string(r.fp); });
  row("fals neg", [](const MetricsReport& r) { return std::to_string(r.fn); });
  row("TPR", [&](const MetricsReport& r) { return num(r.tpr); });
  row("FPR", [&](const MetricsReport& r) { return num(r.fpr); });
  row("accuracy", [&](const MetricsReport& r) { return num(r.accuracy); });
  row("F1-score", [&](const MetricsReport& r) { return num(r.f1); });
  row("PPV", [&](const MetricsReport& r) { return num(r.ppv); });
  return out;
}

struct RocCurve {
  std::vector<double> thresholds;
  std::vector<double> fpr;  // one point per threshold
  std::vector<double> tpr;
  double auc = 0.0;           // exact, from the full sorted sweep
  double polyline_auc = 0.0;  // trapezoid over the threshold points
};

namespace detail {

struct Scored {
  double score;
  bool positive;
};

inline std::vector<Scored> scored_cells(const Graph& truth, const Matrix& links) {
  const int p = truth.nodes();
  if (links.rows() != p || links.cols() != p) throw UsageError("roc: plinks has the wrong dimension");
  std::vector<Scored> cells;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) cells.push_back({links(i, j), truth.has_edge(i, j)});
  return cells;
}

inline double trapezoid(std::vector<std::pair<double, double>> pts) {
  pts.emplace_back(0.0, 0.0);
  pts.emplace_back(1.0, 1.0);
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k)
    area += (pts[k].first - pts[k - 1].first) * 0.5 * (pts[k].second + pts[k - 1].second);
  return area;
}

}  // namespace detail

/// Area under the ROC curve swept over every distinct score; ties count half.
inline double roc_auc(const Graph& truth, const Matrix& links) {
  auto cells = detail::scored_cells(truth, links);
  double pos = 0.0, neg = 0.0;
  for (const auto& c : cells) (c.positive ? pos : neg) += 1.0;
  if (pos == 0.0 || neg == 0.0) throw UsageError("roc: true graph is empty or full");
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  std::vector<std::pair<double, double>> pts;
  double tp = 0.0, fp = 0.0;
  for (std::size_t k = 0; k < cells.size();) {
    std::size_t e = k;
    while (e < cells.size() && cells[e].score == cells[k].score) {
      (cells[e].positive ? tp : fp) += 1.0;
      ++e;
    }
    pts.emplace_back(fp / neg, tp / pos);
    k = e;
  }
  return detail::trapezoid(std::move(pts));
}

/// Curve at cut_num equally spaced thresholds over [0, 1]; an edge is called
/// present when its probability exceeds the threshold.
inline RocCurve roc(const Graph& truth, const Matrix& links, int cut_num = 20) {
  if (cut_num < 2) throw UsageError("roc: cut_num must be at least 2");
  RocCurve c;
  c.auc = roc_auc(truth, links);
  const auto cells = detail::scored_cells(truth, links);
  double pos = 0.0, neg = 0.0;
  for (const auto& s : cells) (s.positive ? pos : neg) += 1.0;
  std::vector<std::pair<double, double>> pts;
  for (int t = 0; t < cut_num; ++t) {
    const double th = static_cast<double>(t) / (cut_num - 1);
    double tp = 0.0, fp = 0.0;
    for (const auto& s : cells)
      if (s.score > th) (s.positive ? tp : fp) += 1.0;
    c.thresholds.push_back(th);
    c.fpr.push_back(fp / neg);
    c.tpr.push_back(tp / pos);
    pts.emplace_back(fp / neg, tp / pos);
  }
  c.polyline_auc = detail::trapezoid(std::move(pts));
  return c;
}

/// Sample autocorrelation at lags 0..max_lag; a constant series gives 1
/// at lag 0 and 0 elsewhere.
inline std::vector<double> acf(const std::vector<double>& x, int max_lag) {
  const std::size_t n = x.size();
  std::vector<double> out(static_cast<std::size_t>(std::max(0, max_lag)) + 1, 0.0);
  if (n == 0) return out;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  out[0] = 1.0;
  if (c0 <= 0.0) return out;
  for (std::size_t k = 1; k < out.size() && k < n; ++k) {
    double ck = 0.0;
    for (std::size_t t = k; t < n; ++t) ck += (x[t] - mean) * (x[t - k] - mean);
    out[k] = ck / c0;
  }
  return out;
}

/// Partial autocorrelations at lags 1..max by the Durbin-Levinson recursion.
inline std::vector<double> pacf(const std::vector<double>& rho) {
  const std::size_t m = rho.empty() ? 0 : rho.size() - 1;
  std::vector<double> out(m, 0.0), phi(m + 1, 0.0), prev(m + 1, 0.0);
  for (std::size_t k = 1; k <= m; ++k) {
    double num = rho[k], den = 1.0;
    for (std::size_t j = 1; j < k; ++j) {
      num -= prev[j] * rho[k - j];
      den -= prev[j] * rho[j];
    }
    const double a = std::abs(den) > 1e-300 ? num / den : 0.0;
    phi[k] = a;
    for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - a * prev[k - j];
    out[k - 1] = a;
    prev = phi;
  }
  return out;
}

struct DiagBundle {
  std::vector<Edge> edges;
  std::vector<std::vector<double>> running;  // running[e][t]: estimate after record t
  std::vector<double> sizes;
  std::vector<double> acf;
  std::vector<double> pacf;  // lags 1..
};

inline constexpr int kDiagEdgeCap = 100;
inline constexpr int kDiagAllEdgesMaxP = 15;

/// Convergence series of a trace. Running edge estimates need the key
/// history and are left empty without it. Above p = 15 with no subset, 100
/// edges are picked uniformly at random.
inline DiagBundle diag_series(const ChainTrace& trace, std::optional<std::vector<Edge>> subset = std::nullopt,
                              std::uint64_t seed = 0) {
  if (trace.empty()) throw UsageError("trace holds no post-burn-in samples");
  DiagBundle d;
  if (subset) {
    d.edges = *subset;
  } else {
    for (std::size_t k = 0; k < pair_count(trace.p); ++k) d.edges.push_back(pair_at(trace.p, k));
    if (trace.p > kDiagAllEdgesMaxP && d.edges.size() > static_cast<std::size_t>(kDiagEdgeCap)) {
      Rng rng(seed);
      for (std::size_t k = 0; k < static_cast<std::size_t>(kDiagEdgeCap); ++k) {
        const auto pick = static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(k),
                                                               static_cast<std::int64_t>(d.edges.size() - 1)));
        std::swap(d.edges[k], d.edges[pick]);
      }
      d.edges.resize(static_cast<std::size_t>(kDiagEdgeCap));
    }
  }
  const std::size_t t_count = trace.records();
  if (trace.keys) {
    d.running.assign(d.edges.size(), std::vector<double>(t_count));
    std::vector<double> acc(d.edges.size(), 0.0);
    double total = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) {
      const Graph g = trace.keys->graph(t);
      const double w = trace.weights[t];
      total += w;
      for (std::size_t e = 0; e < d.edges.size(); ++e) {
        if (g.has_edge(d.edges[e].i, d.edges[e].j)) acc[e] += w;
        d.running[e][t] = acc[e] / total;
      }
    }
  }
  d.sizes.assign(trace.sizes.begin(), trace.sizes.end());
  const int max_lag = static_cast<int>(std::min<std::size_t>(50, t_count / 4));
  d.acf = acf(d.sizes, max_lag);
  d.pacf = pacf(d.acf);
  return d;
}

}  // namespace bdgm

#endif  // BDGM_EVALUATE_HPP
