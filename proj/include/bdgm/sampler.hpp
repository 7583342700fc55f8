#ifndef BDGM_SAMPLER_HPP
#define BDGM_SAMPLER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdgm/error.hpp"
#include "bdgm/graph.hpp"
#include "bdgm/gwishart.hpp"
#include "bdgm/marginal.hpp"
#include "bdgm/rng.hpp"
#include "bdgm/trace.hpp"

namespace bdgm {

enum class StartKind { empty, full, resume };

struct SamplerConfig {
  long iter = 5000;
  std::optional<long> burnin;  // defaults to iter / 2
  Algorithm algorithm = Algorithm::bdmcmc;
  Method method = Method::ggm;
  StartKind g_start = StartKind::empty;
  std::optional<ChainState> resume;
  double prior_df = 3.0;
  bool save_all = false;
  std::uint64_t seed = 0;
  long mc_samples = 200;

  long burnin_count() const { return burnin.value_or(iter / 2); }

  void validate() const {
    if (iter < 1) throw UsageError("iter must be positive");
    const long b = burnin_count();
    if (b < 0 || b >= iter) throw UsageError("burnin must satisfy 0 <= burnin < iter");
    if (!(prior_df > 2.0)) throw UsageError("prior degrees of freedom must exceed 2");
    if (mc_samples < 1) throw UsageError("mc_samples must be positive");
    if (g_start == StartKind::resume && !resume) throw UsageError("resume start needs a saved state");
  }
};

/// Sample cross-product Z'Z and the number of rows it summarizes.
struct SufficientStats {
  Matrix S;
  long n = 0;

  static SufficientStats from_data(const Matrix& data) {
    if (!data.allFinite()) throw InputError("data contain non-finite values");
    return {data.transpose() * data, static_cast<long>(data.rows())};
  }
};

inline constexpr double kMinRate = 1e-300;
inline constexpr double kMaxRate = 1e300;

struct Rates {
  std::vector<double> rate;  // one per upper-triangle cell
  double birth_total = 0.0;
  double death_total = 0.0;
  long clamped = 0;

  double total() const { return birth_total + death_total; }
};

/// Birth rates for absent edges and death rates for present ones: the
/// posterior ratio of the one-edge neighbor to the current graph, capped at 1
/// so that the sojourn-weighted chain balances against the posterior itself.
inline Rates bd_rates(const ChainState& state, MarginalModel& model) {
  const Graph& g = state.g;
  const double here = model.log_marginal(g);
  Rates r;
  r.rate.resize(g.cell_count());
  Graph scratch = g;
  for (std::size_t k = 0; k < g.cell_count(); ++k) {
    const Edge e = pair_at(g.nodes(), k);
    scratch.toggle(e);
    const double log_ratio = model.log_marginal(scratch) - here;
    scratch.toggle(e);
    double rate = std::exp(std::min(log_ratio, 0.0));
    if (!(rate >= kMinRate) || rate > kMaxRate) {
      rate = std::clamp(std::isnan(rate) ? kMinRate : rate, kMinRate, kMaxRate);
      ++r.clamped;
    }
    r.rate[k] = rate;
    (g.has_cell(k) ? r.death_total : r.birth_total) += rate;
  }
  return r;
}

/// Index chosen by cumulative-sum inversion over the rates in cell order.
inline std::size_t select_jump(const Rates& rates, Rng& rng) {
  const double target = uniform01(rng) * rates.total();
  double acc = 0.0;
  for (std::size_t k = 0; k < rates.rate.size(); ++k) {
    acc += rates.rate[k];
    if (target < acc) return k;
  }
  return rates.rate.size() - 1;
}

/// Posterior G-Wishart for the precision matrix, W_G(b + n, D + S).
inline GWishartSampler posterior_sampler(const MarginalModel& model) {
  const auto& prior = model.backend().prior;
  return GWishartSampler({prior.b + static_cast<double>(model.sample_size()),
                          prior.D + model.cross_product()});
}

struct BdStep {
  ChainState next;
  double weight = 0.0;  // expected sojourn of the state we left
  Edge edge;
  JumpKind kind = JumpKind::birth;
  long clamped = 0;
};

inline BdStep bd_step(const ChainState& state, MarginalModel& model, const GWishartSampler& posterior,
                      Rng& rng) {
  const Rates rates = bd_rates(state, model);
  if (!(rates.total() > 0.0)) throw NumericalError("all birth and death rates are zero");
  const std::size_t k = select_jump(rates, rng);
  BdStep step;
  step.weight = 1.0 / rates.total();
  step.edge = pair_at(state.g.nodes(), k);
  step.kind = state.g.has_cell(k) ? JumpKind::death : JumpKind::birth;
  step.clamped = rates.clamped;
  step.next.g = state.g.toggled(step.edge);
  step.next.K = posterior.draw(step.next.g, rng);
  step.next.iteration = state.iteration + 1;
  return step;
}

inline BdStep bd_step(const ChainState& state, MarginalModel& model, Rng& rng) {
  return bd_step(state, model, posterior_sampler(model), rng);
}

struct RjStep {
  ChainState next;
  bool accepted = false;
};

/// Uniform single-edge toggle with Metropolis acceptance; K is redrawn from
/// its full conditional whether or not the move is accepted.
inline RjStep rj_step(const ChainState& state, MarginalModel& model, const GWishartSampler& posterior,
                      Rng& rng) {
  const auto cells = static_cast<std::int64_t>(state.g.cell_count());
  const Edge e = pair_at(state.g.nodes(), static_cast<std::size_t>(uniform_int(rng, 0, cells - 1)));
  Graph proposal = state.g.toggled(e);
  const double log_ratio = model.log_posterior_ratio(state.g, proposal);
  RjStep step;
  step.accepted = log_ratio >= 0.0 || uniform01(rng) < std::exp(log_ratio);
  step.next.g = step.accepted ? std::move(proposal) : state.g;
  step.next.K = posterior.draw(step.next.g, rng);
  step.next.iteration = state.iteration + 1;
  return step;
}

inline RjStep rj_step(const ChainState& state, MarginalModel& model, Rng& rng) {
  return rj_step(state, model, posterior_sampler(model), rng);
}

/// Stream ids for the seeds derived from SamplerConfig::seed.
enum SeedStream : std::uint64_t { chain_stream = 0, bank_stream = 1, latent_stream = 2 };

inline MarginalBackend backend_for(const SamplerConfig& config, int p) {
  return {config.mc_samples, GWishartParams::identity(p, config.prior_df)};
}

inline ChainState initial_state(const SamplerConfig& config, int p, const GWishartSampler& posterior,
                                Rng& rng) {
  if (config.g_start == StartKind::resume) {
    const ChainState& saved = *config.resume;
    if (saved.g.nodes() != p || saved.K.rows() != p) throw InputError("saved state has the wrong p");
    return saved;
  }
  ChainState s;
  s.g = config.g_start == StartKind::full ? Graph::full(p) : Graph(p);
  s.K = posterior.draw(s.g, rng);
  return s;
}

/// One transition of the configured algorithm from `state`; records the
/// state we leave into `trace` when `record` is set.
inline ChainState advance(const ChainState& state, const SamplerConfig& config, MarginalModel& model,
                          const GWishartSampler& posterior, Rng& rng, ChainTrace& trace, bool record) {
  if (config.algorithm == Algorithm::bdmcmc) {
    BdStep step = bd_step(state, model, posterior, rng);
    trace.clamped_rates += step.clamped;
    if (record) trace.record(state.g, state.K, step.weight);
    return std::move(step.next);
  }
  if (record) trace.record(state.g, state.K, 1.0);
  return rj_step(state, model, posterior, rng).next;
}

/// Gaussian graphical model chain on sufficient statistics.
inline ChainTrace run_chain(const SufficientStats& stats, const SamplerConfig& config) {
  config.validate();
  const int p = static_cast<int>(stats.S.rows());
  if (p < 2) throw InputError("need at least two variables");
  if (stats.n < 1) throw InputError("need at least one observation");
  if (!stats.S.allFinite()) throw InputError("cross-product matrix is not finite");

  MarginalModel model(backend_for(config, p), stats.S, stats.n, mix_seed(config.seed, bank_stream));
  const GWishartSampler posterior = posterior_sampler(model);
  Rng rng(mix_seed(config.seed, chain_stream));

  const long burnin = config.burnin_count();
  ChainTrace trace(p, config.algorithm, Method::ggm, config.iter, burnin, config.save_all);
  ChainState state = initial_state(config, p, posterior, rng);
  trace.initial_state = state;
  for (long t = 0; t < config.iter; ++t) state = advance(state, config, model, posterior, rng, trace, t >= burnin);
  trace.final_state = state;
  return trace;
}

inline ChainTrace run_chain(const Matrix& data, const SamplerConfig& config) {
  return run_chain(SufficientStats::from_data(data), config);
}

}  // namespace bdgm

#endif  // BDGM_SAMPLER_HPP
