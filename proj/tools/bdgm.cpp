#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bdgm.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using bdgm::io::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Manifest {
 public:
  Manifest(std::string command, json config) : command_(std::move(command)), config_(std::move(config)) {}

  void timing(const std::string& phase, double secs) { timings_[phase] = secs; }
  void output(const fs::path& p) { outputs_.push_back(p.string()); }
  json& config() { return config_; }

  void write(const fs::path& dir) {
    for (const auto& o : outputs_)
      if (!fs::exists(o)) throw bdgm::UsageError("expected output was not written: " + o);
    json j;
    j["command"] = command_;
    j["version"] = BDGM_VERSION;
    j["config"] = config_;
    j["timings_seconds"] = timings_;
    j["outputs"] = outputs_;
    bdgm::io::write_json(dir / "manifest.json", j);
  }

 private:
  std::string command_;
  json config_;
  std::map<std::string, double> timings_;
  std::vector<std::string> outputs_;
};

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BDGM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream ss(s);
  while (std::getline(ss, tok, ',')) if (!tok.empty()) out.push_back(tok);
  return out;
}

void print_matrix(std::ostream& os, const std::string& name, const bdgm::Matrix& m, const std::vector<std::string>& labels,
                  bool upper_only, int decimals) {
  os << "$" << name << "\n";
  const int p = static_cast<int>(m.rows());
  std::size_t width = static_cast<std::size_t>(decimals + 4);
  for (const auto& l : labels) width = std::max(width, l.size() + 1);
  os << std::string(width, ' ');
  for (const auto& l : labels) os << std::setw(static_cast<int>(width)) << l;
  os << "\n";
  for (int i = 0; i < p; ++i) {
    os << std::left << std::setw(static_cast<int>(width)) << labels[static_cast<std::size_t>(i)] << std::right;
    for (int j = 0; j < p; ++j) {
      std::ostringstream cell;
      if (upper_only && j <= i) cell << ".";
      else if (decimals == 0) cell << (m(i, j) != 0.0 ? "1" : ".");
      else cell << std::fixed << std::setprecision(decimals) << m(i, j);
      os << std::setw(static_cast<int>(width)) << cell.str();
    }
    os << "\n";
  }
  os << "\n";
}

bdgm::StartKind parse_start(const std::string& s, std::optional<fs::path>& resume) {
  if (s == "empty") return bdgm::StartKind::empty;
  if (s == "full") return bdgm::StartKind::full;
  if (s.rfind("resume:", 0) == 0) {
    resume = fs::path(s.substr(7));
    return bdgm::StartKind::resume;
  }
  throw bdgm::UsageError("--g-start must be empty, full or resume:PATH");
}

// ---------------------------------------------------------------------------

struct SimArgs {
  int p = 10;
  long n = 2;
  std::string graph = "random";
  std::string type = "Gaussian";
  int cut = 4;
  double prob = 0.2;
  double missing = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_sim(const SimArgs& a) {
  const auto t0 = Clock::now();
  bdgm::SimSpec spec;
  spec.n = a.n;
  spec.p = a.p;
  spec.type = bdgm::parse_data_type(a.type);
  spec.family.kind = bdgm::parse_family(a.graph);
  spec.family.prob = a.prob;
  spec.cut = a.cut;
  bdgm::Rng rng(a.seed);
  auto sim = bdgm::simulate_data(spec, rng);
  if (a.missing > 0.0) bdgm::mask_at_random(sim.data, a.missing, rng);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  Manifest m("sim", {{"p", a.p}, {"n", a.n}, {"graph", a.graph}, {"type", a.type}, {"cut", a.cut},
                     {"prob", a.prob}, {"missing", a.missing}, {"seed", a.seed}});
  bdgm::io::write_mixed_data(dir / "data.csv", sim.data);
  bdgm::io::write_graph_csv(dir / "graph.csv", sim.graph);
  bdgm::io::write_matrix_csv(dir / "ktrue.csv", sim.K);
  bdgm::io::write_kinds(dir / "kinds.txt", sim.data.kinds);
  for (const char* f : {"data.csv", "graph.csv", "ktrue.csv", "kinds.txt"}) m.output(dir / f);
  m.timing("simulate", seconds_since(t0));
  m.write(dir);
  std::cout << "wrote " << sim.data.rows() << " x " << sim.data.dim() << " " << a.type << " data ("
            << sim.graph.edge_count() << " true edges) to " << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string data, kinds, out, na = "NA";
  long iter = 5000;
  long burnin = -1;
  std::string algorithm = "bdmcmc", method = "ggm", g_start = "empty";
  double prior_df = 3.0;
  bool save_all = false;
  std::uint64_t seed = 0;
  long mc_samples = 200;
  double cut = 0.5;
};

void write_run_outputs(const fs::path& dir, const bdgm::ChainTrace& trace, double cut, Manifest& m) {
  const auto labels = bdgm::default_labels(trace.p);
  const auto summary = bdgm::summarize(trace, cut);
  bdgm::io::save_trace(dir, trace);
  bdgm::io::write_matrix_csv(dir / "plinks.csv", summary.plinks);
  if (trace.has_k) bdgm::io::write_matrix_csv(dir / "khat.csv", summary.k_hat);
  bdgm::io::write_graph_csv(dir / "selected.csv", summary.selected);
  bdgm::io::write_json(dir / "summary.json", bdgm::io::summary_json(summary, cut, labels));
  if (trace.final_state) bdgm::io::write_json(dir / "state.json", bdgm::io::state_json(*trace.final_state));
  for (const char* f : {bdgm::io::kTraceFile, bdgm::io::kEdgeAccFile, "plinks.csv", "selected.csv", "summary.json"})
    m.output(dir / f);
  if (trace.has_k) {
    m.output(dir / "khat.csv");
    m.output(dir / bdgm::io::kKAccFile);
  }
  if (trace.final_state) m.output(dir / "state.json");
}

int cmd_run(const RunArgs& a) {
  const auto t0 = Clock::now();
  bdgm::SamplerConfig cfg;
  cfg.iter = a.iter;
  if (a.burnin >= 0) cfg.burnin = a.burnin;
  cfg.algorithm = bdgm::parse_algorithm(a.algorithm);
  cfg.method = bdgm::parse_method(a.method);
  std::optional<fs::path> resume_path;
  cfg.g_start = parse_start(a.g_start, resume_path);
  if (resume_path) cfg.resume = bdgm::io::state_from_json(bdgm::io::read_json(*resume_path));
  cfg.prior_df = a.prior_df;
  cfg.save_all = a.save_all;
  cfg.seed = a.seed;
  cfg.mc_samples = a.mc_samples;
  cfg.validate();

  std::vector<bdgm::VarKind> kinds;
  if (!a.kinds.empty()) kinds = bdgm::io::read_kinds(a.kinds);
  else if (cfg.method == bdgm::Method::gcgm) throw bdgm::UsageError("--method gcgm requires --kinds");
  const auto data = bdgm::io::read_mixed_data(a.data, kinds, a.na);
  const double load_secs = seconds_since(t0);

  const auto t1 = Clock::now();
  bdgm::ChainTrace trace;
  if (cfg.method == bdgm::Method::gcgm) {
    trace = bdgm::run_chain_gcgm(data, cfg);
  } else {
    if (data.any_missing()) throw bdgm::InputError("missing cells need --method gcgm");
    trace = bdgm::run_chain(data.y, cfg);
  }
  const double chain_secs = seconds_since(t1);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  Manifest m("run", {{"data", a.data}, {"kinds", a.kinds}, {"iter", cfg.iter}, {"burnin", cfg.burnin_count()},
                     {"algorithm", a.algorithm}, {"method", a.method}, {"g_start", a.g_start},
                     {"prior_df", cfg.prior_df}, {"save_all", cfg.save_all}, {"seed", cfg.seed},
                     {"mc_samples", cfg.mc_samples}, {"na_token", a.na}, {"cut", a.cut}});
  const auto t2 = Clock::now();
  write_run_outputs(dir, trace, a.cut, m);
  m.config()["clamped_rates"] = trace.clamped_rates;
  m.timing("load", load_secs);
  m.timing("chain", chain_secs);
  m.timing("export", seconds_since(t2));
  m.write(dir);
  if (trace.clamped_rates > 0)
    std::cerr << "warning: " << trace.clamped_rates << " rates hit the clamp bounds\n";
  std::cout << a.algorithm << "/" << a.method << ": " << cfg.iter << " iterations in " << std::fixed
            << std::setprecision(2) << chain_secs << " s; outputs in " << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_summary(const std::string& run, double cut) {
  const fs::path dir(run);
  const auto trace = bdgm::io::load_trace(dir);
  const auto s = bdgm::summarize(trace, cut);
  const auto labels = bdgm::default_labels(trace.p);
  print_matrix(std::cout, "selected_graph", bdgm::io::adjacency(s.selected), labels, false, 0);
  print_matrix(std::cout, "p_links", s.plinks, labels, true, 2);
  if (trace.has_k) print_matrix(std::cout, "K_hat", s.k_hat, labels, false, 2);
  if (!s.graph_table.empty()) {
    std::cout << "$graph_table (top " << std::min<std::size_t>(5, s.graph_table.size()) << ")\n";
    for (std::size_t r = 0; r < std::min<std::size_t>(5, s.graph_table.size()); ++r)
      std::cout << "  " << s.graph_table[r].key.hex() << "  " << std::fixed << std::setprecision(4)
                << s.graph_table[r].weight << "\n";
  }
  bdgm::io::write_json(dir / "summary.json", bdgm::io::summary_json(s, cut, labels));
  return 0;
}

int cmd_select(const std::string& run, const std::string& plinks_path, double cut, bool map, const std::string& out) {
  bdgm::Graph g;
  if (map) {
    if (run.empty()) throw bdgm::UsageError("--map needs --run");
    g = bdgm::select_map(bdgm::io::load_trace(run));
  } else if (!plinks_path.empty()) {
    g = bdgm::select_bma(bdgm::io::read_matrix_csv(plinks_path), cut);
  } else if (!run.empty()) {
    g = bdgm::select_bma(bdgm::plinks(bdgm::io::load_trace(run)), cut);
  } else {
    throw bdgm::UsageError("select needs --run or --plinks");
  }
  print_matrix(std::cout, "selected_graph", bdgm::io::adjacency(g), bdgm::default_labels(g.nodes()), false, 0);
  if (!out.empty()) bdgm::io::write_graph_csv(out, g);
  return 0;
}

int cmd_compare(const std::vector<std::string>& files, std::vector<std::string> names, const std::string& json_out) {
  if (files.size() < 2) throw bdgm::UsageError("compare needs a truth file and at least one estimate");
  const auto truth = bdgm::io::read_graph_csv(files[0]);
  if (names.empty()) {
    names.push_back("True graph");
    for (std::size_t k = 1; k < files.size(); ++k) names.push_back(fs::path(files[k]).stem().string());
  } else if (names.size() == files.size() - 1) {
    names.insert(names.begin(), "True graph");
  }
  if (names.size() != files.size()) throw bdgm::UsageError("--names needs one name per estimate");
  std::vector<bdgm::MetricsReport> reports{bdgm::compare(truth, truth)};
  for (std::size_t k = 1; k < files.size(); ++k) reports.push_back(bdgm::compare(truth, bdgm::io::read_graph_csv(files[k])));
  std::cout << bdgm::format_compare_table(names, reports);
  if (!json_out.empty()) {
    json j = json::array();
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const auto& r = reports[k];
      j.push_back({{"name", names[k]}, {"tp", r.tp}, {"tn", r.tn}, {"fp", r.fp}, {"fn", r.fn}, {"tpr", r.tpr},
                   {"fpr", r.fpr}, {"accuracy", r.accuracy}, {"f1", r.f1}, {"ppv", r.ppv}});
    }
    bdgm::io::write_json(json_out, j);
  }
  return 0;
}

int cmd_roc(const std::string& truth_path, const std::vector<std::string>& plinks_paths, int cut_num,
            const std::string& out, bool svg) {
  if (plinks_paths.empty()) throw bdgm::UsageError("roc needs at least one --plinks file");
  const auto truth = bdgm::io::read_graph_csv(truth_path);
  const fs::path dir(out);
  fs::create_directories(dir);
  std::vector<bdgm::tools::Series> series;
  json report = json::array();
  for (std::size_t k = 0; k < plinks_paths.size(); ++k) {
    const auto curve = bdgm::roc(truth, bdgm::io::read_matrix_csv(plinks_paths[k]), cut_num);
    const std::string tag = plinks_paths.size() == 1 ? "roc" : "roc" + std::to_string(k + 1);
    std::ofstream csv(dir / (tag + ".csv"));
    csv << "threshold,fpr,tpr\n";
    for (std::size_t t = 0; t < curve.thresholds.size(); ++t)
      csv << curve.thresholds[t] << "," << curve.fpr[t] << "," << curve.tpr[t] << "\n";
    report.push_back({{"plinks", plinks_paths[k]}, {"auc", curve.auc}, {"polyline_auc", curve.polyline_auc}});
    std::cout << plinks_paths[k] << ": AUC " << std::fixed << std::setprecision(4) << curve.auc << " (threshold polyline "
              << curve.polyline_auc << ")\n";
    bdgm::tools::Series s{fs::path(plinks_paths[k]).parent_path().filename().string(), {0.0}, {0.0}};
    for (std::size_t t = curve.fpr.size(); t-- > 0;) {
      s.x.push_back(curve.fpr[t]);
      s.y.push_back(curve.tpr[t]);
    }
    s.x.push_back(1.0);
    s.y.push_back(1.0);
    series.push_back(std::move(s));
  }
  bdgm::io::write_json(dir / "roc.json", report);
  if (svg) bdgm::tools::write_line_svg(dir / "roc.svg", series, "ROC", "False Positive Rate", "True Positive Rate");
  return 0;
}

std::vector<bdgm::Edge> parse_edges(const std::string& s) {
  std::vector<bdgm::Edge> out;
  for (const auto& tok : split_list(s)) {
    const auto dash = tok.find('-');
    if (dash == std::string::npos) throw bdgm::UsageError("edges are written i-j (1-based): '" + tok + "'");
    const int i = std::stoi(tok.substr(0, dash)) - 1, j = std::stoi(tok.substr(dash + 1)) - 1;
    if (i < 0 || j < 0 || i == j) throw bdgm::UsageError("invalid edge '" + tok + "'");
    out.push_back(bdgm::Edge(i, j));
  }
  return out;
}

int cmd_diag(const std::string& run, const std::string& out, const std::string& edges, std::uint64_t seed, bool svg) {
  const auto trace = bdgm::io::load_trace(run);
  std::optional<std::vector<bdgm::Edge>> subset;
  if (!edges.empty()) subset = parse_edges(edges);
  const auto d = bdgm::diag_series(trace, subset, seed);
  const fs::path dir(out);
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "size.csv");
    f << "record,size\n";
    for (std::size_t t = 0; t < d.sizes.size(); ++t) f << t + 1 << "," << d.sizes[t] << "\n";
  }
  {
    std::ofstream f(dir / "acf.csv");
    f << "lag,acf,pacf\n";
    for (std::size_t k = 0; k < d.acf.size(); ++k)
      f << k << "," << d.acf[k] << "," << (k == 0 ? std::string("NA") : std::to_string(d.pacf[k - 1])) << "\n";
  }
  if (!d.running.empty()) {
    std::ofstream f(dir / "running_plinks.csv");
    f << "record";
    for (const auto& e : d.edges) f << ",X" << e.i + 1 << "-X" << e.j + 1;
    f << "\n";
    for (std::size_t t = 0; t < trace.records(); ++t) {
      f << t + 1;
      for (const auto& r : d.running) f << "," << r[t];
      f << "\n";
    }
  } else {
    std::cerr << "note: running edge estimates need a trace saved with --save-all\n";
  }
  if (svg) {
    std::vector<double> idx(d.sizes.size());
    for (std::size_t t = 0; t < idx.size(); ++t) idx[t] = static_cast<double>(t + 1);
    bdgm::tools::write_line_svg(dir / "size.svg", {{"", idx, d.sizes}}, "Trace of graph size", "Iteration", "Graph size");
    std::vector<double> lags(d.acf.size());
    for (std::size_t k = 0; k < lags.size(); ++k) lags[k] = static_cast<double>(k);
    bdgm::tools::write_line_svg(dir / "acf.svg", {{"", lags, d.acf}}, "ACF of graph size", "Lag", "ACF");
    if (!d.running.empty()) {
      std::vector<bdgm::tools::Series> s;
      for (const auto& r : d.running) s.push_back({"", idx, r});
      bdgm::tools::write_line_svg(dir / "plinks_trace.svg", s, "Trace of posterior link probabilities", "Iteration",
                                  "Posterior link probability");
    }
  }
  std::cout << "diagnostics for " << d.edges.size() << " edges over " << trace.records() << " records in "
            << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct StudyArgs {
  std::string graphs = "random,circle";
  int p = 20;
  long n = 40;
  int reps = 10;
  std::string algorithms = "bdmcmc";
  long iter = 5000;
  long burnin = -1;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  long mc_samples = 200;
  double cut = 0.5;
  std::string out;
};

struct RepResult {
  bool ok = false;
  std::string error;
  double f1_bma = 0.0, f1_map = 0.0;
  double secs_per_1000 = 0.0;
  std::size_t key_bytes = 0;
};

int cmd_study(const StudyArgs& a) {
  const auto graphs = split_list(a.graphs);
  const auto algorithms = split_list(a.algorithms);
  if (graphs.empty() || algorithms.empty() || a.reps < 1) throw bdgm::UsageError("study needs graphs, algorithms and reps >= 1");
  struct Job {
    std::string graph, algorithm;
    int rep;
  };
  std::vector<Job> jobs;
  for (const auto& g : graphs) {
    bdgm::parse_family(g);
    for (const auto& alg : algorithms) {
      bdgm::parse_algorithm(alg);
      for (int r = 0; r < a.reps; ++r) jobs.push_back({g, alg, r});
    }
  }
  std::vector<RepResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto t0 = Clock::now();
  const unsigned workers = std::min<unsigned>(thread_count(a.threads), static_cast<unsigned>(jobs.size()));
  std::mutex log_mutex;
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
      const auto& job = jobs[k];
      RepResult& res = results[k];
      try {
        const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(job.rep);
        bdgm::SimSpec spec;
        spec.n = a.n;
        spec.p = a.p;
        spec.family.kind = bdgm::parse_family(job.graph);
        bdgm::Rng rng(seed);
        const auto sim = bdgm::simulate_data(spec, rng);
        bdgm::SamplerConfig cfg;
        cfg.iter = a.iter;
        if (a.burnin >= 0) cfg.burnin = a.burnin;
        cfg.algorithm = bdgm::parse_algorithm(job.algorithm);
        cfg.save_all = true;
        cfg.seed = seed;
        cfg.mc_samples = a.mc_samples;
        const auto tc = Clock::now();
        const auto trace = bdgm::run_chain(sim.data.y, cfg);
        res.secs_per_1000 = seconds_since(tc) * 1000.0 / static_cast<double>(cfg.iter);
        res.f1_bma = bdgm::compare(sim.graph, bdgm::select_bma(bdgm::plinks(trace), a.cut)).f1;
        res.f1_map = bdgm::compare(sim.graph, bdgm::select_map(trace)).f1;
        res.key_bytes = trace.keys->bytes_used();
        res.ok = true;
      } catch (const std::exception& e) {
        res.error = e.what();
      }
      std::lock_guard lock(log_mutex);
      std::cerr << "[" << job.graph << " " << job.algorithm << " rep " << job.rep + 1 << "] "
                << (res.ok ? "F1 " + std::to_string(res.f1_bma) : "failed: " + res.error) << "\n";
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  const fs::path dir(a.out);
  fs::create_directories(dir);
  json cells = json::array();
  std::ofstream csv(dir / "study.csv");
  csv << "graph,p,n,algorithm,reps_ok,reps_failed,f1_bma_mean,f1_bma_sd,f1_map_mean,f1_map_sd,secs_per_1000_iter,peak_key_bytes\n";
  std::cout << std::left << std::setw(12) << "graph" << std::setw(9) << "algo" << std::setw(16) << "F1 BMA"
            << std::setw(16) << "F1 MAP" << "s/1000 it\n";
  for (const auto& g : graphs)
    for (const auto& alg : algorithms) {
      std::vector<double> bma, map, secs;
      std::size_t peak = 0;
      json failures = json::array();
      for (std::size_t k = 0; k < jobs.size(); ++k) {
        if (jobs[k].graph != g || jobs[k].algorithm != alg) continue;
        if (!results[k].ok) {
          failures.push_back({{"rep", jobs[k].rep + 1}, {"error", results[k].error}});
          continue;
        }
        bma.push_back(results[k].f1_bma);
        map.push_back(results[k].f1_map);
        secs.push_back(results[k].secs_per_1000);
        peak = std::max(peak, results[k].key_bytes);
      }
      const auto mean = [](const std::vector<double>& v) {
        return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      };
      const auto sd = [&](const std::vector<double>& v) -> std::optional<double> {
        if (v.size() < 2) return std::nullopt;
        const double m = mean(v);
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / static_cast<double>(v.size() - 1));
      };
      const auto fmt = [&](const std::vector<double>& v) {
        std::ostringstream o;
        o << std::fixed << std::setprecision(2) << mean(v);
        if (auto s = sd(v)) o << " (" << *s << ")";
        return o.str();
      };
      const auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
      std::cout << std::left << std::setw(12) << g << std::setw(9) << alg << std::setw(16) << fmt(bma) << std::setw(16)
                << fmt(map) << std::fixed << std::setprecision(2) << mean(secs) << "\n";
      csv << g << "," << a.p << "," << a.n << "," << alg << "," << bma.size() << "," << failures.size() << "," << mean(bma)
          << "," << (sd(bma) ? std::to_string(*sd(bma)) : "NA") << "," << mean(map) << ","
          << (sd(map) ? std::to_string(*sd(map)) : "NA") << "," << mean(secs) << "," << peak << "\n";
      cells.push_back({{"graph", g}, {"p", a.p}, {"n", a.n}, {"algorithm", alg}, {"f1_bma_mean", mean(bma)},
                       {"f1_bma_sd", opt(sd(bma))}, {"f1_map_mean", mean(map)}, {"f1_map_sd", opt(sd(map))},
                       {"f1_bma", bma}, {"secs_per_1000_iter", mean(secs)}, {"peak_key_bytes", peak},
                       {"failures", failures}});
    }
  csv.close();
  bdgm::io::write_json(dir / "study.json", cells);
  Manifest m("study", {{"graphs", graphs}, {"p", a.p}, {"n", a.n}, {"reps", a.reps}, {"algorithms", algorithms},
                       {"iter", a.iter}, {"burnin", a.burnin}, {"seed_base", a.seed},
                       {"replication_seed_rule", "seed_base + r for r = 0..reps-1"}, {"threads", workers},
                       {"mc_samples", a.mc_samples}, {"cut", a.cut}});
  m.output(dir / "study.csv");
  m.output(dir / "study.json");
  m.timing("study", seconds_since(t0));
  m.write(dir);
  return 0;
}

int exit_code(bdgm::ErrorKind k) {
  switch (k) {
    case bdgm::ErrorKind::usage: return 1;
    case bdgm::ErrorKind::data: return 2;
    case bdgm::ErrorKind::numerical: return 3;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian structure learning for graphical models"};
  app.set_version_flag("--version", BDGM_VERSION);
  app.require_subcommand(1);

  SimArgs sim;
  auto* c_sim = app.add_subcommand("sim", "simulate a graph, precision matrix and data");
  c_sim->add_option("--p", sim.p, "number of variables")->capture_default_str();
  c_sim->add_option("--n", sim.n, "number of observations")->capture_default_str();
  c_sim->add_option("--graph", sim.graph, "random|cluster|scale-free|hub|AR2|circle")->capture_default_str();
  c_sim->add_option("--type", sim.type, "Gaussian|non-Gaussian|discrete|binary|mixed")->capture_default_str();
  c_sim->add_option("--cut", sim.cut, "categories for discrete data")->capture_default_str();
  c_sim->add_option("--prob", sim.prob, "edge probability for random/cluster graphs")->capture_default_str();
  c_sim->add_option("--missing", sim.missing, "fraction of cells to mark NA")->capture_default_str();
  c_sim->add_option("--seed", sim.seed)->capture_default_str();
  c_sim->add_option("--out", sim.out, "output directory")->required();

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "sample the graph posterior");
  c_run->add_option("--data", run.data, "data CSV with header row")->required();
  c_run->add_option("--kinds", run.kinds, "column kinds sidecar");
  c_run->add_option("--out", run.out, "output directory")->required();
  c_run->add_option("--na-token", run.na)->capture_default_str();
  c_run->add_option("--iter", run.iter)->capture_default_str();
  c_run->add_option("--burnin", run.burnin, "defaults to iter/2");
  c_run->add_option("--algorithm", run.algorithm, "bdmcmc|rjmcmc")->capture_default_str();
  c_run->add_option("--method", run.method, "ggm|gcgm")->capture_default_str();
  c_run->add_option("--g-start", run.g_start, "empty|full|resume:PATH")->capture_default_str();
  c_run->add_option("--prior-df", run.prior_df)->capture_default_str();
  c_run->add_flag("--save-all", run.save_all, "keep every visited graph key");
  c_run->add_option("--seed", run.seed)->capture_default_str();
  c_run->add_option("--mc-samples", run.mc_samples)->capture_default_str();
  c_run->add_option("--cut", run.cut, "BMA cut for the selected graph")->capture_default_str();

  std::string s_run;
  double s_cut = 0.5;
  auto* c_summary = app.add_subcommand("summary", "print selected graph, p_links and K_hat of a run");
  c_summary->add_option("--run", s_run)->required();
  c_summary->add_option("--cut", s_cut)->capture_default_str();

  std::string sel_run, sel_plinks, sel_out;
  double sel_cut = 0.5;
  bool sel_map = false;
  auto* c_select = app.add_subcommand("select", "BMA or MAP graph selection");
  c_select->add_option("--run", sel_run);
  c_select->add_option("--plinks", sel_plinks);
  c_select->add_option("--cut", sel_cut)->capture_default_str();
  c_select->add_flag("--map", sel_map, "highest-weight visited graph");
  c_select->add_option("--out", sel_out, "adjacency CSV to write");

  std::vector<std::string> cmp_files, cmp_names;
  std::string cmp_json;
  auto* c_compare = app.add_subcommand("compare", "confusion metrics of estimates against a true graph");
  c_compare->add_option("files", cmp_files, "truth.csv est1.csv [est2.csv ...]")->required();
  c_compare->add_option("--names", cmp_names)->delimiter(',');
  c_compare->add_option("--json", cmp_json);

  std::string roc_truth, roc_out;
  std::vector<std::string> roc_plinks;
  int roc_cut_num = 20;
  bool roc_svg = false;
  auto* c_roc = app.add_subcommand("roc", "ROC curve and AUC from edge probabilities");
  c_roc->add_option("--truth", roc_truth)->required();
  c_roc->add_option("--plinks", roc_plinks)->required();
  c_roc->add_option("--cut-num", roc_cut_num)->capture_default_str();
  c_roc->add_option("--out", roc_out)->required();
  c_roc->add_flag("--svg", roc_svg);

  std::string d_run, d_out, d_edges;
  std::uint64_t d_seed = 0;
  bool d_svg = false;
  auto* c_diag = app.add_subcommand("diag", "convergence diagnostics of a run");
  c_diag->add_option("--run", d_run)->required();
  c_diag->add_option("--out", d_out)->required();
  c_diag->add_option("--edges", d_edges, "comma list of i-j (1-based)");
  c_diag->add_option("--seed", d_seed, "for the random edge subset above p=15")->capture_default_str();
  c_diag->add_flag("--svg", d_svg);

  StudyArgs st;
  auto* c_study = app.add_subcommand("study", "replicated simulation study");
  c_study->add_option("--graph", st.graphs, "comma list of families")->capture_default_str();
  c_study->add_option("--p", st.p)->capture_default_str();
  c_study->add_option("--n", st.n)->capture_default_str();
  c_study->add_option("--reps", st.reps)->capture_default_str();
  c_study->add_option("--algorithm", st.algorithms, "comma list")->capture_default_str();
  c_study->add_option("--iter", st.iter)->capture_default_str();
  c_study->add_option("--burnin", st.burnin);
  c_study->add_option("--seed", st.seed, "base seed; replication r uses seed + r")->capture_default_str();
  c_study->add_option("--threads", st.threads, "0 = BDGM_THREADS or all cores")->capture_default_str();
  c_study->add_option("--mc-samples", st.mc_samples)->capture_default_str();
  c_study->add_option("--cut", st.cut)->capture_default_str();
  c_study->add_option("--out", st.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*c_sim) return cmd_sim(sim);
    if (*c_run) return cmd_run(run);
    if (*c_summary) return cmd_summary(s_run, s_cut);
    if (*c_select) return cmd_select(sel_run, sel_plinks, sel_cut, sel_map, sel_out);
    if (*c_compare) return cmd_compare(cmp_files, cmp_names, cmp_json);
    if (*c_roc) return cmd_roc(roc_truth, roc_plinks, roc_cut_num, roc_out, roc_svg);
    if (*c_diag) return cmd_diag(d_run, d_out, d_edges, d_seed, d_svg);
    if (*c_study) return cmd_study(st);
  } catch (const bdgm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
