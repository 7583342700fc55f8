#ifndef BDGM_IO_HPP
#define BDGM_IO_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "bdgm/error.hpp"
#include "bdgm/gcgm.hpp"
#include "bdgm/graph.hpp"
#include "bdgm/gwishart.hpp"
#include "bdgm/posterior.hpp"
#include "bdgm/trace.hpp"

namespace bdgm::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

struct Table {
  std::vector<std::string> header;
  Matrix values;
  Mask missing;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r\"");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(a, b - a + 1));
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

inline std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Comma-separated table with a header row; cells equal to na are missing.
inline Table read_csv(std::istream& in, const std::string& na = "NA", const std::string& source = "csv") {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw InputError(source + ": empty file");
  t.header = detail::split(line);
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<std::uint8_t>> miss;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line);
    if (cells.size() != t.header.size())
      throw InputError(source + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                       " fields, expected " + std::to_string(t.header.size()));
    std::vector<double> row(cells.size());
    std::vector<std::uint8_t> m(cells.size(), 0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c] == na || cells[c].empty()) {
        m[c] = 1;
        row[c] = 0.0;
        continue;
      }
      std::size_t used = 0;
      try {
        row[c] = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[c].size() || !std::isfinite(row[c]))
        throw InputError(source + ": line " + std::to_string(lineno) + ", column " + std::to_string(c + 1) +
                         ": not a number: '" + cells[c] + "'");
    }
    rows.push_back(std::move(row));
    miss.push_back(std::move(m));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(t.header.size());
  t.values.resize(n, p);
  t.missing.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      t.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      t.missing(i, j) = miss[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  return t;
}

inline Table read_csv(const fs::path& path, const std::string& na = "NA") {
  auto in = detail::open_in(path);
  return read_csv(in, na, path.string());
}

inline Matrix read_matrix_csv(const fs::path& path) {
  Table t = read_csv(path);
  if ((t.missing.array() != 0).any()) throw InputError(path.string() + ": matrix has missing cells");
  return t.values;
}

inline void write_matrix_csv(std::ostream& os, const Matrix& m, std::vector<std::string> header = {}) {
  if (header.empty()) header = default_labels(static_cast<int>(m.cols()));
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << detail::format_number(m(i, j));
    os << '\n';
  }
}

inline void write_matrix_csv(const fs::path& path, const Matrix& m, std::vector<std::string> header = {}) {
  auto out = detail::open_out(path);
  write_matrix_csv(out, m, std::move(header));
}

inline Matrix adjacency(const Graph& g) {
  Matrix a = Matrix::Zero(g.nodes(), g.nodes());
  for (const auto& e : g.edges()) a(e.i, e.j) = a(e.j, e.i) = 1.0;
  return a;
}

/// Symmetric 0/1 adjacency; the diagonal is ignored.
inline Graph graph_from_adjacency(const Matrix& a) {
  if (a.rows() != a.cols()) throw InputError("adjacency matrix must be square");
  if (a != a.transpose()) throw InputError("adjacency matrix must be symmetric");
  Graph g(static_cast<int>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      const double v = a(i, j);
      if (v != 0.0 && v != 1.0) throw InputError("adjacency entries must be 0 or 1");
      if (v == 1.0) g.add_edge(static_cast<int>(i), static_cast<int>(j));
    }
  return g;
}

inline void write_graph_csv(const fs::path& path, const Graph& g) { write_matrix_csv(path, adjacency(g)); }
inline Graph read_graph_csv(const fs::path& path) { return graph_from_adjacency(read_matrix_csv(path)); }

/// Kind names separated by commas or whitespace, one per column.
inline std::vector<VarKind> read_kinds(const fs::path& path) {
  auto in = detail::open_in(path);
  std::vector<VarKind> kinds;
  std::string tok;
  std::stringstream all;
  all << in.rdbuf();
  std::string text = all.str();
  for (char& c : text)
    if (c == ',') c = ' ';
  std::istringstream ss(text);
  while (ss >> tok) kinds.push_back(parse_kind(tok));
  return kinds;
}

inline void write_kinds(const fs::path& path, const std::vector<VarKind>& kinds) {
  auto out = detail::open_out(path);
  for (auto k : kinds) out << to_string(k) << '\n';
}

inline MixedData read_mixed_data(const fs::path& data, const std::vector<VarKind>& kinds, const std::string& na = "NA") {
  Table t = read_csv(data, na);
  MixedData d{std::move(t.values), kinds, std::move(t.missing)};
  if (d.kinds.empty()) d.kinds.assign(static_cast<std::size_t>(d.y.cols()), VarKind::continuous);
  if (d.kinds.size() != static_cast<std::size_t>(d.y.cols()))
    throw InputError("kinds list has " + std::to_string(d.kinds.size()) + " entries for " +
                     std::to_string(d.y.cols()) + " columns");
  d.validate();
  return d;
}

inline void write_mixed_data(const fs::path& path, const MixedData& d, const std::string& na = "NA") {
  auto out = detail::open_out(path);
  const auto header = default_labels(d.dim());
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (long i = 0; i < d.rows(); ++i) {
    for (int j = 0; j < d.dim(); ++j) out << (j ? "," : "") << (d.observed(i, j) ? detail::format_number(d.y(i, j)) : na);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Trace file: little-endian header, then one record per kept iteration
// (key bytes when present, f64 weight, i32 graph size).
// ---------------------------------------------------------------------------

inline constexpr char kTraceMagic[8] = {'B', 'D', 'G', 'M', 'T', 'R', 'C', '1'};

namespace detail {

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& what) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw InputError("trace file truncated reading " + what);
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace detail

inline void write_trace_binary(std::ostream& os, const ChainTrace& t) {
  os.write(kTraceMagic, sizeof kTraceMagic);
  detail::put<std::int32_t>(os, t.p);
  detail::put<std::int64_t>(os, t.iter);
  detail::put<std::int64_t>(os, t.burnin);
  detail::put<std::uint8_t>(os, static_cast<std::uint8_t>(t.algorithm));
  detail::put<std::uint8_t>(os, static_cast<std::uint8_t>(t.method));
  detail::put<std::uint8_t>(os, t.keys ? 1 : 0);
  detail::put<std::uint8_t>(os, t.has_k ? 1 : 0);
  detail::put<double>(os, t.total_weight);
  detail::put<std::int64_t>(os, t.clamped_rates);
  detail::put<std::int64_t>(os, static_cast<std::int64_t>(t.records()));
  for (std::size_t r = 0; r < t.records(); ++r) {
    if (t.keys) {
      const auto k = t.keys->key(r);
      os.write(reinterpret_cast<const char*>(k.data()), static_cast<std::streamsize>(k.size()));
    }
    detail::put<double>(os, t.weights[r]);
    detail::put<std::int32_t>(os, t.sizes[r]);
  }
  if (!os) throw UsageError("failed writing trace");
}

/// Reads the records; the matrix accumulators are left zero.
inline ChainTrace read_trace_binary(std::istream& is) {
  char magic[sizeof kTraceMagic];
  if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kTraceMagic))
    throw InputError("not a trace file (bad magic)");
  const auto p = detail::get<std::int32_t>(is, "p");
  if (p < 2) throw InputError("trace file has invalid p");
  const auto iter = detail::get<std::int64_t>(is, "iter");
  const auto burnin = detail::get<std::int64_t>(is, "burnin");
  const auto alg = detail::get<std::uint8_t>(is, "algorithm");
  const auto method = detail::get<std::uint8_t>(is, "method");
  const auto has_keys = detail::get<std::uint8_t>(is, "key flag");
  const auto has_k = detail::get<std::uint8_t>(is, "K flag");
  if (alg > 1 || method > 1 || has_keys > 1 || has_k > 1) throw InputError("trace header has invalid flags");
  ChainTrace t(p, static_cast<Algorithm>(alg), static_cast<Method>(method), iter, burnin, has_keys != 0);
  t.has_k = has_k != 0;
  t.total_weight = detail::get<double>(is, "total weight");
  t.clamped_rates = detail::get<std::int64_t>(is, "clamp count");
  const auto count = detail::get<std::int64_t>(is, "record count");
  if (count < 0) throw InputError("trace header has a negative record count");
  std::vector<std::uint8_t> key(GraphKey::byte_length(p));
  for (std::int64_t r = 0; r < count; ++r) {
    if (has_keys) {
      if (!is.read(reinterpret_cast<char*>(key.data()), static_cast<std::streamsize>(key.size())))
        throw InputError("trace file truncated reading a key");
      decode_key(p, key);
      t.keys->push(key);
    }
    t.weights.push_back(detail::get<double>(is, "weight"));
    t.sizes.push_back(detail::get<std::int32_t>(is, "size"));
  }
  return t;
}

inline constexpr const char* kTraceFile = "trace.bin";
inline constexpr const char* kEdgeAccFile = "acc_edges.csv";
inline constexpr const char* kKAccFile = "acc_k.csv";

/// Trace plus its accumulators as CSV matrices in one directory.
inline void save_trace(const fs::path& dir, const ChainTrace& t) {
  fs::create_directories(dir);
  auto out = detail::open_out(dir / kTraceFile, std::ios::binary);
  write_trace_binary(out, t);
  write_matrix_csv(dir / kEdgeAccFile, t.edge_weight);
  if (t.has_k) write_matrix_csv(dir / kKAccFile, t.k_weight);
}

inline ChainTrace load_trace(const fs::path& dir) {
  auto in = detail::open_in(dir / kTraceFile, std::ios::binary);
  ChainTrace t = read_trace_binary(in);
  t.edge_weight = read_matrix_csv(dir / kEdgeAccFile);
  if (t.edge_weight.rows() != t.p) throw InputError("edge accumulator has the wrong dimension");
  if (t.has_k && fs::exists(dir / kKAccFile)) {
    t.k_weight = read_matrix_csv(dir / kKAccFile);
    if (t.k_weight.rows() != t.p) throw InputError("K accumulator has the wrong dimension");
  } else {
    t.has_k = false;
  }
  return t;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("expected a non-empty matrix");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != static_cast<std::size_t>(m.cols())) throw InputError("ragged matrix");
    for (std::size_t c = 0; c < j[i].size(); ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
  }
  return m;
}

inline json edges_json(const Graph& g, const std::vector<std::string>& labels) {
  json out = json::array();
  for (const auto& e : g.edges()) out.push_back({labels[static_cast<std::size_t>(e.i)], labels[static_cast<std::size_t>(e.j)]});
  return out;
}

inline json state_json(const ChainState& s) {
  return {{"p", s.g.nodes()}, {"key", encode_key(s.g).hex()}, {"iteration", s.iteration}, {"K", matrix_json(s.K)}};
}

inline ChainState state_from_json(const json& j) {
  try {
    ChainState s;
    const int p = j.at("p").get<int>();
    const auto hex = j.at("key").get<std::string>();
    if (hex.size() != 2 * GraphKey::byte_length(p)) throw InputError("saved state key has the wrong length");
    std::vector<std::uint8_t> bytes(hex.size() / 2);
    for (std::size_t b = 0; b < bytes.size(); ++b) bytes[b] = static_cast<std::uint8_t>(std::stoi(hex.substr(2 * b, 2), nullptr, 16));
    s.g = decode_key(p, bytes);
    s.iteration = j.at("iteration").get<long>();
    s.K = matrix_from_json(j.at("K"));
    if (s.K.rows() != p || s.K.cols() != p) throw InputError("saved K has the wrong dimension");
    if (!is_positive_definite(s.K) || !respects_graph(s.K, s.g)) throw InputError("saved K is not a valid precision matrix for its graph");
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed state file: ") + e.what());
  }
}

inline void write_json(const fs::path& path, const json& j) {
  auto out = detail::open_out(path);
  out << j.dump(2) << '\n';
}

inline json read_json(const fs::path& path) {
  auto in = detail::open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

inline constexpr std::size_t kTopGraphs = 20;

inline json summary_json(const PosteriorSummary& s, double cut, const std::vector<std::string>& labels) {
  json j;
  j["cut"] = cut;
  j["selected_edges"] = edges_json(s.selected, labels);
  j["selected_size"] = s.selected.edge_count();
  json table = json::array();
  for (std::size_t r = 0; r < std::min(kTopGraphs, s.graph_table.size()); ++r) {
    const auto& row = s.graph_table[r];
    const Graph g = decode_key(row.key);
    table.push_back({{"key", row.key.hex()}, {"weight", row.weight}, {"size", g.edge_count()}, {"edges", edges_json(g, labels)}});
  }
  j["graph_table"] = std::move(table);
  return j;
}

}  // namespace bdgm::io

#endif  // BDGM_IO_HPP
