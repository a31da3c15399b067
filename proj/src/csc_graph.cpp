/*
 * Copyright (c) 2026, The dualcache Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dualcache/csc_graph.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include "dualcache/rng.hpp"

namespace dualcache {

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'C', 'I', 'G'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8 + 4 + 4;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint64_t bits = 0;
  if constexpr (std::is_floating_point_v<T>) {
    static_assert(sizeof(T) == 8);
    std::memcpy(&bits, &value, 8);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    if (bytes_.size() - pos_ < sizeof(T)) {
      throw FormatError("binary_csc: truncated at offset " + std::to_string(pos_) + " reading " + what);
    }
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    if constexpr (std::is_floating_point_v<T>) {
      double d;
      std::memcpy(&d, &bits, 8);
      return d;
    } else {
      return static_cast<T>(bits);
    }
  }

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void validate(const CscGraph& g) {
  if (g.col_ptr.size() != g.num_nodes + 1) {
    throw ValidationError("len(col_ptr) == num_nodes + 1 violated: len(col_ptr)=" +
                          std::to_string(g.col_ptr.size()) + ", num_nodes=" + std::to_string(g.num_nodes));
  }
  if (g.col_ptr.front() != 0) throw ValidationError("col_ptr[0] == 0 violated");
  for (std::uint64_t i = 0; i < g.num_nodes; ++i) {
    if (g.col_ptr[i + 1] < g.col_ptr[i]) {
      throw ValidationError("col_ptr monotone non-decreasing violated at index " + std::to_string(i + 1));
    }
  }
  if (g.row_index.size() != g.col_ptr.back()) {
    throw ValidationError("len(row_index) == col_ptr[num_nodes] violated");
  }
  if (g.values.size() != g.row_index.size()) {
    throw ValidationError("len(values) == len(row_index) violated");
  }
  for (std::size_t e = 0; e < g.row_index.size(); ++e) {
    if (g.row_index[e] >= g.num_nodes) {
      throw ValidationError("row_index entries in [0, num_nodes) violated at element " + std::to_string(e));
    }
  }
}

std::vector<std::uint8_t> encode_binary(const CscGraph& g) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 8 * (g.col_ptr.size() + 2 * g.row_index.size()));
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint64_t>(out, g.num_nodes);
  put_le<std::uint64_t>(out, g.num_edges());
  put_le<std::uint32_t>(out, g.feat_dim);
  put_le<std::uint32_t>(out, g.feat_bytes_per_scalar);
  for (auto p : g.col_ptr) put_le<std::uint64_t>(out, p);
  for (auto r : g.row_index) put_le<std::uint64_t>(out, r);
  for (auto v : g.values) put_le<double>(out, v);
  return out;
}

CscGraph decode_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("binary_csc: bad magic at offset 0 (expected \"DCIG\")");
  }
  Reader in(bytes.subspan(4));
  const auto version = in.get<std::uint32_t>("version");
  if (version != kFormatVersion) {
    throw FormatError("binary_csc: unsupported version " + std::to_string(version) + " at offset 4");
  }
  CscGraph g;
  g.num_nodes = in.get<std::uint64_t>("num_nodes");
  const auto num_edges = in.get<std::uint64_t>("num_edges");
  g.feat_dim = in.get<std::uint32_t>("feat_dim");
  g.feat_bytes_per_scalar = in.get<std::uint32_t>("feat_bytes_per_scalar");

  // Guard allocations against corrupt counts before reserving.
  const std::uint64_t body = in.remaining();
  if (g.num_nodes >= body / 8 + 1 || num_edges > body / 16 || (g.num_nodes + 1) * 8 + num_edges * 16 != body) {
    throw FormatError("binary_csc: payload size mismatch at offset " + std::to_string(kHeaderBytes) +
                      " (header declares " + std::to_string(g.num_nodes) + " nodes, " +
                      std::to_string(num_edges) + " edges)");
  }
  g.col_ptr.resize(g.num_nodes + 1);
  g.row_index.resize(num_edges);
  g.values.resize(num_edges);
  for (auto& p : g.col_ptr) p = in.get<std::uint64_t>("col_ptr");
  for (auto& r : g.row_index) r = in.get<std::uint64_t>("row_index");
  for (auto& v : g.values) v = in.get<double>("values");
  validate(g);
  return g;
}

void save_graph(const CscGraph& graph, const std::filesystem::path& path) {
  const auto bytes = encode_binary(graph);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CscGraph from_edges(std::uint64_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges) {
  CscGraph g;
  g.num_nodes = num_nodes;
  g.col_ptr.assign(num_nodes + 1, 0);
  for (const auto& [src, dst] : edges) {
    if (src >= num_nodes || dst >= num_nodes) {
      throw std::invalid_argument("edge (" + std::to_string(src) + ", " + std::to_string(dst) +
                                  ") out of range for " + std::to_string(num_nodes) + " nodes");
    }
    ++g.col_ptr[dst + 1];
  }
  std::partial_sum(g.col_ptr.begin(), g.col_ptr.end(), g.col_ptr.begin());
  g.row_index.resize(edges.size());
  g.values.assign(edges.size(), kPlaceholderValue);
  std::vector<EdgeOffset> cursor(g.col_ptr.begin(), g.col_ptr.end() - 1);
  for (const auto& [src, dst] : edges) g.row_index[cursor[dst]++] = src;
  return g;
}

CscGraph parse_edge_list(const std::string& text, const LoadOptions& options) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::uint64_t max_id_plus_one = 0;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    NodeId ids[2];
    const char* p = line.data() + first;
    const char* end = line.data() + line.size();
    for (int k = 0; k < 2; ++k) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      auto [next, ec] = std::from_chars(p, end, ids[k]);
      if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t')) {
        throw FormatError("edge_list_text: line " + std::to_string(line_no) + ": expected \"src dst\", got \"" +
                          line + "\"");
      }
      p = next;
    }
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p != end) {
      throw FormatError("edge_list_text: line " + std::to_string(line_no) + ": trailing text after \"src dst\"");
    }
    edges.emplace_back(ids[0], ids[1]);
    max_id_plus_one = std::max({max_id_plus_one, ids[0] + 1, ids[1] + 1});
  }
  const std::uint64_t n = options.num_nodes.value_or(max_id_plus_one);
  if (n < max_id_plus_one) {
    throw ValidationError("row_index entries in [0, num_nodes) violated: edge list references node " +
                          std::to_string(max_id_plus_one - 1) + " but num_nodes=" + std::to_string(n));
  }
  CscGraph g = from_edges(n, edges);
  g.feat_dim = options.feat_dim;
  g.feat_bytes_per_scalar = options.feat_bytes_per_scalar;
  validate(g);
  return g;
}

CscGraph load_graph(const std::filesystem::path& path, GraphFormat format, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (format == GraphFormat::kEdgeListText) return parse_edge_list(content, options);
  return decode_binary({reinterpret_cast<const std::uint8_t*>(content.data()), content.size()});
}

CscGraph generate_power_law(std::uint64_t num_nodes, double avg_degree, double exponent, std::uint64_t seed) {
  if (num_nodes < 1) throw std::invalid_argument("generate_power_law: num_nodes must be >= 1");
  if (!(avg_degree > 0) || !std::isfinite(avg_degree)) {
    throw std::invalid_argument("generate_power_law: avg_degree must be > 0");
  }
  if (!(exponent > 1) || !std::isfinite(exponent)) {
    throw std::invalid_argument("generate_power_law: exponent must be > 1");
  }

  Engine rng = substream(seed, StreamDomain::kGenerator, 0);
  const auto num_edges = static_cast<std::uint64_t>(std::llround(static_cast<double>(num_nodes) * avg_degree));

  // Continuous Pareto weights with tail index (exponent - 1), x_min = 1.
  std::vector<double> weight(num_nodes);
  for (auto& w : weight) w = std::pow(1.0 - uniform_unit(rng), -1.0 / (exponent - 1.0));
  const double weight_sum = std::accumulate(weight.begin(), weight.end(), 0.0);

  // Largest-remainder rounding so in-degrees sum to num_edges exactly.
  std::vector<std::uint64_t> in_degree(num_nodes);
  std::vector<std::pair<double, NodeId>> remainder(num_nodes);
  std::uint64_t assigned = 0;
  for (NodeId v = 0; v < num_nodes; ++v) {
    const double share = static_cast<double>(num_edges) * weight[v] / weight_sum;
    in_degree[v] = static_cast<std::uint64_t>(std::floor(share));
    assigned += in_degree[v];
    remainder[v] = {share - std::floor(share), v};
  }
  std::sort(remainder.begin(), remainder.end(),
            [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  for (std::uint64_t i = 0; assigned < num_edges; ++i, ++assigned) ++in_degree[remainder[i % num_nodes].second];

  // Each node owns as many out-stubs as in-stubs; shuffled (Fisher-Yates).
  std::vector<NodeId> out_stub;
  out_stub.reserve(num_edges);
  for (NodeId v = 0; v < num_nodes; ++v) out_stub.insert(out_stub.end(), in_degree[v], v);
  for (std::uint64_t i = num_edges; i > 1; --i) std::swap(out_stub[i - 1], out_stub[uniform_below(rng, i)]);

  CscGraph g;
  g.num_nodes = num_nodes;
  g.col_ptr.assign(num_nodes + 1, 0);
  for (NodeId v = 0; v < num_nodes; ++v) g.col_ptr[v + 1] = g.col_ptr[v] + in_degree[v];
  g.row_index = std::move(out_stub);
  g.values.assign(num_edges, kPlaceholderValue);
  return g;
}

Bytes csc_byte_volume(const CscGraph& graph, Bytes index_bytes, Bytes value_bytes) {
  return (graph.num_nodes + 1) * index_bytes + graph.num_edges() * (index_bytes + value_bytes);
}

Bytes total_data_bytes(const CscGraph& graph, Bytes index_bytes, Bytes value_bytes) {
  return csc_byte_volume(graph, index_bytes, value_bytes) + graph.num_nodes * graph.feature_row_bytes();
}

}  // namespace dualcache
