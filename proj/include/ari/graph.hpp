#ifndef ARI_GRAPH_HPP
#define ARI_GRAPH_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ari/error.hpp"
#include "ari/stats.hpp"

namespace ari {

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

/// Undirected simple graph in compressed adjacency form. Neighbour lists are
/// sorted ascending.
class Graph {
public:
  Graph() = default;

  Graph(std::size_t m, std::vector<std::size_t> offsets, std::vector<VertexId> adjacency)
      : m_(m), offsets_(std::move(offsets)), adjacency_(std::move(adjacency)) {}

  /// Symmetrises and deduplicates; rejects self-loops and out-of-range ids.
  static Graph from_edges(std::size_t m, std::vector<std::pair<VertexId, VertexId>> edges) {
    for (auto& [u, v] : edges) {
      if (u >= m || v >= m)
        throw InputError("edge {" + std::to_string(u) + "," + std::to_string(v) +
                         "} references a vertex outside [0," + std::to_string(m) + ")");
      if (u == v)
        throw InputError("self-loop at vertex " + std::to_string(u));
      if (u > v)
        std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<std::size_t> offsets(m + 1, 0);
    for (auto [u, v] : edges) {
      ++offsets[u + 1];
      ++offsets[v + 1];
    }
    for (std::size_t i = 0; i < m; ++i)
      offsets[i + 1] += offsets[i];
    std::vector<VertexId> adjacency(offsets[m]);
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    // Sorted (u,v) order puts every list in ascending order.
    for (auto [u, v] : edges) {
      adjacency[fill[u]++] = v;
      adjacency[fill[v]++] = u;
    }
    return Graph(m, std::move(offsets), std::move(adjacency));
  }

  std::size_t vertex_count() const noexcept { return m_; }
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  bool operator==(const Graph&) const = default;

private:
  std::size_t m_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<VertexId> adjacency_;
};

// ---------------------------------------------------------------------------
// Voxel grids

struct GridSpec {
  std::array<std::size_t, 3> dims{1, 1, 1};
  int connectivity = 18;
  std::vector<std::uint8_t> mask;  // x-fastest; nonzero = analysed

  std::size_t voxel_count() const { return dims[0] * dims[1] * dims[2]; }

  std::size_t linear_index(std::size_t x, std::size_t y, std::size_t z) const {
    return x + dims[0] * (y + dims[1] * z);
  }

  std::array<std::size_t, 3> coordinates(std::size_t index) const {
    return {index % dims[0], (index / dims[0]) % dims[1], index / (dims[0] * dims[1])};
  }

  static GridSpec full(std::array<std::size_t, 3> dims, int connectivity) {
    GridSpec g;
    g.dims = dims;
    g.connectivity = connectivity;
    g.mask.assign(g.voxel_count(), 1);
    return g;
  }
};

inline void check_connectivity(int connectivity) {
  if (connectivity != 6 && connectivity != 18 && connectivity != 26)
    throw InputError("connectivity must be 6, 18 or 26, got " + std::to_string(connectivity));
}

/// Neighbour offsets for a connectivity class: Chebyshev distance 1 and
/// Manhattan distance at most 1, 2 or 3.
inline std::vector<std::array<int, 3>> neighbor_offsets(int connectivity) {
  check_connectivity(connectivity);
  const int max_l1 = connectivity == 6 ? 1 : connectivity == 18 ? 2 : 3;
  std::vector<std::array<int, 3>> out;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int l1 = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (l1 > 0 && l1 <= max_l1)
          out.push_back({dx, dy, dz});
      }
  return out;  // ascending linear-index delta
}

struct GridGraph {
  Graph graph;
  std::vector<std::size_t> voxel_of;  // vertex -> linear voxel index
  std::vector<VertexId> vertex_of;    // voxel -> vertex, kNoVertex outside mask
};

/// In-mask voxels become vertices in x-fastest order.
inline GridGraph grid_to_graph(const GridSpec& spec) {
  check_connectivity(spec.connectivity);
  const auto [nx, ny, nz] = spec.dims;
  if (nx == 0 || ny == 0 || nz == 0)
    throw InputError("grid dimensions must be positive");
  const std::size_t voxels = spec.voxel_count();
  if (spec.mask.size() != voxels)
    throw InputError("mask has " + std::to_string(spec.mask.size()) + " entries, grid has " +
                     std::to_string(voxels));

  GridGraph out;
  out.vertex_of.assign(voxels, kNoVertex);
  for (std::size_t i = 0; i < voxels; ++i)
    if (spec.mask[i]) {
      out.vertex_of[i] = static_cast<VertexId>(out.voxel_of.size());
      out.voxel_of.push_back(i);
    }
  const std::size_t m = out.voxel_of.size();
  if (m == 0)
    throw InputError("mask selects no voxels");

  const auto offsets = neighbor_offsets(spec.connectivity);
  std::vector<std::size_t> row(m + 1, 0);
  std::vector<VertexId> adjacency;
  adjacency.reserve(m * offsets.size());
  for (std::size_t v = 0; v < m; ++v) {
    const auto [x, y, z] = spec.coordinates(out.voxel_of[v]);
    for (const auto& [dx, dy, dz] : offsets) {
      const auto xx = static_cast<std::ptrdiff_t>(x) + dx;
      const auto yy = static_cast<std::ptrdiff_t>(y) + dy;
      const auto zz = static_cast<std::ptrdiff_t>(z) + dz;
      if (xx < 0 || yy < 0 || zz < 0 || xx >= static_cast<std::ptrdiff_t>(nx) ||
          yy >= static_cast<std::ptrdiff_t>(ny) || zz >= static_cast<std::ptrdiff_t>(nz))
        continue;
      const VertexId w = out.vertex_of[spec.linear_index(xx, yy, zz)];
      if (w != kNoVertex)
        adjacency.push_back(w);
    }
    row[v + 1] = adjacency.size();
  }
  out.graph = Graph(m, std::move(row), std::move(adjacency));
  return out;
}

// ---------------------------------------------------------------------------
// Text formats

namespace detail {

inline std::string_view strip_comment(std::string_view line) {
  if (auto pos = line.find('#'); pos != std::string_view::npos)
    line = line.substr(0, pos);
  return line;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i)
      out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

inline std::ifstream open_input(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in)
    throw InputError("cannot open " + path.string());
  return in;
}

} // namespace detail

/// Parses "u v" pairs (0-based, '#' comments); ids must be below
/// vertex_count.
inline std::vector<std::pair<VertexId, VertexId>> parse_edge_list(std::istream& in,
                                                                 const std::string& source,
                                                                 std::size_t vertex_count) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = detail::split_ws(detail::strip_comment(line));
    if (tokens.empty())
      continue;
    VertexId u = 0, v = 0;
    if (tokens.size() != 2 || !detail::parse_number(tokens[0], u) ||
        !detail::parse_number(tokens[1], v))
      throw ParseError(source, lineno, "expected two non-negative vertex ids");
    if (u == v)
      throw ParseError(source, lineno, "self-loop at vertex " + std::to_string(u));
    if (u >= vertex_count || v >= vertex_count)
      throw ParseError(source, lineno,
                       "vertex id out of range (have " + std::to_string(vertex_count) +
                           " p-values)");
    edges.emplace_back(u, v);
  }
  return edges;
}

/// One decimal per line; line i holds vertex i.
inline std::vector<double> parse_pvalues(std::istream& in, const std::string& source) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = detail::split_ws(detail::strip_comment(line));
    if (tokens.empty())
      continue;
    double p = 0;
    if (tokens.size() != 1 || !detail::parse_number(tokens[0], p))
      throw ParseError(source, lineno, "expected a single decimal p-value");
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
      throw ParseError(source, lineno, "p-value outside [0,1]");
    out.push_back(p);
  }
  if (out.empty())
    throw ParseError(source, lineno, "no p-values");
  return out;
}

struct EdgeListInput {
  Graph graph;
  std::vector<double> pvalues;
};

/// The vertex count is the number of p-values; isolated vertices are allowed.
inline EdgeListInput load_edge_list(const std::filesystem::path& edges_path,
                                    const std::filesystem::path& pvalues_path) {
  EdgeListInput out;
  {
    auto in = detail::open_input(pvalues_path);
    out.pvalues = parse_pvalues(in, pvalues_path.string());
  }
  auto in = detail::open_input(edges_path);
  auto edges = parse_edge_list(in, edges_path.string(), out.pvalues.size());
  out.graph = Graph::from_edges(out.pvalues.size(), std::move(edges));
  return out;
}

inline void write_edge_list(const Graph& g, std::ostream& out) {
  for (VertexId u = 0; u < g.vertex_count(); ++u)
    for (VertexId v : g.neighbors(u))
      if (u < v)
        out << u << ' ' << v << '\n';
}

// ---------------------------------------------------------------------------
// Raw volumes

enum class Statistic { p, z };

struct Volume {
  GridSpec grid;
  Statistic statistic = Statistic::p;
  std::vector<double> values;  // in-mask voxels, x-fastest

  /// Values as p-values; z statistics go through z_to_p.
  std::vector<double> pvalues() const {
    if (statistic == Statistic::p)
      return values;
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), z_to_p);
    return out;
  }
};

namespace detail {

inline std::vector<char> read_file_bytes(const std::filesystem::path& path) {
  auto in = open_input(path, true);
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

template <typename T>
T load_le(const char* bytes) {
  std::array<char, sizeof(T)> buf;
  std::memcpy(buf.data(), bytes, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(buf.begin(), buf.end());
  return std::bit_cast<T>(buf);
}

template <typename T>
void store_le(std::ostream& out, T value) {
  auto buf = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(buf.begin(), buf.end());
  out.write(buf.data(), sizeof(T));
}

} // namespace detail

/// Reads a JSON header:
///   {"dims":[nx,ny,nz], "connectivity":18, "dtype":"f32"|"f64",
///    "statistic":"p"|"z", "data":"file.raw", "mask":"mask.raw"}
/// Relative paths resolve against the header's directory. The mask is one
/// byte per voxel (nonzero = analysed); without it every voxel is analysed.
inline Volume load_volume(const std::filesystem::path& header_path) {
  nlohmann::json header;
  {
    auto in = detail::open_input(header_path);
    try {
      header = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(header_path.string() + ": invalid header: " + e.what());
    }
  }
  const auto base = header_path.parent_path();
  auto field = [&](const char* key) -> const nlohmann::json& {
    if (!header.contains(key))
      throw InputError(header_path.string() + ": header lacks \"" + key + "\"");
    return header.at(key);
  };

  Volume vol;
  std::size_t elem = 0;
  try {
    const auto& dims = field("dims");
    if (!dims.is_array() || dims.size() != 3)
      throw InputError(header_path.string() + ": dims must be [nx, ny, nz]");
    for (int a = 0; a < 3; ++a) {
      const auto n = dims[a].get<std::int64_t>();
      if (n <= 0)
        throw InputError(header_path.string() + ": dims must be positive");
      vol.grid.dims[a] = static_cast<std::size_t>(n);
    }
    vol.grid.connectivity = field("connectivity").get<int>();
    check_connectivity(vol.grid.connectivity);
    const auto dtype = field("dtype").get<std::string>();
    if (dtype == "f32")
      elem = 4;
    else if (dtype == "f64")
      elem = 8;
    else
      throw InputError(header_path.string() + ": dtype must be f32 or f64");
    const auto stat = field("statistic").get<std::string>();
    if (stat == "p")
      vol.statistic = Statistic::p;
    else if (stat == "z")
      vol.statistic = Statistic::z;
    else
      throw InputError(header_path.string() + ": statistic must be p or z");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(header_path.string() + ": " + e.what());
  }

  const std::size_t voxels = vol.grid.voxel_count();
  const auto data_path = base / field("data").get<std::string>();
  const auto data = detail::read_file_bytes(data_path);
  if (data.size() != voxels * elem)
    throw InputError(data_path.string() + ": expected " + std::to_string(voxels * elem) +
                     " bytes, found " + std::to_string(data.size()));

  if (header.contains("mask") && !header["mask"].is_null()) {
    const auto mask_path = base / header["mask"].get<std::string>();
    const auto mask = detail::read_file_bytes(mask_path);
    if (mask.size() != voxels)
      throw InputError(mask_path.string() + ": expected " + std::to_string(voxels) +
                       " bytes, found " + std::to_string(mask.size()));
    vol.grid.mask.resize(voxels);
    for (std::size_t i = 0; i < voxels; ++i)
      vol.grid.mask[i] = mask[i] != 0 ? 1 : 0;
  } else {
    vol.grid.mask.assign(voxels, 1);
  }

  for (std::size_t i = 0; i < voxels; ++i) {
    if (!vol.grid.mask[i])
      continue;
    const double x = elem == 4 ? static_cast<double>(detail::load_le<float>(&data[i * 4]))
                               : detail::load_le<double>(&data[i * 8]);
    const bool bad = vol.statistic == Statistic::p ? !(x >= 0.0 && x <= 1.0) : !std::isfinite(x);
    if (bad) {
      const auto [cx, cy, cz] = vol.grid.coordinates(i);
      throw InputError(data_path.string() + ": invalid value at voxel (" + std::to_string(cx) +
                       "," + std::to_string(cy) + "," + std::to_string(cz) + ")");
    }
    vol.values.push_back(x);
  }
  if (vol.values.empty())
    throw InputError(header_path.string() + ": mask selects no voxels");
  return vol;
}

} // namespace ari

#endif // ARI_GRAPH_HPP
