#ifndef ARI_PERSIST_HPP
#define ARI_PERSIST_HPP

// Binary structure file, little-endian, fixed-width:
//
//   "ARIF1"  u32 version
//   f64 alpha   u64 m   u64 h   u64 zeta
//   u32[m] perm (rank -> vertex)   u32[m] parent (0xFFFFFFFF for roots)
//   u32[m] subtree sizes           u8[m] representative flags
//   u32[m - roots] child lists, grouped by parent rank, heavy child first
//   u32[#representatives] d, ascending rank
//   u64 n_admissible   u32[n_admissible] admissible ranks (query order)
//   u8 has_grid  [u64 nx, ny, nz   i32 connectivity   u64[m] voxel index]
//
// q is recomputed as d / size on load, so answers are reproduced exactly.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "ari/error.hpp"
#include "ari/graph.hpp"
#include "ari/index.hpp"

namespace ari {

inline constexpr std::array<char, 5> kStructureMagic{'A', 'R', 'I', 'F', '1'};
inline constexpr std::uint32_t kStructureVersion = 1;

namespace detail {

class BinaryReader {
public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  template <typename T>
  T get() {
    std::array<char, sizeof(T)> buf;
    if (!in_.read(buf.data(), sizeof(T)))
      throw FormatError("structure file is truncated");
    return load_le<T>(buf.data());
  }

  template <typename T>
  std::vector<T> get_vector(std::size_t n) {
    std::vector<char> raw(n * sizeof(T));
    if (n > 0 && !in_.read(raw.data(), static_cast<std::streamsize>(raw.size())))
      throw FormatError("structure file is truncated");
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = load_le<T>(raw.data() + i * sizeof(T));
    return out;
  }

private:
  std::istream& in_;
};

template <typename T, typename Range>
void store_all(std::ostream& out, const Range& values) {
  for (auto v : values)
    store_le<T>(out, static_cast<T>(v));
}

} // namespace detail

inline void save_structure(const AriIndex& x, std::ostream& out) {
  const auto& f = x.forest;
  out.write(kStructureMagic.data(), kStructureMagic.size());
  detail::store_le<std::uint32_t>(out, kStructureVersion);
  detail::store_le<double>(out, x.alpha);
  detail::store_le<std::uint64_t>(out, x.m);
  detail::store_le<std::uint64_t>(out, x.h);
  detail::store_le<std::uint64_t>(out, x.zeta);
  detail::store_all<std::uint32_t>(out, x.perm);
  detail::store_all<std::uint32_t>(out, f.parents());
  for (Rank r = 0; r < x.m; ++r)
    detail::store_le<std::uint32_t>(out, f.size(r));
  detail::store_all<std::uint8_t>(out, f.representative_flags());
  detail::store_all<std::uint32_t>(out, f.child_list());
  for (Rank r = 0; r < x.m; ++r)
    if (f.is_representative(r))
      detail::store_le<std::uint32_t>(out, x.bounds.d[r]);
  detail::store_le<std::uint64_t>(out, x.admissible.order.size());
  detail::store_all<std::uint32_t>(out, x.admissible.order);
  detail::store_le<std::uint8_t>(out, x.grid ? 1 : 0);
  if (x.grid) {
    for (auto n : x.grid->dims)
      detail::store_le<std::uint64_t>(out, n);
    detail::store_le<std::int32_t>(out, x.grid->connectivity);
    detail::store_all<std::uint64_t>(out, x.grid->voxel_of);
  }
  if (!out)
    throw FormatError("failed to write structure");
}

inline AriIndex load_structure(std::istream& in) {
  std::array<char, 5> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kStructureMagic)
    throw FormatError("not an ARIF structure file (bad magic)");
  detail::BinaryReader rd(in);
  const auto version = rd.get<std::uint32_t>();
  if (version != kStructureVersion)
    throw FormatError("unsupported structure version " + std::to_string(version) +
                      " (expected " + std::to_string(kStructureVersion) + ")");

  AriIndex x;
  x.alpha = rd.get<double>();
  x.m = rd.get<std::uint64_t>();
  x.h = rd.get<std::uint64_t>();
  x.zeta = rd.get<std::uint64_t>();
  if (!(x.alpha > 0.0 && x.alpha < 1.0) || x.m == 0 || x.m >= kNoRank || x.h > x.m ||
      x.zeta > x.m)
    throw FormatError("structure header is inconsistent");
  const std::size_t m = x.m;
  x.perm = rd.get_vector<std::uint32_t>(m);
  {
    std::vector<std::uint8_t> seen(m, 0);
    for (auto v : x.perm) {
      if (v >= m || seen[v])
        throw FormatError("stored rank permutation is not a bijection");
      seen[v] = 1;
    }
  }
  auto parent = rd.get_vector<std::uint32_t>(m);
  const auto sizes = rd.get_vector<std::uint32_t>(m);
  auto reps = rd.get_vector<std::uint8_t>(m);
  std::size_t roots = 0;
  for (auto p : parent)
    roots += p == kNoRank ? 1 : 0;
  auto children = rd.get_vector<std::uint32_t>(m - roots);

  try {
    x.forest = ClusterForest::from_parents(std::move(parent), std::move(reps), std::move(children));
  } catch (const InputError& e) {
    throw FormatError(std::string("corrupt forest: ") + e.what());
  }
  for (Rank r = 0; r < m; ++r)
    if (x.forest.size(r) != sizes[r])
      throw FormatError("stored subtree sizes disagree with the forest");

  x.bounds.d.assign(m, 0);
  x.bounds.q.assign(m, 0.0);
  for (Rank r = 0; r < m; ++r)
    if (x.forest.is_representative(r)) {
      x.bounds.d[r] = rd.get<std::uint32_t>();
      if (x.bounds.d[r] > x.forest.size(r))
        throw FormatError("bound exceeds cluster size");
      x.bounds.q[r] = tdp_of(x.bounds.d[r], x.forest.size(r));
    }
  x.bounds.label = heavy_path_ends(x.forest);
  const PathCover cover = heavy_path_cover(x.forest);
  x.bounds.sigma = cover.sigma;

  const auto n_adm = rd.get<std::uint64_t>();
  if (n_adm > m)
    throw FormatError("admissible list longer than the forest");
  const auto stored_order = rd.get_vector<std::uint32_t>(n_adm);
  x.admissible = build_admissible_index(x.forest, x.bounds);
  if (x.admissible.order != stored_order)
    throw FormatError("stored admissible list disagrees with the bounds");

  if (rd.get<std::uint8_t>() != 0) {
    GridMeta g;
    for (auto& n : g.dims)
      n = rd.get<std::uint64_t>();
    g.connectivity = rd.get<std::int32_t>();
    const auto voxels = rd.get_vector<std::uint64_t>(m);
    g.voxel_of.assign(voxels.begin(), voxels.end());
    for (auto i : g.voxel_of)
      if (i >= g.voxel_count())
        throw FormatError("voxel index outside the stored grid");
    x.grid = std::move(g);
  }

  x.stats.representatives = representatives(x.forest).size();
  x.stats.sigma = cover.sigma;
  return x;
}

inline void save_structure(const AriIndex& x, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InputError("cannot write " + path.string());
  save_structure(x, out);
}

inline AriIndex load_structure(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open " + path.string());
  return load_structure(in);
}

} // namespace ari

#endif // ARI_PERSIST_HPP
