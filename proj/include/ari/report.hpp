#ifndef ARI_REPORT_HPP
#define ARI_REPORT_HPP

// Presentation of query results, gamma maps and size curves. The CLI and
// the HTTP layer both go through these functions, so identical thresholds
// give identical payloads on either surface.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ari/graph.hpp"
#include "ari/index.hpp"

namespace ari {

struct ClusterRow {
  VertexId representative = 0;
  VertexId label = 0;
  Rank label_rank = 0;
  std::uint32_t size = 0;
  std::uint32_t d = 0;
  double q = 0.0;
  std::optional<std::array<std::size_t, 3>> coordinates;  // of the label voxel
  std::vector<VertexId> members;                          // filled on request
};

/// Query result rows sorted by size (descending), then representative rank.
inline std::vector<ClusterRow> cluster_rows(const AriIndex& x, QuerySession& session, double gamma,
                                            bool with_members) {
  auto clusters = session.query(gamma);
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return a.size > b.size || (a.size == b.size && a.representative < b.representative);
  });
  std::vector<ClusterRow> rows;
  rows.reserve(clusters.size());
  for (const auto& c : clusters) {
    ClusterRow row;
    row.representative = x.vertex(c.representative);
    row.label = x.vertex(c.label);
    row.label_rank = c.label;
    row.size = c.size;
    row.d = c.d;
    row.q = c.q;
    if (x.grid)
      row.coordinates = x.grid->coordinates(row.label);
    if (with_members) {
      row.members.reserve(c.members.size());
      for (Rank r : c.members)
        row.members.push_back(x.vertex(r));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json clusters_json(double gamma, const std::vector<ClusterRow>& rows) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"representative", r.representative},
                     {"label", r.label},
                     {"label_rank", r.label_rank},
                     {"size", r.size},
                     {"d", r.d},
                     {"q", r.q}};
    if (r.coordinates)
      j["coordinates"] = *r.coordinates;
    if (!r.members.empty())
      j["members"] = r.members;
    list.push_back(std::move(j));
  }
  return {{"gamma", gamma}, {"clusters", std::move(list)}};
}

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline void write_cluster_table(std::ostream& out, double gamma, const std::vector<ClusterRow>& rows) {
  const bool grid = !rows.empty() && rows.front().coordinates.has_value();
  out << "gamma = " << format_fixed(gamma, 3) << ": " << rows.size()
      << (rows.size() == 1 ? " cluster\n" : " clusters\n");
  if (rows.empty())
    return;
  char line[256];
  std::snprintf(line, sizeof line, "%10s %10s %8s %12s %12s", "|S|", "d(S)", "q(S)", "rep", "label");
  out << line << (grid ? "      x     y     z\n" : "\n");
  std::uint64_t total = 0, total_d = 0;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%10u %10u %8.3f %12u %12u", r.size, r.d, r.q,
                  r.representative, r.label);
    out << line;
    if (r.coordinates) {
      std::snprintf(line, sizeof line, " %6zu%6zu%6zu", (*r.coordinates)[0], (*r.coordinates)[1],
                    (*r.coordinates)[2]);
      out << line;
    }
    out << '\n';
    total += r.size;
    total_d += r.d;
  }
  std::snprintf(line, sizeof line, "%10llu %10llu %8.3f  total", static_cast<unsigned long long>(total),
                static_cast<unsigned long long>(total_d),
                static_cast<double>(total_d) / static_cast<double>(total));
  out << line << '\n';
}

inline void write_cluster_csv_header(std::ostream& out) {
  out << "gamma,size,d,q,representative,label,x,y,z\n";
}

inline void write_cluster_csv(std::ostream& out, double gamma, const std::vector<ClusterRow>& rows) {
  for (const auto& r : rows) {
    out << gamma << ',' << r.size << ',' << r.d << ',' << format_fixed(r.q, 6) << ','
        << r.representative << ',' << r.label;
    if (r.coordinates)
      out << ',' << (*r.coordinates)[0] << ',' << (*r.coordinates)[1] << ',' << (*r.coordinates)[2];
    else
      out << ",,,";
    out << '\n';
  }
}

inline nlohmann::json meta_json(const AriIndex& x) {
  nlohmann::json j{{"m", x.m},
                   {"alpha", x.alpha},
                   {"h", x.h},
                   {"zeta", x.zeta},
                   {"representatives", x.stats.representatives},
                   {"admissible", x.admissible.order.size()},
                   {"roots", x.forest.roots().size()},
                   {"sigma", x.stats.sigma}};
  if (x.grid)
    j["grid"] = {{"dims", x.grid->dims}, {"connectivity", x.grid->connectivity}};
  return j;
}

/// Per-vertex gamma values; for grids, a voxel-order array with null
/// outside the mask.
inline nlohmann::json gamma_map_json(const AriIndex& x) {
  const auto by_vertex = x.gamma_map();
  if (!x.grid)
    return {{"values", by_vertex}};
  nlohmann::json values(x.grid->voxel_count(), nullptr);
  for (VertexId v = 0; v < x.m; ++v)
    values[x.grid->voxel_of[v]] = by_vertex[v];
  return {{"dims", x.grid->dims}, {"values", std::move(values)}};
}

inline void write_gamma_map_csv(std::ostream& out, const AriIndex& x) {
  const auto by_vertex = x.gamma_map();
  out << "vertex,gamma\n";
  for (VertexId v = 0; v < x.m; ++v)
    out << v << ',' << format_fixed(by_vertex[v], 17) << '\n';
}

/// Raw little-endian f32 volume in voxel order, NaN outside the mask.
inline void write_gamma_volume(std::ostream& out, const AriIndex& x) {
  if (!x.grid)
    throw InputError("structure has no grid metadata");
  std::vector<float> vol(x.grid->voxel_count(), std::numeric_limits<float>::quiet_NaN());
  const auto by_vertex = x.gamma_map();
  for (VertexId v = 0; v < x.m; ++v)
    vol[x.grid->voxel_of[v]] = static_cast<float>(by_vertex[v]);
  for (float f : vol)
    detail::store_le<float>(out, f);
}

/// Inclusive grid from, from+step, ..., to. Values are computed as
/// from + i*step to avoid accumulated drift.
inline std::vector<double> gamma_grid(double from, double to, double step) {
  check_gamma(from);
  check_gamma(to);
  if (!(step > 0.0) || to < from)
    throw InputError("threshold grid needs from <= to and a positive step");
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
  std::vector<double> grid;
  for (std::size_t i = 0; i <= n; ++i)
    grid.push_back(std::min(1.0, from + static_cast<double>(i) * step));
  return grid;
}

/// Curve rows with labels translated to vertex ids.
inline nlohmann::json curve_json(const AriIndex& x, const std::vector<CurveRow>& rows) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"gamma", r.gamma}, {"label", x.vertex(r.label)}, {"size", r.size}};
    j["parent_label"] = r.parent_label == kNoRank ? nlohmann::json(nullptr)
                                                  : nlohmann::json(x.vertex(r.parent_label));
    list.push_back(std::move(j));
  }
  return list;
}

inline void write_curve_csv(std::ostream& out, const AriIndex& x, const std::vector<CurveRow>& rows) {
  out << "gamma,label,size,parent_label\n";
  for (const auto& r : rows) {
    out << format_fixed(r.gamma, 6) << ',' << x.vertex(r.label) << ',' << r.size << ',';
    if (r.parent_label != kNoRank)
      out << x.vertex(r.parent_label);
    out << '\n';
  }
}

} // namespace ari

#endif // ARI_REPORT_HPP
