// ari: build, query and serve adaptive-threshold cluster structures.

#include <csignal>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ari/ari.hpp"
#include "ari/serve.hpp"

namespace {

struct Options {
  // build
  std::string volume, edges, pvalues, output;
  double alpha = 0.05;
  std::optional<int> connectivity;
  bool no_shrink = false;
  // query & friends
  std::string structure;
  std::vector<double> gammas;
  std::string format = "table";
  bool members = false;
  double from = 0.0, to = 1.0, step = 0.01;
  // bench
  std::string family = "cube";
  std::vector<std::size_t> sizes{16};
  std::uint64_t seed = 1;
  int reps = 3;
  std::size_t max_vertices = std::size_t{1} << 27;
  // serve
  std::string bind = "127.0.0.1:8080";
  std::string ui_dir;
};

std::ostream* open_output(const std::string& path, std::ofstream& file, bool binary = false) {
  if (path.empty() || path == "-")
    return &std::cout;
  file.open(path, binary ? std::ios::binary : std::ios::out);
  if (!file)
    throw ari::InputError("cannot write " + path);
  return &file;
}

int cmd_build(const Options& o) {
  if (o.volume.empty() == (o.edges.empty() && o.pvalues.empty()))
    throw ari::InputError("give exactly one input: --volume, or --edges with --pvalues");
  if (o.output.empty())
    throw ari::InputError("--output is required");
  ari::BuildOptions bo;
  bo.bounds.zeta_shrink = !o.no_shrink;

  ari::AriIndex x;
  if (!o.volume.empty()) {
    ari::Volume vol = ari::load_volume(o.volume);
    if (o.connectivity)
      vol.grid.connectivity = *o.connectivity;
    ari::check_connectivity(vol.grid.connectivity);
    const auto gg = ari::grid_to_graph(vol.grid);
    x = ari::AriIndex::build(gg, vol.grid, vol.pvalues(), o.alpha, bo);
  } else {
    if (o.edges.empty() || o.pvalues.empty())
      throw ari::InputError("--edges and --pvalues must be given together");
    const auto in = ari::load_edge_list(o.edges, o.pvalues);
    x = ari::AriIndex::build(in.graph, in.pvalues, o.alpha, bo);
  }
  ari::save_structure(x, std::filesystem::path(o.output));

  const auto& s = x.stats;
  std::printf("m                 %zu\n", x.m);
  std::printf("edges             %zu\n", s.edges);
  std::printf("alpha             %g\n", x.alpha);
  std::printf("h                 %zu\n", x.h);
  std::printf("zeta              %zu\n", x.zeta);
  std::printf("representatives   %zu\n", s.representatives);
  std::printf("admissible        %zu\n", x.admissible.order.size());
  std::printf("sigma             %llu\n", static_cast<unsigned long long>(s.sigma));
  std::printf("forest   %10.6f s\n", s.seconds_forest);
  std::printf("bounds   %10.6f s\n", s.seconds_bounds);
  std::printf("index    %10.6f s\n", s.seconds_index);
  std::printf("total    %10.6f s\n", s.seconds_total());
  std::printf("wrote %s\n", o.output.c_str());
  return 0;
}

int cmd_query(const Options& o) {
  if (o.gammas.empty())
    throw ari::InputError("at least one --gamma is required");
  for (double g : o.gammas)
    ari::check_gamma(g);
  const ari::AriIndex x = ari::load_structure(std::filesystem::path(o.structure));
  auto session = x.session();
  std::ofstream file;
  std::ostream& out = *open_output(o.output, file);
  if (o.format == "json") {
    nlohmann::json all = nlohmann::json::array();
    for (double g : o.gammas)
      all.push_back(ari::clusters_json(g, ari::cluster_rows(x, session, g, o.members)));
    out << (o.gammas.size() == 1 ? all[0] : all).dump(2) << '\n';
  } else if (o.format == "csv") {
    ari::write_cluster_csv_header(out);
    for (double g : o.gammas)
      ari::write_cluster_csv(out, g, ari::cluster_rows(x, session, g, false));
  } else {
    for (std::size_t i = 0; i < o.gammas.size(); ++i) {
      if (i > 0)
        out << '\n';
      ari::write_cluster_table(out, o.gammas[i], ari::cluster_rows(x, session, o.gammas[i], false));
    }
  }
  return 0;
}

int cmd_gamma_map(const Options& o) {
  const ari::AriIndex x = ari::load_structure(std::filesystem::path(o.structure));
  std::ofstream file;
  if (o.format == "json") {
    std::ostream& out = *open_output(o.output, file);
    out << ari::gamma_map_json(x).dump() << '\n';
  } else if (x.grid && o.format != "csv") {
    if (o.output.empty() || o.output == "-")
      throw ari::InputError("a raw volume needs --output");
    ari::write_gamma_volume(*open_output(o.output, file, true), x);
  } else {
    ari::write_gamma_map_csv(*open_output(o.output, file), x);
  }
  return 0;
}

int cmd_curve(const Options& o) {
  const ari::AriIndex x = ari::load_structure(std::filesystem::path(o.structure));
  const auto grid = ari::gamma_grid(o.from, o.to, o.step);
  const auto rows = ari::size_curve(x.forest, x.bounds, x.admissible, grid);
  std::ofstream file;
  std::ostream& out = *open_output(o.output, file);
  if (o.format == "json")
    out << ari::curve_json(x, rows).dump() << '\n';
  else
    ari::write_curve_csv(out, x, rows);
  return 0;
}

int cmd_bench(const Options& o) {
  std::ofstream file;
  std::ostream& out = *open_output(o.output, file);
  bool header = true;
  for (std::size_t size : o.sizes) {
    ari::BenchScenario sc;
    sc.family = ari::parse_family(o.family);
    sc.size = size;
    sc.connectivity = o.connectivity.value_or(18);
    sc.seed = o.seed;
    sc.repetitions = o.reps;
    sc.max_vertices = o.max_vertices;
    ari::write_bench_csv(out, ari::run_bench(sc, o.alpha), header);
    out.flush();
    header = false;
  }
  return 0;
}

httplib::Server* g_server = nullptr;

int cmd_serve(const Options& o) {
  const ari::AriIndex x = ari::load_structure(std::filesystem::path(o.structure));
  const auto colon = o.bind.rfind(':');
  if (colon == std::string::npos)
    throw ari::InputError("--bind expects host:port, got " + o.bind);
  const std::string host = o.bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(o.bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw ari::InputError("bad port in --bind " + o.bind);
  }
  httplib::Server server;
  ari::register_routes(server, x, o.ui_dir);
  if (!server.bind_to_port(host, port))
    throw ari::InputError("cannot bind " + o.bind);
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  std::fprintf(stderr, "serving m=%zu on http://%s\n", x.m, o.bind.c_str());
  server.listen_after_bind();
  g_server = nullptr;
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"All-resolutions cluster inference: build, query and serve"};
  app.require_subcommand(1);
  Options o;

  auto* build = app.add_subcommand("build", "Build and save the cluster structure");
  build->add_option("--volume", o.volume, "JSON volume header");
  build->add_option("--edges", o.edges, "Edge list (one 'u v' pair per line)");
  build->add_option("--pvalues", o.pvalues, "P-values, one per vertex");
  build->add_option("--alpha", o.alpha, "Error rate")->capture_default_str();
  build->add_option("--connectivity", o.connectivity, "Grid connectivity (6, 18 or 26)");
  build->add_flag("--no-shrink", o.no_shrink, "Keep all chain elements (slower)");
  build->add_option("-o,--output", o.output, "Structure file to write")->required();

  auto structure_opts = [&](CLI::App* sub) {
    sub->add_option("structure", o.structure, "Structure file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", o.output, "Output file (default stdout)");
  };

  auto* query = app.add_subcommand("query", "Maximal clusters for TDP thresholds");
  structure_opts(query);
  query->add_option("--gamma", o.gammas, "TDP threshold (repeatable)")->required();
  query->add_option("--format", o.format)->check(CLI::IsMember({"table", "json", "csv"}))->capture_default_str();
  query->add_flag("--members", o.members, "Include member vertices (json)");

  auto* gmap = app.add_subcommand("gamma-map", "Largest threshold at which each vertex is covered");
  structure_opts(gmap);
  gmap->add_option("--format", o.format, "raw (grid default), csv or json")
      ->check(CLI::IsMember({"table", "raw", "csv", "json"}));

  auto* curve = app.add_subcommand("curve", "Cluster size versus threshold");
  structure_opts(curve);
  curve->add_option("--from", o.from)->capture_default_str();
  curve->add_option("--to", o.to)->capture_default_str();
  curve->add_option("--step", o.step)->capture_default_str();
  curve->add_option("--format", o.format)->check(CLI::IsMember({"table", "csv", "json"}));

  auto* bench = app.add_subcommand("bench", "Synthetic scaling benchmark (CSV)");
  bench->add_option("--family", o.family, "cube, perfect_binary_tree or caterpillar")->capture_default_str();
  bench->add_option("--size", o.sizes, "Cube edge, tree depth or caterpillar order (repeatable)");
  bench->add_option("--alpha", o.alpha)->capture_default_str();
  bench->add_option("--connectivity", o.connectivity);
  bench->add_option("--seed", o.seed)->capture_default_str();
  bench->add_option("--reps", o.reps)->capture_default_str();
  bench->add_option("--max-vertices", o.max_vertices)->capture_default_str();
  bench->add_option("-o,--output", o.output, "CSV file (default stdout)");

  auto* serve = app.add_subcommand("serve", "HTTP JSON API over a structure");
  serve->add_option("structure", o.structure, "Structure file")->required()->check(CLI::ExistingFile);
  serve->add_option("--bind", o.bind, "host:port")->capture_default_str();
  serve->add_option("--ui-dir", o.ui_dir, "Static files to serve at /");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build)
      return cmd_build(o);
    if (*query)
      return cmd_query(o);
    if (*gmap)
      return cmd_gamma_map(o);
    if (*curve)
      return cmd_curve(o);
    if (*bench)
      return cmd_bench(o);
    if (*serve)
      return cmd_serve(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ari: error: %s\n", e.what());
    return 1;
  }
  return 2;
}
