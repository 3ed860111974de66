#ifndef ARI_SERVE_HPP
#define ARI_SERVE_HPP

// Read-only JSON API over a built structure:
//
//   GET /meta
//   GET /clusters?gamma=G[&members=true]
//   GET /gamma-map
//   GET /curve?from=A&to=B&step=S
//
// Errors are {"error": "..."} with a 4xx status. Every request runs its own
// query session against the shared immutable index.

#include <charconv>
#include <map>
#include <string>
#include <string_view>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ari/index.hpp"
#include "ari/report.hpp"

namespace ari {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

namespace detail {

inline ApiResponse api_error(int status, const std::string& message) {
  return {status, {{"error", message}}};
}

inline bool parse_double(const std::string& text, double& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && !text.empty();
}

} // namespace detail

/// Dispatches one API request; independent of any socket layer.
inline ApiResponse handle_api(const AriIndex& x, std::string_view path,
                              const std::map<std::string, std::string>& params) {
  auto param = [&](const char* key) -> const std::string* {
    auto it = params.find(key);
    return it == params.end() ? nullptr : &it->second;
  };
  auto number = [&](const char* key, double& out) -> std::string {
    const std::string* text = param(key);
    if (!text)
      return std::string("missing parameter '") + key + "'";
    if (!detail::parse_double(*text, out))
      return std::string("parameter '") + key + "' is not a number: " + *text;
    return {};
  };

  try {
    if (path == "/meta")
      return {200, meta_json(x)};

    if (path == "/clusters") {
      double gamma = 0;
      if (auto err = number("gamma", gamma); !err.empty())
        return detail::api_error(400, err);
      bool members = false;
      if (const std::string* flag = param("members"))
        members = *flag == "true" || *flag == "1";
      auto session = x.session();
      return {200, clusters_json(gamma, cluster_rows(x, session, gamma, members))};
    }

    if (path == "/gamma-map")
      return {200, gamma_map_json(x)};

    if (path == "/curve") {
      double from = 0, to = 1, step = 0.01;
      for (auto [key, slot] : {std::pair{"from", &from}, std::pair{"to", &to}, std::pair{"step", &step}})
        if (param(key))
          if (auto err = number(key, *slot); !err.empty())
            return detail::api_error(400, err);
      const auto grid = gamma_grid(from, to, step);
      if (grid.size() > 100001)
        return detail::api_error(400, "threshold grid too fine");
      return {200, curve_json(x, size_curve(x.forest, x.bounds, x.admissible, grid))};
    }
  } catch (const InputError& e) {
    return detail::api_error(400, e.what());
  }
  return detail::api_error(404, "no such endpoint: " + std::string(path));
}

/// Registers the API routes (and optionally a static UI directory).
inline void register_routes(httplib::Server& server, const AriIndex& x, const std::string& ui_dir = {}) {
  auto handler = [&x](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> params;
    for (const auto& [k, v] : req.params)
      params.emplace(k, v);
    const ApiResponse r = handle_api(x, req.path, params);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body.dump(), "application/json");
  };
  for (const char* route : {"/meta", "/clusters", "/gamma-map", "/curve"})
    server.Get(route, handler);
  if (!ui_dir.empty() && !server.set_mount_point("/", ui_dir))
    throw InputError("cannot serve UI directory " + ui_dir);
}

} // namespace ari

#endif // ARI_SERVE_HPP
