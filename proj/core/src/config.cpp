#include "kwe/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "kwe/errors.hpp"

namespace kwe {

namespace pt = boost::property_tree;

namespace {

double to_double(const std::string& key, const std::string& s) {
  double x = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  const auto r = std::from_chars(b, e, x);
  if (r.ec != std::errc() || r.ptr != e) throw ConfigError("config key '" + key + "': expected a number, got '" + s + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& s) {
  long long x = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  const auto r = std::from_chars(b, e, x);
  if (r.ec != std::errc() || r.ptr != e)
    throw ConfigError("config key '" + key + "': expected an integer, got '" + s + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + s + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

Setter dbl(double RunConfig::*m) {
  return [m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = to_double(k, v); };
}
Setter integer(int RunConfig::*m) {
  return [m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = static_cast<int>(to_int(k, v)); };
}
template <class F>
Setter with(F f) {
  return Setter(f);
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"grid.v_max", dbl(&RunConfig::v_max)},
      {"grid.n_v", integer(&RunConfig::n_v)},
      {"grid.dim_x", integer(&RunConfig::dim_x)},
      {"grid.x_max", dbl(&RunConfig::x_max)},
      {"grid.n_x", integer(&RunConfig::n_x)},
      {"grid.n_polar", integer(&RunConfig::n_polar)},
      {"grid.n_azimuthal", integer(&RunConfig::n_azimuthal)},
      {"solver.dt", with([](RunConfig& c, auto& k, auto& v) { c.solver.dt = to_double(k, v); })},
      {"solver.t_end", with([](RunConfig& c, auto& k, auto& v) { c.solver.t_end = to_double(k, v); })},
      {"solver.snapshot_stride",
       with([](RunConfig& c, auto& k, auto& v) { c.solver.snapshot_stride = static_cast<int>(to_int(k, v)); })},
      {"solver.picard_tol", with([](RunConfig& c, auto& k, auto& v) { c.solver.picard_tol = to_double(k, v); })},
      {"solver.picard_max_iter",
       with([](RunConfig& c, auto& k, auto& v) { c.solver.picard_max_iter = static_cast<int>(to_int(k, v)); })},
      {"solver.picard_horizon",
       with([](RunConfig& c, auto& k, auto& v) { c.solver.picard_horizon = to_double(k, v); })},
      {"solver.gain_only", with([](RunConfig& c, auto& k, auto& v) { c.solver.gain_only = to_bool(k, v); })},
      {"solver.boundary_mass_budget",
       with([](RunConfig& c, auto& k, auto& v) { c.solver.boundary_mass_budget = to_double(k, v); })},
      {"solver.seed",
       with([](RunConfig& c, auto& k, auto& v) {
         const long long s = to_int(k, v);
         if (s < 0) throw ConfigError("config key '" + k + "': must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       })},
      {"weights.M", with([](RunConfig& c, auto& k, auto& v) { c.solver.weights.M = to_double(k, v); })},
      {"weights.alpha", with([](RunConfig& c, auto& k, auto& v) { c.solver.weights.alpha = to_double(k, v); })},
      {"weights.N_moment", with([](RunConfig& c, auto& k, auto& v) { c.solver.weights.N_moment = to_double(k, v); })},
      {"weights.epsilon0_budget",
       with([](RunConfig& c, auto& k, auto& v) { c.solver.epsilon0_budget = to_double(k, v); })},
      {"initial.name", with([](RunConfig& c, auto&, auto& v) { c.initial.name = v; })},
      {"initial.amplitude", with([](RunConfig& c, auto& k, auto& v) { c.initial.amplitude = to_double(k, v); })},
      {"initial.s_x", with([](RunConfig& c, auto& k, auto& v) { c.initial.s_x = to_double(k, v); })},
      {"initial.s_v", with([](RunConfig& c, auto& k, auto& v) { c.initial.s_v = to_double(k, v); })},
      {"initial.x0", with([](RunConfig& c, auto& k, auto& v) { c.initial.x0.x = to_double(k, v); })},
      {"initial.v0x", with([](RunConfig& c, auto& k, auto& v) { c.initial.v0.x = to_double(k, v); })},
      {"initial.v0y", with([](RunConfig& c, auto& k, auto& v) { c.initial.v0.y = to_double(k, v); })},
      {"initial.v0z", with([](RunConfig& c, auto& k, auto& v) { c.initial.v0.z = to_double(k, v); })},
      {"initial.beta", with([](RunConfig& c, auto& k, auto& v) { c.initial.beta = to_double(k, v); })},
      {"initial.mu", with([](RunConfig& c, auto& k, auto& v) { c.initial.mu = to_double(k, v); })},
      {"initial.cutoff", with([](RunConfig& c, auto& k, auto& v) { c.initial.cutoff = to_double(k, v); })},
      {"initial.noise", with([](RunConfig& c, auto& k, auto& v) { c.initial.noise = to_double(k, v); })},
      {"output.directory", with([](RunConfig& c, auto&, auto& v) { c.output.directory = v; })},
      {"output.prefix", with([](RunConfig& c, auto&, auto& v) { c.output.prefix = v; })},
      {"output.write_snapshots",
       with([](RunConfig& c, auto& k, auto& v) { c.output.write_snapshots = to_bool(k, v); })},
  };
  return table;
}

}  // namespace

GridHandle RunConfig::make_grid() const {
  const SpatialGrid x = dim_x == 0 ? SpatialGrid() : SpatialGrid(dim_x, x_max, n_x);
  return kwe::make_grid(x, VelocityGrid(v_max, n_v));
}

SphereQuadrature RunConfig::make_quadrature() const { return make_sphere_quadrature(n_polar, n_azimuthal); }

void RunConfig::validate() const {
  (void)make_grid();
  (void)make_quadrature();
  solver.validate();
  if (!(initial.amplitude >= 0.0)) throw ConfigError("config key 'initial.amplitude': must be nonnegative");
  if (!(initial.s_x > 0.0)) throw ConfigError("config key 'initial.s_x': must be positive");
  if (!(initial.s_v > 0.0)) throw ConfigError("config key 'initial.s_v': must be positive");
  if (!(initial.noise >= 0.0 && initial.noise < 1.0)) throw ConfigError("config key 'initial.noise': must lie in [0, 1)");
  if (output.prefix.empty()) throw ConfigError("config key 'output.prefix': must not be empty");
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  RunConfig cfg;
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError("config key '" + section + "' lies outside any section");
    for (const auto& [key, node] : body) {
      const std::string path = section + "." + key;
      const auto it = table.find(path);
      if (it == table.end()) throw ConfigError("unknown config key '" + path + "'");
      it->second(cfg, path, node.get_value<std::string>());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace kwe
