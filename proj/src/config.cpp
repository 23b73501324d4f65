#include "epirep/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace epirep {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "' as " +
                    std::string(expected));
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string_view v = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, text, "a number");
  return out;
}

int parse_int(std::string_view key, std::string_view text) {
  const std::string_view v = trim(text);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, text, "an integer");
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string_view v = trim(text);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, text, "a boolean");
}

std::vector<double> parse_list(std::string_view key, std::string_view text, std::size_t n) {
  std::vector<double> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_double(key, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.size() != n) bad_value(key, text, "a list of " + std::to_string(n) + " comma-separated numbers");
  return out;
}

constexpr std::array kParamKeys = {"c_P", "alpha", "beta_u", "beta_p", "c_IU", "c_IP", "L", "gamma"};

constexpr std::array kOptionalKeys = {"s0",
                                      "gamma_range",
                                      "n_steps",
                                      "n_grid",
                                      "eps",
                                      "regime",
                                      "method",
                                      "dt",
                                      "abs_tol",
                                      "rel_tol",
                                      "max_dt",
                                      "t_end",
                                      "record_every",
                                      "convergence_eps",
                                      "convergence_window",
                                      "stop_on_convergence",
                                      "delta",
                                      "output_dir",
                                      "include_nonphysical"};

bool known_key(std::string_view k) {
  return std::find(kParamKeys.begin(), kParamKeys.end(), k) != kParamKeys.end() ||
         std::find(kOptionalKeys.begin(), kOptionalKeys.end(), k) != kOptionalKeys.end();
}

}  // namespace

ConfigEntries parse_config_text(std::string_view text) {
  ConfigEntries out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!known_key(key)) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!out.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

ConfigEntries read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig build_config(const ConfigEntries& entries) {
  for (const auto& [k, v] : entries) {
    if (!known_key(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  RunConfig cfg;
  auto required = [&](std::string_view key) {
    const auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError("missing required config key '" + std::string(key) + "'");
    return parse_double(key, it->second);
  };
  cfg.params.c_P = required("c_P");
  cfg.params.alpha = required("alpha");
  cfg.params.beta_u = required("beta_u");
  cfg.params.beta_p = required("beta_p");
  cfg.params.c_IU = required("c_IU");
  cfg.params.c_IP = required("c_IP");
  cfg.params.L = required("L");
  cfg.params.gamma = required("gamma");

  auto get = [&](std::string_view key) -> const std::string* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  if (const auto* v = get("s0")) {
    const auto xs = parse_list("s0", *v, 3);
    cfg.s0 = SystemState(xs[0], xs[1], xs[2]);
  }
  if (const auto* v = get("gamma_range")) {
    const auto xs = parse_list("gamma_range", *v, 2);
    cfg.gamma_range = {xs[0], xs[1]};
  }
  if (const auto* v = get("n_steps")) cfg.n_steps = parse_int("n_steps", *v);
  if (const auto* v = get("n_grid")) cfg.n_grid = parse_int("n_grid", *v);
  if (const auto* v = get("eps")) cfg.eps = parse_double("eps", *v);
  if (const auto* v = get("regime")) {
    if (*v == "fast-behavior") {
      cfg.mode = SlowFastMode::FastBehavior;
    } else if (*v == "fast-epidemic") {
      cfg.mode = SlowFastMode::FastEpidemic;
    } else {
      bad_value("regime", *v, "fast-behavior or fast-epidemic");
    }
  }
  IntegratorConfig& ic = cfg.integrator;
  if (const auto* v = get("method")) {
    if (*v == "rk4_fixed") {
      ic.method = Method::Rk4Fixed;
    } else if (*v == "rk45_adaptive") {
      ic.method = Method::Rk45Adaptive;
    } else {
      bad_value("method", *v, "rk4_fixed or rk45_adaptive");
    }
  }
  if (const auto* v = get("dt")) ic.dt = parse_double("dt", *v);
  if (const auto* v = get("abs_tol")) ic.abs_tol = parse_double("abs_tol", *v);
  if (const auto* v = get("rel_tol")) ic.rel_tol = parse_double("rel_tol", *v);
  if (const auto* v = get("max_dt")) ic.max_dt = parse_double("max_dt", *v);
  if (const auto* v = get("t_end")) ic.t_end = parse_double("t_end", *v);
  if (const auto* v = get("record_every")) ic.record_every = parse_int("record_every", *v);
  if (const auto* v = get("convergence_eps")) ic.convergence_eps = parse_double("convergence_eps", *v);
  if (const auto* v = get("convergence_window")) ic.convergence_window = parse_double("convergence_window", *v);
  if (const auto* v = get("stop_on_convergence")) ic.stop_on_convergence = parse_bool("stop_on_convergence", *v);
  if (const auto* v = get("delta")) cfg.delta = parse_double("delta", *v);
  if (const auto* v = get("output_dir")) cfg.output_dir = *v;
  if (const auto* v = get("include_nonphysical")) cfg.include_nonphysical = parse_bool("include_nonphysical", *v);

  try {
    validate(ic);
    (void)cfg.model();
  } catch (const InvalidParameters& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace epirep
