#ifndef EPIREP_CONFIG_HPP
#define EPIREP_CONFIG_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "epirep/continuation.hpp"
#include "epirep/integrate.hpp"
#include "epirep/model.hpp"

namespace epirep {

enum class SlowFastMode { FastBehavior, FastEpidemic };

struct RunConfig {
  ParamValues<double> params;
  std::optional<SystemState> s0;
  GammaRange gamma_range{0.01, 0.25};
  int n_steps = 241;
  int n_grid = 2001;
  double eps = 1.0;
  SlowFastMode mode = SlowFastMode::FastBehavior;
  IntegratorConfig integrator;
  double delta = 1e-2;
  std::filesystem::path output_dir = ".";
  bool include_nonphysical = false;

  ModelParams model() const { return ModelParams(params); }
};

/// Ordered key -> value view of a `key = value` file.
using ConfigEntries = std::map<std::string, std::string, std::less<>>;

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError with the line number.
ConfigEntries parse_config_text(std::string_view text);

ConfigEntries read_config_file(const std::filesystem::path& path);

/// Rejects unknown keys and reports missing required keys by name.
RunConfig build_config(const ConfigEntries& entries);

}  // namespace epirep

#endif  // EPIREP_CONFIG_HPP
