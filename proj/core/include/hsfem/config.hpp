#pragma once

#include "hsfem/assembly.hpp"
#include "hsfem/mesh.hpp"
#include "hsfem/model.hpp"
#include "hsfem/solver.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace hsfem {

enum class InitialDatum {
    Gaussian, ///< alpha exp(-(x^2 + y^2))
    Constant, ///< n0 = alpha everywhere
};

enum class FieldFormat { Vtk, Csv };

struct RunConfig {
    BBox box{-10.0, 10.0, -10.0, 10.0};
    int nx = 100;
    int ny = 100;
    ModelParams model;
    Scheme scheme = Scheme::Fem2;
    InitialDatum initial = InitialDatum::Gaussian;
    WeightQuadrature quadrature = WeightQuadrature::Vertex;
    SolveOptions solve;

    std::size_t output_every = 1000; ///< field dump cadence in steps
    std::vector<double> output_times; ///< extra dump times
    std::vector<FieldFormat> formats{FieldFormat::Vtk};
    std::size_t series_every = 1; ///< diagnostics record cadence in steps
    std::size_t complementarity_every = 1;
    bool energy_check = true;
    bool clamp_report = true;
    std::string out_dir = "out";

    /// Cross-field checks (cadence > 0, right angles for scheme=fem, ...).
    /// Throws ConfigError.
    void validate() const;
};

/// Raw key = value pairs with the line each came from (0 for overrides).
struct ConfigEntry {
    std::string value;
    int line = 0;
};
using ConfigMap = std::map<std::string, ConfigEntry>;

/// Tokenises `key = value` lines; '#' starts a comment. Throws ConfigError on
/// malformed lines or duplicate keys.
ConfigMap read_config_entries(const std::string& text);

/// Overlays HSFEM_<KEY> variables from `environ`-style strings. Keys match
/// case-insensitively; variables naming no known key are ignored.
void apply_env_overrides(ConfigMap& entries, const std::vector<std::string>& environment);

/// The process environment as NAME=value strings.
std::vector<std::string> process_environment();

/// Builds a validated config. Unknown keys, missing required keys, type
/// mismatches and constraint violations are all collected into one ConfigError.
RunConfig config_from_entries(const ConfigMap& entries);

RunConfig parse_config_text(const std::string& text);

/// Reads `path`, applies HSFEM_ overrides from the process environment, validates.
RunConfig parse_config(const std::string& path);

/// Keys that must be present.
const std::vector<std::string>& required_config_keys();

/// Writes the config back in key = value form (17 significant digits).
std::string to_config_text(const RunConfig& config);

/// Assigns one key on an existing config (used by sweeps). Throws ConfigError.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

const char* to_string(Scheme scheme);

} // namespace hsfem
