#pragma once

// Run defaults, loaded from a TOML file (config/defaults.toml in the source
// tree). Missing keys keep the built-in values.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qsplit/baselines.hpp"
#include "qsplit/splitting.hpp"
#include "qsplit/subsolver.hpp"

namespace qsplit {

struct Defaults {
    SolverConfig solver;
    SplitConfig splitting;
    LnlsConfig lnls;
    int kopt_k = 1;
    int kopt_max_scans = -1;
    SaRegConfig sa_reg;
    int sa_reg_maxiter = 25;
    int sa_calls = 25;
    std::string topology = "pegasus";
    std::vector<int> reg_sizes;
    std::size_t min_n = 0;
    std::size_t max_n = 0;
};

/// Built-in values; identical to the checked-in defaults file.
Defaults builtin_defaults();

/// Overlays the keys present in `toml_text` on the built-in values.
/// Throws std::invalid_argument on syntax errors, wrong types or unknown keys.
Defaults parse_defaults(std::string_view toml_text);

Defaults load_defaults_file(const std::string& path);

/// $QSPLIT_DEFAULTS if set, else the defaults file of the source tree.
std::string default_config_path();

} // namespace qsplit
