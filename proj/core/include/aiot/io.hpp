// Command surface shared by the aiotlink CLI and its tests: JSON config
// ingestion, command execution, and JSON/CSV result rendering.
#pragma once

#include "aiot/deployment.hpp"
#include "aiot/range_solver.hpp"
#include "aiot/scenario.hpp"
#include "aiot/targets.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace aiot::io {

class config_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { json, csv };

OutputFormat output_format_from_string(std::string_view name);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitResourceCap = 3;
inline constexpr int kExitViolations = 4;

/// Command-line overrides. Anything set here wins over the config file.
struct Overrides {
    std::optional<std::string> preset;
    std::optional<DeviceType> device;
    std::optional<double> d1_m;
    std::optional<double> d2_m;
    bool monostatic = false;
    std::optional<double> frequency_hz;
    std::optional<double> gamma_forward;
    std::optional<double> gamma_reverse;

    std::optional<double> d1_min_m, d1_max_m, d2_min_m, d2_max_m;
    std::optional<std::size_t> n1, n2;
    std::optional<std::string> d1_spacing, d2_spacing;
    std::optional<std::size_t> cell_cap;

    std::optional<double> power_w;
    std::optional<double> data_rate_bps;
};

struct CommandLine {
    std::string command;  // budget | range | region | scenario | deploy | validate
    std::optional<std::string> config_path;
    std::optional<std::string> config_text;  // takes precedence over config_path
    std::optional<OutputFormat> format;
    std::optional<std::string> out_path;
    std::optional<int> precision;  // significant digits for result values, default 6
    bool list_presets = false;     // scenario --list
    bool print_targets = false;    // validate --print-targets
    Overrides overrides;
};

/// Runs one command end to end: load + validate config, compute, render.
/// Returns the process exit code (0 ok, 2 config error, 3 resource cap,
/// 4 target violations). On failure nothing is written to the output
/// destination; the diagnostic goes to `err`.
int run_command(const CommandLine& cl, std::ostream& out, std::ostream& err);

/// Targets table as a JSON document and back (validate --print-targets).
std::string targets_to_json_text(const DesignTargets& targets);
DesignTargets targets_from_json_text(const std::string& text);

}  // namespace aiot::io
