// aiotlink: link-budget feasibility, operating regions, range limits and
// deployment coverage for ambient-IoT backscatter devices.
#include <aiot/io.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

constexpr const char* kVersion = "0.1.0";

void add_common_flags(CLI::App* cmd, aiot::io::CommandLine& cl, std::string& format,
                      std::string& config, std::string& out, int& precision) {
    cmd->add_option("--config", config, "JSON config file");
    cmd->add_option("--format", format, "Output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", out, "Write output to this file instead of stdout");
    cmd->add_option("--precision", precision, "Significant digits for result values (1..17)")
        ->check(CLI::Range(1, 17));
    (void)cl;
}

void add_link_flags(CLI::App* cmd, std::string& preset, std::string& device,
                    aiot::io::Overrides& ov) {
    cmd->add_option("--preset", preset, "Preset scenario name (see 'scenario --list')");
    cmd->add_option("--device", device, "Device class: A, B or C")
        ->check(CLI::IsMember({"A", "B", "C", "a", "b", "c"}));
    cmd->add_option("--frequency-hz", ov.frequency_hz, "Carrier frequency override, Hz");
    cmd->add_option("--gamma-forward", ov.gamma_forward, "Forward path-loss exponent override");
    cmd->add_option("--gamma-reverse", ov.gamma_reverse, "Reverse path-loss exponent override");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Link-budget and coverage analysis for ambient-IoT backscatter devices"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    aiot::io::CommandLine cl;
    std::string format, config, out, preset, device;
    int precision = 0;

    auto* budget = app.add_subcommand(
        "budget", "Evaluate one link: received powers, margins, feasibility");
    add_common_flags(budget, cl, format, config, out, precision);
    add_link_flags(budget, preset, device, cl.overrides);
    budget->add_option("--d1", cl.overrides.d1_m, "Exciter-to-tag distance, m");
    budget->add_option("--d2", cl.overrides.d2_m, "Tag-to-reader distance, m");
    budget->add_flag("--monostatic", cl.overrides.monostatic,
                     "Exciter and reader are the same node (d1 = d2)");

    auto* range = app.add_subcommand(
        "range", "Closed-form range limits: power-up distance and max reader distance");
    add_common_flags(range, cl, format, config, out, precision);
    add_link_flags(range, preset, device, cl.overrides);
    range->add_option("--d1", cl.overrides.d1_m, "Exciter-to-tag distance, m");

    auto* region = app.add_subcommand(
        "region", "Feasibility and margins over a (d1, d2) grid");
    add_common_flags(region, cl, format, config, out, precision);
    add_link_flags(region, preset, device, cl.overrides);
    region->add_option("--d1-min", cl.overrides.d1_min_m, "Grid d1 minimum, m");
    region->add_option("--d1-max", cl.overrides.d1_max_m, "Grid d1 maximum, m");
    region->add_option("--d2-min", cl.overrides.d2_min_m, "Grid d2 minimum, m");
    region->add_option("--d2-max", cl.overrides.d2_max_m, "Grid d2 maximum, m");
    region->add_option("--n1", cl.overrides.n1, "Grid cells along d1");
    region->add_option("--n2", cl.overrides.n2, "Grid cells along d2");
    region->add_option("--d1-spacing", cl.overrides.d1_spacing, "d1 spacing: linear|logarithmic");
    region->add_option("--d2-spacing", cl.overrides.d2_spacing, "d2 spacing: linear|logarithmic");
    region->add_option("--cell-cap", cl.overrides.cell_cap, "Maximum grid cell count");

    auto* scenario = app.add_subcommand("scenario", "Show presets or a resolved scenario");
    add_common_flags(scenario, cl, format, config, out, precision);
    add_link_flags(scenario, preset, device, cl.overrides);
    scenario->add_flag("--list", cl.list_presets, "List the preset scenario names");

    auto* deploy = app.add_subcommand(
        "deploy", "Coverage of a multi-node deployment (config file required)");
    add_common_flags(deploy, cl, format, config, out, precision);

    auto* validate = app.add_subcommand(
        "validate", "Check a device against the 3GPP design targets");
    add_common_flags(validate, cl, format, config, out, precision);
    validate->add_option("--device", device, "Device class: A, B or C")
        ->check(CLI::IsMember({"A", "B", "C", "a", "b", "c"}));
    validate->add_option("--power-w", cl.overrides.power_w,
                         "Observed peak power consumption, W");
    validate->add_option("--data-rate-bps", cl.overrides.data_rate_bps,
                         "Claimed operating data rate, bps");
    validate->add_flag("--print-targets", cl.print_targets, "Print the design-targets table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 returns 0 for --help/--version; anything else is a usage error
        return code == 0 ? 0 : aiot::io::kExitConfigError;
    }

    CLI::App* sub = app.get_subcommands().front();
    cl.command = sub->get_name();
    if (!config.empty()) cl.config_path = config;
    if (!format.empty()) cl.format = aiot::io::output_format_from_string(format);
    if (!out.empty()) cl.out_path = out;
    if (precision != 0) cl.precision = precision;
    if (!preset.empty()) cl.overrides.preset = preset;
    if (!device.empty()) cl.overrides.device = aiot::device_type_from_string(device);

    return aiot::io::run_command(cl, std::cout, std::cerr);
}
