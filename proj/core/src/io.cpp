#include "aiot/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

namespace aiot::io {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw config_error(message); }

// ---------------------------------------------------------------------------
// number formatting

double round_sig(double x, int digits) {
    if (digits >= 15 || x == 0.0 || !std::isfinite(x)) return x;
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(x))));
    const double scale = std::pow(10.0, digits - 1 - exponent);
    return std::round(x * scale) / scale;
}

// Shortest round-trip rendering, shared by CSV cells and JSON values so the
// two formats carry identical digits.
std::string render_full(double x) { return json(x).dump(); }

std::string render(double x, int digits) { return render_full(round_sig(x, digits)); }

// ---------------------------------------------------------------------------
// json access with field-level error messages

const json* find(const json& obj, const char* key) {
    if (!obj.is_object()) return nullptr;
    const auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double num_field(const json& obj, const std::string& ctx, const char* key) {
    const json* v = find(obj, key);
    if (!v) fail(ctx + "." + key + ": required");
    if (!v->is_number()) fail(ctx + "." + key + ": must be a number");
    return v->get<double>();
}

std::optional<double> opt_num_field(const json& obj, const std::string& ctx, const char* key) {
    const json* v = find(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_number()) fail(ctx + "." + key + ": must be a number");
    return v->get<double>();
}

std::string str_field(const json& obj, const std::string& ctx, const char* key) {
    const json* v = find(obj, key);
    if (!v) fail(ctx + "." + key + ": required");
    if (!v->is_string()) fail(ctx + "." + key + ": must be a string");
    return v->get<std::string>();
}

std::optional<std::string> opt_str_field(const json& obj, const std::string& ctx,
                                         const char* key) {
    const json* v = find(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_string()) fail(ctx + "." + key + ": must be a string");
    return v->get<std::string>();
}

double positive_field(const json& obj, const std::string& ctx, const char* key) {
    const double v = num_field(obj, ctx, key);
    if (!std::isfinite(v) || v <= 0.0)
        fail(ctx + "." + key + ": must be > 0 (got " + render_full(v) + ")");
    return v;
}

// ---------------------------------------------------------------------------
// profile (de)serialization

Carrier carrier_from_json(const json& obj, const std::string& ctx) {
    const auto freq = opt_num_field(obj, ctx, "frequency_hz");
    const auto wave = opt_num_field(obj, ctx, "wavelength_m");
    if (!freq && !wave) fail(ctx + ": frequency_hz or wavelength_m required");
    if (freq && wave) {
        if (std::abs(*wave * *freq / kSpeedOfLightMps - 1.0) > 1e-9)
            fail(ctx + ": frequency_hz and wavelength_m are inconsistent");
    }
    try {
        return freq ? Carrier::from_frequency_hz(*freq) : Carrier::from_wavelength_m(*wave);
    } catch (const std::invalid_argument& e) {
        fail(ctx + ": " + e.what());
    }
}

json carrier_to_json(const Carrier& carrier) {
    return {{"frequency_hz", carrier.frequency_hz()}, {"wavelength_m", carrier.wavelength_m()}};
}

ExciterProfile exciter_from_json(const json& obj, const std::string& ctx) {
    try {
        return ExciterProfile{PowerDbm(num_field(obj, ctx, "tx_power_dbm")),
                              GainDbi(num_field(obj, ctx, "antenna_gain_dbi"))};
    } catch (const std::invalid_argument& e) {
        fail(ctx + ": " + e.what());
    }
}

json exciter_to_json(const ExciterProfile& e) {
    return {{"tx_power_dbm", e.tx_power.dbm()}, {"antenna_gain_dbi", e.antenna_gain.dbi()}};
}

NoiseSpec noise_from_json(const json& obj, const std::string& ctx) {
    NoiseSpec n{num_field(obj, ctx, "noise_figure_db"), num_field(obj, ctx, "fade_margin_db"),
                num_field(obj, ctx, "bandwidth_hz"), num_field(obj, ctx, "snr_min_db")};
    try {
        n.validate();
    } catch (const std::invalid_argument& e) {
        fail(ctx + ": " + e.what());
    }
    return n;
}

json noise_to_json(const NoiseSpec& n) {
    return {{"noise_figure_db", n.noise_figure_db},
            {"fade_margin_db", n.fade_margin_db},
            {"bandwidth_hz", n.bandwidth_hz},
            {"snr_min_db", n.snr_min_db}};
}

TagProfile tag_from_json(const json& obj, const std::string& ctx) {
    const DeviceType type = [&] {
        try {
            return device_type_from_string(str_field(obj, ctx, "device_type"));
        } catch (const std::invalid_argument& e) {
            fail(ctx + ".device_type: " + e.what());
        }
    }();
    const GainDbi gain = [&] {
        try {
            return GainDbi(num_field(obj, ctx, "antenna_gain_dbi"));
        } catch (const std::invalid_argument& e) {
            fail(ctx + ": " + e.what());
        }
    }();

    const auto threshold = opt_num_field(obj, ctx, "powerup_threshold_dbm");
    const auto tx_power = opt_num_field(obj, ctx, "tx_power_dbm");
    if (threshold && type != DeviceType::A)
        fail(ctx + ".powerup_threshold_dbm: only device A has a power-up threshold");
    if (tx_power && type != DeviceType::C)
        fail(ctx + ".tx_power_dbm: only device C transmits actively");

    TagProfile tag = [&] {
        try {
            switch (type) {
                case DeviceType::A:
                    if (!threshold) fail(ctx + ".powerup_threshold_dbm: required for device A");
                    return TagProfile::passive(gain, num_field(obj, ctx, "modulation_factor"),
                                               PowerDbm(*threshold));
                case DeviceType::B:
                    return TagProfile::semi_passive(gain,
                                                    num_field(obj, ctx, "modulation_factor"));
                case DeviceType::C:
                    if (!tx_power) fail(ctx + ".tx_power_dbm: required for device C");
                    return TagProfile::active(gain, PowerDbm(*tx_power));
            }
            fail(ctx + ".device_type: unknown device type");
        } catch (const std::invalid_argument& e) {
            fail(ctx + ": " + e.what());
        }
    }();

    if (const auto watts = opt_num_field(obj, ctx, "peak_power_consumption_w")) {
        try {
            tag.set_peak_power_consumption_w(*watts);
        } catch (const std::invalid_argument& e) {
            fail(ctx + ": " + e.what());
        }
    }
    return tag;
}

json tag_to_json(const TagProfile& tag) {
    json obj{{"device_type", to_string(tag.device_type())},
             {"antenna_gain_dbi", tag.antenna_gain().dbi()}};
    if (tag.device_type() != DeviceType::C)
        obj["modulation_factor"] = tag.modulation_factor();
    if (tag.powerup_threshold()) obj["powerup_threshold_dbm"] = tag.powerup_threshold()->dbm();
    if (tag.tx_power()) obj["tx_power_dbm"] = tag.tx_power()->dbm();
    if (tag.peak_power_consumption_w())
        obj["peak_power_consumption_w"] = *tag.peak_power_consumption_w();
    return obj;
}

// ---------------------------------------------------------------------------
// link resolution (preset or inline profiles)

struct ResolvedLink {
    ExciterProfile exciter;
    TagProfile tag = TagProfile::semi_passive(GainDbi(0.0), 1.0);
    ReaderProfile reader;
    std::optional<NoiseSpec> noise;
    Carrier carrier = Carrier::from_frequency_hz(900e6);
    double gamma_forward = 2.0;
    double gamma_reverse = 2.0;
    LinkConfiguration configuration = LinkConfiguration::bistatic;
    std::optional<std::string> preset;
    std::optional<DeploymentTopology> topology;
    std::optional<Environment> environment;
    std::vector<std::string> notes;
};

ResolvedLink link_from_scenario(const Scenario& s) {
    ResolvedLink link;
    link.exciter = s.exciter;
    link.tag = s.tag;
    link.reader = s.reader;
    link.noise = s.noise;
    link.carrier = s.carrier;
    link.gamma_forward = s.gamma_forward;
    link.gamma_reverse = s.gamma_reverse;
    link.preset = s.name;
    link.topology = s.topology;
    link.environment = s.environment;
    return link;
}

ResolvedLink resolve_link(const json& cfg, const Overrides& ov) {
    const auto preset_name =
        ov.preset ? ov.preset : opt_str_field(cfg, "config", "preset");
    const json* profiles = find(cfg, "profiles");
    if (preset_name && profiles)
        fail("config: exactly one of preset and profiles must be given, not both");
    if (!preset_name && !profiles)
        fail("config: either a preset name or inline profiles are required");

    ResolvedLink link;
    if (preset_name) {
        DeviceType device = DeviceType::A;
        if (const auto name = opt_str_field(cfg, "config", "device")) {
            try {
                device = device_type_from_string(*name);
            } catch (const std::invalid_argument& e) {
                fail(std::string("config.device: ") + e.what());
            }
        }
        if (ov.device) device = *ov.device;
        try {
            link = link_from_scenario(preset_scenario(*preset_name, device));
        } catch (const std::invalid_argument& e) {
            fail(std::string("config: ") + e.what());
        }
        link.notes.push_back("preset '" + *preset_name + "' resolved from parameter table v" +
                             preset_defaults::kTableVersion +
                             "; preset link parameters are engineering assumptions");
    } else {
        const std::string ctx = "profiles";
        const json* exciter = find(*profiles, "exciter");
        if (!exciter) fail(ctx + ".exciter: required");
        link.exciter = exciter_from_json(*exciter, ctx + ".exciter");
        const json* tag = find(*profiles, "tag");
        if (!tag) fail(ctx + ".tag: required");
        link.tag = tag_from_json(*tag, ctx + ".tag");
        if (ov.device && *ov.device != link.tag.device_type())
            fail("config: --device conflicts with the inline tag profile");

        const json* reader = find(*profiles, "reader");
        if (!reader) fail(ctx + ".reader: required");
        GainDbi reader_gain = [&] {
            try {
                return GainDbi(num_field(*reader, ctx + ".reader", "antenna_gain_dbi"));
            } catch (const std::invalid_argument& e) {
                fail(ctx + ".reader: " + e.what());
            }
        }();
        if (const json* noise = find(*profiles, "noise"))
            link.noise = noise_from_json(*noise, ctx + ".noise");
        const auto sensitivity = opt_num_field(*reader, ctx + ".reader", "sensitivity_dbm");
        if (sensitivity) {
            link.reader = ReaderProfile{reader_gain, PowerDbm(*sensitivity)};
        } else if (link.noise) {
            link.reader = ReaderProfile{reader_gain, reader_sensitivity(*link.noise)};
            link.notes.push_back("reader sensitivity derived from the noise block");
        } else {
            fail(ctx + ".reader.sensitivity_dbm: required (or provide profiles.noise)");
        }

        if (const json* carrier = find(*profiles, "carrier"))
            link.carrier = carrier_from_json(*carrier, ctx + ".carrier");
        else
            link.notes.push_back("carrier defaulted to 900 MHz");

        link.gamma_forward =
            opt_num_field(*profiles, ctx, "path_loss_exponent_forward").value_or(2.0);
        link.gamma_reverse =
            opt_num_field(*profiles, ctx, "path_loss_exponent_reverse").value_or(2.0);

        if (const auto config_str = opt_str_field(*profiles, ctx, "configuration")) {
            if (*config_str == "monostatic")
                link.configuration = LinkConfiguration::monostatic;
            else if (*config_str == "bistatic")
                link.configuration = LinkConfiguration::bistatic;
            else
                fail(ctx + ".configuration: expected monostatic or bistatic");
        }
        if (const auto topo = opt_num_field(*profiles, ctx, "topology")) {
            try {
                link.topology = topology_from_int(static_cast<int>(*topo));
            } catch (const std::invalid_argument& e) {
                fail(ctx + ".topology: " + e.what());
            }
        }
        if (const auto env = opt_str_field(*profiles, ctx, "environment")) {
            try {
                link.environment = environment_from_string(*env);
            } catch (const std::invalid_argument& e) {
                fail(ctx + ".environment: " + e.what());
            }
        }
    }

    if (ov.frequency_hz) {
        try {
            link.carrier = Carrier::from_frequency_hz(*ov.frequency_hz);
        } catch (const std::invalid_argument& e) {
            fail(std::string("--frequency-hz: ") + e.what());
        }
    }
    if (ov.gamma_forward) link.gamma_forward = *ov.gamma_forward;
    if (ov.gamma_reverse) link.gamma_reverse = *ov.gamma_reverse;
    if (ov.monostatic) link.configuration = LinkConfiguration::monostatic;

    if (link.tag.device_type() == DeviceType::C)
        link.notes.push_back(
            "device C uses a one-way active uplink (no backscatter, no power-up constraint)");
    return link;
}

// The echoed block is itself a loadable config: feeding it back through
// --config reproduces the run.
json link_to_json(const ResolvedLink& link) {
    json profiles{{"exciter", exciter_to_json(link.exciter)},
                  {"tag", tag_to_json(link.tag)},
                  {"reader",
                   {{"antenna_gain_dbi", link.reader.antenna_gain.dbi()},
                    {"sensitivity_dbm", link.reader.sensitivity.dbm()}}}};
    if (link.noise) profiles["noise"] = noise_to_json(*link.noise);
    profiles["carrier"] = carrier_to_json(link.carrier);
    profiles["path_loss_exponent_forward"] = link.gamma_forward;
    profiles["path_loss_exponent_reverse"] = link.gamma_reverse;
    profiles["configuration"] = to_string(link.configuration);
    if (link.topology) profiles["topology"] = static_cast<int>(*link.topology);
    if (link.environment) profiles["environment"] = to_string(*link.environment);
    return profiles;
}

// ---------------------------------------------------------------------------
// CSV rendering

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (const char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

class CsvWriter {
  public:
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += csv_escape(cells[i]);
        }
        text_ += "\r\n";
    }
    const std::string& text() const { return text_; }

  private:
    std::string text_;
};

std::string csv_bool(bool v) { return v ? "1" : "0"; }

std::string csv_opt(const std::optional<double>& v, int digits) {
    return v ? render(*v, digits) : std::string();
}

// ---------------------------------------------------------------------------
// documents

struct Document {
    std::string text;
    int exit_code = kExitOk;
};

json result_header(const char* command, const json& resolved_config,
                   const std::vector<std::string>& notes) {
    json doc{{"command", command}, {"resolved_config", resolved_config}};
    if (!notes.empty()) doc["notes"] = notes;
    return doc;
}

std::vector<std::string> link_echo_header() {
    return {"preset",          "device_type",   "tx_power_dbm",     "exciter_gain_dbi",
            "tag_gain_dbi",    "modulation_factor", "powerup_threshold_dbm",
            "tag_tx_power_dbm", "reader_gain_dbi", "sensitivity_dbm", "frequency_hz",
            "gamma_forward",   "gamma_reverse", "configuration"};
}

std::vector<std::string> link_echo_row(const ResolvedLink& link) {
    return {link.preset.value_or(""),
            to_string(link.tag.device_type()),
            render_full(link.exciter.tx_power.dbm()),
            render_full(link.exciter.antenna_gain.dbi()),
            render_full(link.tag.antenna_gain().dbi()),
            link.tag.device_type() == DeviceType::C ? ""
                                                    : render_full(link.tag.modulation_factor()),
            link.tag.powerup_threshold() ? render_full(link.tag.powerup_threshold()->dbm()) : "",
            link.tag.tx_power() ? render_full(link.tag.tx_power()->dbm()) : "",
            render_full(link.reader.antenna_gain.dbi()),
            render_full(link.reader.sensitivity.dbm()),
            render_full(link.carrier.frequency_hz()),
            render_full(link.gamma_forward),
            render_full(link.gamma_reverse),
            to_string(link.configuration)};
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// commands

LinkGeometry make_geometry(const ResolvedLink& link, double d1, double d2) {
    try {
        if (link.configuration == LinkConfiguration::monostatic) {
            if (d1 != d2) fail("link: monostatic configuration requires d1_m == d2_m");
            if (link.gamma_forward != link.gamma_reverse)
                fail("link: monostatic configuration requires equal path-loss exponents");
            return LinkGeometry::monostatic(d1, link.gamma_forward, link.carrier);
        }
        return LinkGeometry::bistatic(d1, d2, link.gamma_forward, link.gamma_reverse,
                                      link.carrier);
    } catch (const std::invalid_argument& e) {
        fail(std::string("link: ") + e.what());
    }
}

double require_distance(const std::optional<double>& flag, const json& cfg, const char* key) {
    if (flag) {
        if (!std::isfinite(*flag) || *flag <= 0.0)
            fail(std::string("link.") + key + ": must be > 0 (got " + render_full(*flag) + ")");
        return *flag;
    }
    const json* linkcfg = find(cfg, "link");
    if (!linkcfg) fail(std::string("link.") + key + ": required");
    return positive_field(*linkcfg, "link", key);
}

Document cmd_budget(const CommandLine& cl, const json& cfg, OutputFormat format, int digits) {
    ResolvedLink link = resolve_link(cfg, cl.overrides);

    double d1 = require_distance(cl.overrides.d1_m, cfg, "d1_m");
    double d2;
    if (link.configuration == LinkConfiguration::monostatic && !cl.overrides.d2_m &&
        !(find(cfg, "link") && find(*find(cfg, "link"), "d2_m"))) {
        d2 = d1;  // monostatic: one distance is enough
    } else {
        d2 = require_distance(cl.overrides.d2_m, cfg, "d2_m");
    }

    const LinkGeometry geometry = make_geometry(link, d1, d2);
    const FeasibilityResult feas = link_feasible(link.exciter, link.tag, link.reader, geometry);
    const double forward_dbm = forward_link_power(link.exciter, link.tag, geometry).dbm();
    const bool active = link.tag.device_type() == DeviceType::C;
    const double reverse_dbm =
        active ? active_uplink_power(link.tag, link.reader, d2, link.gamma_reverse, link.carrier)
                     .dbm()
               : backscatter_link_power(link.exciter, link.tag, link.reader, geometry).dbm();

    json resolved{{"profiles", link_to_json(link)},
                  {"link", {{"d1_m", d1}, {"d2_m", d2}}}};
    json results{{"forward_power_dbm", round_sig(forward_dbm, digits)},
                 {"reverse_power_dbm", round_sig(reverse_dbm, digits)},
                 {"reverse_path", active ? "active-uplink" : "backscatter"},
                 {"powered", feas.powered},
                 {"powerup_margin_db", feas.powerup_margin_db
                                           ? json(round_sig(*feas.powerup_margin_db, digits))
                                           : json(nullptr)},
                 {"detected", feas.detected},
                 {"detection_margin_db", round_sig(feas.detection_margin_db, digits)},
                 {"feasible", feas.feasible}};

    if (format == OutputFormat::json) {
        json doc = result_header("budget", resolved, link.notes);
        doc["results"] = results;
        return {dump(doc)};
    }

    CsvWriter csv;
    auto header = link_echo_header();
    for (const char* extra :
         {"d1_m", "d2_m", "forward_power_dbm", "reverse_power_dbm", "reverse_path", "powered",
          "powerup_margin_db", "detected", "detection_margin_db", "feasible"})
        header.push_back(extra);
    csv.row(header);
    auto row = link_echo_row(link);
    row.push_back(render_full(d1));
    row.push_back(render_full(d2));
    row.push_back(render(forward_dbm, digits));
    row.push_back(render(reverse_dbm, digits));
    row.push_back(active ? "active-uplink" : "backscatter");
    row.push_back(csv_bool(feas.powered));
    row.push_back(csv_opt(feas.powerup_margin_db, digits));
    row.push_back(csv_bool(feas.detected));
    row.push_back(render(feas.detection_margin_db, digits));
    row.push_back(csv_bool(feas.feasible));
    csv.row(row);
    return {csv.text()};
}

Document cmd_range(const CommandLine& cl, const json& cfg, OutputFormat format, int digits) {
    ResolvedLink link = resolve_link(cfg, cl.overrides);

    std::optional<double> d1 = cl.overrides.d1_m;
    if (!d1) {
        if (const json* linkcfg = find(cfg, "link")) d1 = opt_num_field(*linkcfg, "link", "d1_m");
    }
    if (d1 && (!std::isfinite(*d1) || *d1 <= 0.0))
        fail("link.d1_m: must be > 0 (got " + render_full(*d1) + ")");

    const auto powerup =
        max_powerup_distance_m(link.exciter, link.tag, link.gamma_forward, link.carrier);

    std::optional<ReaderRange> reach;
    if (d1)
        reach = max_reader_distance_m(link.exciter, link.tag, link.reader, *d1,
                                      link.gamma_forward, link.gamma_reverse, link.carrier);

    json resolved{{"profiles", link_to_json(link)}};
    if (d1) resolved["link"] = {{"d1_m", *d1}};
    json results{{"max_powerup_distance_m",
                  powerup ? json(round_sig(*powerup, digits)) : json(nullptr)},
                 {"powerup_unbounded", !powerup.has_value()}};
    if (reach) {
        results["d1_m"] = round_sig(*d1, digits);
        results["powered_at_d1"] = reach->powered;
        results["max_reader_distance_m"] =
            reach->powered ? json(round_sig(reach->d2_m, digits)) : json(nullptr);
    }

    if (format == OutputFormat::json) {
        json doc = result_header("range", resolved, link.notes);
        doc["results"] = results;
        return {dump(doc)};
    }

    CsvWriter csv;
    csv.row({"max_powerup_distance_m", "powerup_unbounded", "d1_m", "powered_at_d1",
             "max_reader_distance_m"});
    csv.row({powerup ? render(*powerup, digits) : "", csv_bool(!powerup.has_value()),
             d1 ? render(*d1, digits) : "", reach ? csv_bool(reach->powered) : "",
             reach && reach->powered ? render(reach->d2_m, digits) : ""});
    return {csv.text()};
}

std::size_t count_from(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0 || v > 1e9 || v != std::floor(v))
        fail(std::string(what) + ": must be an integer in 0..1e9 (got " + render_full(v) + ")");
    return static_cast<std::size_t>(v);
}

GridSpec resolve_grid(const json& cfg, const Overrides& ov) {
    GridSpec grid;  // defaults: d1 0.5..10 linear x50, d2 1..1000 log x60
    if (const json* g = find(cfg, "grid")) {
        if (const auto v = opt_num_field(*g, "grid", "d1_min_m")) grid.d1_min_m = *v;
        if (const auto v = opt_num_field(*g, "grid", "d1_max_m")) grid.d1_max_m = *v;
        if (const auto v = opt_num_field(*g, "grid", "d2_min_m")) grid.d2_min_m = *v;
        if (const auto v = opt_num_field(*g, "grid", "d2_max_m")) grid.d2_max_m = *v;
        if (const auto v = opt_num_field(*g, "grid", "n1")) grid.n1 = count_from(*v, "grid.n1");
        if (const auto v = opt_num_field(*g, "grid", "n2")) grid.n2 = count_from(*v, "grid.n2");
        if (const auto v = opt_str_field(*g, "grid", "d1_spacing"))
            grid.d1_spacing = grid_spacing_from_string(*v);
        if (const auto v = opt_str_field(*g, "grid", "d2_spacing"))
            grid.d2_spacing = grid_spacing_from_string(*v);
    }
    if (ov.d1_min_m) grid.d1_min_m = *ov.d1_min_m;
    if (ov.d1_max_m) grid.d1_max_m = *ov.d1_max_m;
    if (ov.d2_min_m) grid.d2_min_m = *ov.d2_min_m;
    if (ov.d2_max_m) grid.d2_max_m = *ov.d2_max_m;
    if (ov.n1) grid.n1 = *ov.n1;
    if (ov.n2) grid.n2 = *ov.n2;
    if (ov.d1_spacing) grid.d1_spacing = grid_spacing_from_string(*ov.d1_spacing);
    if (ov.d2_spacing) grid.d2_spacing = grid_spacing_from_string(*ov.d2_spacing);
    try {
        grid.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("grid: ") + e.what());
    }
    return grid;
}

json grid_to_json(const GridSpec& grid) {
    return {{"d1_min_m", grid.d1_min_m}, {"d1_max_m", grid.d1_max_m},
            {"d2_min_m", grid.d2_min_m}, {"d2_max_m", grid.d2_max_m},
            {"n1", grid.n1},             {"n2", grid.n2},
            {"d1_spacing", to_string(grid.d1_spacing)},
            {"d2_spacing", to_string(grid.d2_spacing)}};
}

Document cmd_region(const CommandLine& cl, const json& cfg, OutputFormat format, int digits) {
    ResolvedLink link = resolve_link(cfg, cl.overrides);
    if (link.configuration == LinkConfiguration::monostatic)
        fail("region: a (d1, d2) grid requires a bistatic configuration");

    const GridSpec grid = resolve_grid(cfg, cl.overrides);
    RegionOptions options;
    if (const json* g = find(cfg, "grid")) {
        if (const auto v = opt_num_field(*g, "grid", "cell_cap"))
            options.cell_cap = count_from(*v, "grid.cell_cap");
    }
    if (cl.overrides.cell_cap) options.cell_cap = *cl.overrides.cell_cap;

    const OperatingRegion region =
        compute_region(link.exciter, link.tag, link.reader, link.gamma_forward,
                       link.gamma_reverse, link.carrier, grid, options);

    if (format == OutputFormat::csv) {
        CsvWriter csv;
        csv.row({"d1_m", "d2_m", "feasible", "powerup_margin_db", "detection_margin_db"});
        for (std::size_t i = 0; i < grid.n1; ++i) {
            for (std::size_t j = 0; j < grid.n2; ++j) {
                const std::size_t k = region.index(i, j);
                const double pm = region.powerup_margin_db[k];
                csv.row({render(region.d1_m[i], digits), render(region.d2_m[j], digits),
                         csv_bool(region.feasible[k] != 0),
                         std::isnan(pm) ? std::string() : render(pm, digits),
                         render(region.detection_margin_db[k], digits)});
            }
        }
        return {csv.text()};
    }

    json resolved{{"profiles", link_to_json(link)}, {"grid", grid_to_json(grid)}};
    json doc = result_header("region", resolved, link.notes);

    json d1v = json::array(), d2v = json::array();
    for (const double v : region.d1_m) d1v.push_back(round_sig(v, digits));
    for (const double v : region.d2_m) d2v.push_back(round_sig(v, digits));

    json feas = json::array(), pm = json::array(), dm = json::array();
    for (std::size_t i = 0; i < grid.n1; ++i) {
        json frow = json::array(), prow = json::array(), drow = json::array();
        for (std::size_t j = 0; j < grid.n2; ++j) {
            const std::size_t k = region.index(i, j);
            frow.push_back(region.feasible[k] != 0 ? 1 : 0);
            const double p = region.powerup_margin_db[k];
            prow.push_back(std::isnan(p) ? json(nullptr) : json(round_sig(p, digits)));
            drow.push_back(round_sig(region.detection_margin_db[k], digits));
        }
        feas.push_back(std::move(frow));
        pm.push_back(std::move(prow));
        dm.push_back(std::move(drow));
    }
    doc["results"] = {{"config_fingerprint", region.config_fingerprint},
                      {"d1_m", std::move(d1v)},
                      {"d2_m", std::move(d2v)},
                      {"feasible", std::move(feas)},
                      {"powerup_margin_db", std::move(pm)},
                      {"detection_margin_db", std::move(dm)}};
    return {dump(doc)};
}

Document cmd_scenario(const CommandLine& cl, const json& cfg, OutputFormat format, int) {
    if (cl.list_presets) {
        if (format == OutputFormat::json) {
            json doc{{"command", "scenario"}, {"presets", preset_scenario_names()}};
            return {dump(doc)};
        }
        CsvWriter csv;
        csv.row({"preset"});
        for (const auto& name : preset_scenario_names()) csv.row({name});
        return {csv.text()};
    }

    const ResolvedLink link = resolve_link(cfg, cl.overrides);
    if (format == OutputFormat::json) {
        json doc = result_header("scenario", json{{"profiles", link_to_json(link)}}, link.notes);
        return {dump(doc)};
    }
    CsvWriter csv;
    csv.row(link_echo_header());
    csv.row(link_echo_row(link));
    return {csv.text()};
}

Position position_from_json(const json& node, const std::string& ctx) {
    const json* p = find(node, "position_m");
    if (!p || !p->is_array() || p->size() != 2 || !(*p)[0].is_number() || !(*p)[1].is_number())
        fail(ctx + ".position_m: required [x, y] pair of numbers");
    return Position{(*p)[0].get<double>(), (*p)[1].get<double>()};
}

Deployment deployment_from_json(const json& cfg) {
    const json* d = find(cfg, "deployment");
    if (!d) fail("deployment: required for the deploy command");

    Deployment dep;
    if (const auto v = opt_num_field(*d, "deployment", "path_loss_exponent_forward"))
        dep.gamma_forward = *v;
    if (const auto v = opt_num_field(*d, "deployment", "path_loss_exponent_reverse"))
        dep.gamma_reverse = *v;
    if (const json* carrier = find(*d, "carrier"))
        dep.carrier = carrier_from_json(*carrier, "deployment.carrier");

    const json* exciters = find(*d, "exciters");
    if (!exciters || !exciters->is_array()) fail("deployment.exciters: required array");
    for (std::size_t i = 0; i < exciters->size(); ++i) {
        const std::string ctx = "deployment.exciters[" + std::to_string(i) + "]";
        const json& node = (*exciters)[i];
        PlacedExciter e{position_from_json(node, ctx), exciter_from_json(node, ctx),
                        opt_num_field(node, ctx, "extra_path_loss_db").value_or(0.0)};
        dep.exciters.push_back(e);
    }
    const json* readers = find(*d, "readers");
    if (!readers || !readers->is_array()) fail("deployment.readers: required array");
    for (std::size_t i = 0; i < readers->size(); ++i) {
        const std::string ctx = "deployment.readers[" + std::to_string(i) + "]";
        const json& node = (*readers)[i];
        PlacedReader r;
        r.position = position_from_json(node, ctx);
        try {
            r.profile = ReaderProfile{GainDbi(num_field(node, ctx, "antenna_gain_dbi")),
                                      PowerDbm(num_field(node, ctx, "sensitivity_dbm"))};
        } catch (const std::invalid_argument& e) {
            fail(ctx + ": " + e.what());
        }
        r.extra_path_loss_db = opt_num_field(node, ctx, "extra_path_loss_db").value_or(0.0);
        dep.readers.push_back(r);
    }
    const json* tags = find(*d, "tags");
    if (!tags || !tags->is_array()) fail("deployment.tags: required array");
    for (std::size_t i = 0; i < tags->size(); ++i) {
        const std::string ctx = "deployment.tags[" + std::to_string(i) + "]";
        const json& node = (*tags)[i];
        PlacedTag t{position_from_json(node, ctx), tag_from_json(node, ctx),
                    opt_num_field(node, ctx, "extra_path_loss_db").value_or(0.0)};
        dep.tags.push_back(t);
    }

    try {
        dep.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("deployment: ") + e.what());
    }
    return dep;
}

json deployment_to_json(const Deployment& dep) {
    json d{{"path_loss_exponent_forward", dep.gamma_forward},
           {"path_loss_exponent_reverse", dep.gamma_reverse},
           {"carrier", carrier_to_json(dep.carrier)}};
    json exciters = json::array();
    for (const auto& e : dep.exciters) {
        json node = exciter_to_json(e.profile);
        node["position_m"] = {e.position.x_m, e.position.y_m};
        node["extra_path_loss_db"] = e.extra_path_loss_db;
        exciters.push_back(std::move(node));
    }
    d["exciters"] = std::move(exciters);
    json readers = json::array();
    for (const auto& r : dep.readers) {
        json node{{"antenna_gain_dbi", r.profile.antenna_gain.dbi()},
                  {"sensitivity_dbm", r.profile.sensitivity.dbm()}};
        node["position_m"] = {r.position.x_m, r.position.y_m};
        node["extra_path_loss_db"] = r.extra_path_loss_db;
        readers.push_back(std::move(node));
    }
    d["readers"] = std::move(readers);
    json tags = json::array();
    for (const auto& t : dep.tags) {
        json node = tag_to_json(t.profile);
        node["position_m"] = {t.position.x_m, t.position.y_m};
        node["extra_path_loss_db"] = t.extra_path_loss_db;
        tags.push_back(std::move(node));
    }
    d["tags"] = std::move(tags);
    return d;
}

Document cmd_deploy(const CommandLine&, const json& cfg, OutputFormat format, int digits) {
    const Deployment dep = deployment_from_json(cfg);

    if (const json* sweep = find(cfg, "sweep")) {
        const SweepParameter parameter = [&] {
            try {
                return sweep_parameter_from_string(str_field(*sweep, "sweep", "parameter"));
            } catch (const std::invalid_argument& e) {
                fail(std::string("sweep.parameter: ") + e.what());
            }
        }();
        const json* values = find(*sweep, "values");
        if (!values || !values->is_array() || values->empty())
            fail("sweep.values: required non-empty array of numbers");
        std::vector<double> v;
        for (const auto& x : *values) {
            if (!x.is_number()) fail("sweep.values: must contain numbers only");
            v.push_back(x.get<double>());
        }
        const auto points = [&] {
            try {
                return coverage_sweep(dep, parameter, v);
            } catch (const std::invalid_argument& e) {
                fail(std::string("sweep: ") + e.what());
            }
        }();

        if (format == OutputFormat::csv) {
            CsvWriter csv;
            csv.row({"value", "coverage_fraction"});
            for (const auto& [value, fraction] : points)
                csv.row({render(value, digits), render(fraction, digits)});
            return {csv.text()};
        }
        json resolved{{"deployment", deployment_to_json(dep)},
                      {"sweep", {{"parameter", to_string(parameter)}, {"values", v}}}};
        json doc = result_header("deploy", resolved, {});
        json sweep_out = json::array();
        for (const auto& [value, fraction] : points)
            sweep_out.push_back({{"value", round_sig(value, digits)},
                                 {"coverage_fraction", round_sig(fraction, digits)}});
        doc["results"] = {{"parameter", to_string(parameter)}, {"sweep", std::move(sweep_out)}};
        return {dump(doc)};
    }

    const CoverageReport report = evaluate_deployment(dep);

    if (format == OutputFormat::csv) {
        CsvWriter csv;
        csv.row({"tag_index", "x_m", "y_m", "best_exciter", "best_reader", "powered",
                 "powerup_margin_db", "detected", "detection_margin_db", "feasible",
                 "distance_clamped", "coverage_fraction"});
        for (const auto& t : report.per_tag) {
            const auto& pos = dep.tags[t.tag_index].position;
            csv.row({std::to_string(t.tag_index), render(pos.x_m, digits),
                     render(pos.y_m, digits), std::to_string(t.best_exciter),
                     std::to_string(t.best_reader), csv_bool(t.result.powered),
                     csv_opt(t.result.powerup_margin_db, digits), csv_bool(t.result.detected),
                     render(t.result.detection_margin_db, digits), csv_bool(t.result.feasible),
                     csv_bool(t.distance_clamped), render(report.coverage_fraction, digits)});
        }
        return {csv.text()};
    }

    json doc = result_header("deploy", json{{"deployment", deployment_to_json(dep)}}, {});
    json per_tag = json::array();
    for (const auto& t : report.per_tag) {
        per_tag.push_back(
            {{"tag_index", t.tag_index},
             {"best_exciter", t.best_exciter},
             {"best_reader", t.best_reader},
             {"powered", t.result.powered},
             {"powerup_margin_db", t.result.powerup_margin_db
                                       ? json(round_sig(*t.result.powerup_margin_db, digits))
                                       : json(nullptr)},
             {"detected", t.result.detected},
             {"detection_margin_db", round_sig(t.result.detection_margin_db, digits)},
             {"feasible", t.result.feasible},
             {"distance_clamped", t.distance_clamped}});
    }
    doc["results"] = {{"coverage_fraction", round_sig(report.coverage_fraction, digits)},
                      {"per_tag", std::move(per_tag)},
                      {"warnings", report.warnings}};
    return {dump(doc)};
}

json targets_to_json(const DesignTargets& t) {
    return {{"version", t.version},
            {"max_power_type_a_w", t.max_power_type_a_w},
            {"max_power_type_c_w", t.max_power_type_c_w},
            {"data_rate_max_floor_bps", t.data_rate_max_floor_bps},
            {"data_rate_min_floor_bps", t.data_rate_min_floor_bps},
            {"positioning_indoor",
             {{"accuracy_m", t.positioning_indoor.accuracy_m},
              {"availability", t.positioning_indoor.availability}}},
            {"positioning_outdoor",
             {{"accuracy_m", t.positioning_outdoor.accuracy_m},
              {"availability", t.positioning_outdoor.availability}}},
            {"harvester_output_min_w", t.harvester_output_min_w},
            {"harvester_output_max_w", t.harvester_output_max_w},
            {"outdoor_accuracy_note", t.outdoor_accuracy_note},
            {"device_c_complexity_note", t.device_c_complexity_note}};
}

DesignTargets targets_from_json_obj(const json& obj) {
    DesignTargets t;
    t.version = str_field(obj, "targets", "version");
    t.max_power_type_a_w = num_field(obj, "targets", "max_power_type_a_w");
    t.max_power_type_c_w = num_field(obj, "targets", "max_power_type_c_w");
    t.data_rate_max_floor_bps = num_field(obj, "targets", "data_rate_max_floor_bps");
    t.data_rate_min_floor_bps = num_field(obj, "targets", "data_rate_min_floor_bps");
    const json* in = find(obj, "positioning_indoor");
    const json* out = find(obj, "positioning_outdoor");
    if (!in || !out) fail("targets: positioning blocks required");
    t.positioning_indoor = {num_field(*in, "targets.positioning_indoor", "accuracy_m"),
                            num_field(*in, "targets.positioning_indoor", "availability")};
    t.positioning_outdoor = {num_field(*out, "targets.positioning_outdoor", "accuracy_m"),
                             num_field(*out, "targets.positioning_outdoor", "availability")};
    t.harvester_output_min_w = num_field(obj, "targets", "harvester_output_min_w");
    t.harvester_output_max_w = num_field(obj, "targets", "harvester_output_max_w");
    t.outdoor_accuracy_note = str_field(obj, "targets", "outdoor_accuracy_note");
    t.device_c_complexity_note = str_field(obj, "targets", "device_c_complexity_note");
    return t;
}

Document cmd_validate(const CommandLine& cl, const json& cfg, OutputFormat format, int digits) {
    if (cl.print_targets) {
        const json table = targets_to_json(targets_table());
        if (format == OutputFormat::json) {
            json doc{{"command", "validate"}, {"targets", table}};
            return {dump(doc)};
        }
        CsvWriter csv;
        csv.row({"key", "value"});
        for (const auto& [key, value] : table.items())
            csv.row({key, value.is_string() ? value.get<std::string>() : value.dump()});
        return {csv.text()};
    }

    // Tag under validation: inline profile, or the preset tag for --device.
    TagProfile tag = [&]() -> TagProfile {
        const json* profiles = find(cfg, "profiles");
        const json* tag_cfg = profiles ? find(*profiles, "tag") : nullptr;
        if (tag_cfg) {
            if (cl.overrides.device) fail("config: --device conflicts with the inline tag profile");
            return tag_from_json(*tag_cfg, "profiles.tag");
        }
        if (!cl.overrides.device)
            fail("validate: --device (or profiles.tag in the config) is required");
        return preset_tag(*cl.overrides.device);
    }();

    const json* vcfg = find(cfg, "validate");
    std::optional<double> power_w = cl.overrides.power_w;
    if (!power_w && vcfg) power_w = opt_num_field(*vcfg, "validate", "observed_power_w");
    if (power_w) {
        try {
            tag.set_peak_power_consumption_w(*power_w);
        } catch (const std::invalid_argument& e) {
            fail(std::string("validate.observed_power_w: ") + e.what());
        }
    }

    std::optional<double> rate = cl.overrides.data_rate_bps;
    if (!rate && vcfg) rate = opt_num_field(*vcfg, "validate", "claimed_data_rate_bps");

    // Without a claimed rate only the power rules apply; a mid-range rate
    // inside the supported span contributes no violations.
    std::vector<Violation> violations =
        validate_device(tag, rate.value_or(targets_table().data_rate_min_floor_bps));

    if (vcfg) {
        if (const json* ordering = find(*vcfg, "power_ordering")) {
            const double pa = num_field(*ordering, "validate.power_ordering", "device_a_w");
            const double pb = num_field(*ordering, "validate.power_ordering", "device_b_w");
            const double pc = num_field(*ordering, "validate.power_ordering", "device_c_w");
            const auto extra = validate_power_ordering(pa, pb, pc);
            violations.insert(violations.end(), extra.begin(), extra.end());
        }
    }

    json resolved{{"profiles", {{"tag", tag_to_json(tag)}}}};
    if (rate) resolved["validate"] = {{"claimed_data_rate_bps", *rate}};

    const int exit_code = violations.empty() ? kExitOk : kExitViolations;

    if (format == OutputFormat::json) {
        json doc = result_header("validate", resolved, {});
        json vlist = json::array();
        for (const auto& v : violations)
            vlist.push_back({{"rule_id", v.rule_id},
                             {"observed", round_sig(v.observed, digits)},
                             {"limit", round_sig(v.limit, digits)},
                             {"message", v.message}});
        doc["results"] = {{"valid", violations.empty()}, {"violations", std::move(vlist)}};
        return {dump(doc), exit_code};
    }

    CsvWriter csv;
    csv.row({"rule_id", "observed", "limit", "message"});
    for (const auto& v : violations)
        csv.row({v.rule_id, render(v.observed, digits), render(v.limit, digits), v.message});
    return {csv.text(), exit_code};
}

json load_config(const CommandLine& cl) {
    std::string text;
    if (cl.config_text) {
        text = *cl.config_text;
    } else if (cl.config_path) {
        std::ifstream file(*cl.config_path, std::ios::binary);
        if (!file) fail("config: cannot open '" + *cl.config_path + "'");
        std::ostringstream buffer;
        buffer << file.rdbuf();
        text = buffer.str();
    } else {
        return json::object();
    }
    try {
        json cfg = json::parse(text);
        if (!cfg.is_object()) fail("config: top level must be a JSON object");
        return cfg;
    } catch (const json::parse_error& e) {
        fail(std::string("config: ") + e.what());
    }
}

}  // namespace

OutputFormat output_format_from_string(std::string_view name) {
    if (name == "json") return OutputFormat::json;
    if (name == "csv") return OutputFormat::csv;
    throw config_error("unknown output format '" + std::string(name) +
                       "' (expected json or csv)");
}

std::string targets_to_json_text(const DesignTargets& targets) {
    return dump(targets_to_json(targets));
}

DesignTargets targets_from_json_text(const std::string& text) {
    try {
        return targets_from_json_obj(json::parse(text));
    } catch (const json::parse_error& e) {
        fail(std::string("targets: ") + e.what());
    }
}

int run_command(const CommandLine& cl, std::ostream& out, std::ostream& err) {
    try {
        const json cfg = load_config(cl);

        OutputFormat format = OutputFormat::json;
        if (const auto s = opt_str_field(cfg, "config", "format"))
            format = output_format_from_string(*s);
        if (cl.format) format = *cl.format;

        std::optional<std::string> out_path = cl.out_path;
        if (!out_path)
            if (const auto s = opt_str_field(cfg, "config", "out")) out_path = s;

        int digits = 6;
        if (const auto v = opt_num_field(cfg, "config", "precision"))
            digits = static_cast<int>(*v);
        if (cl.precision) digits = *cl.precision;
        if (digits < 1 || digits > 17) fail("precision: must be in 1..17");

        Document doc;
        if (cl.command == "budget") doc = cmd_budget(cl, cfg, format, digits);
        else if (cl.command == "range") doc = cmd_range(cl, cfg, format, digits);
        else if (cl.command == "region") doc = cmd_region(cl, cfg, format, digits);
        else if (cl.command == "scenario") doc = cmd_scenario(cl, cfg, format, digits);
        else if (cl.command == "deploy") doc = cmd_deploy(cl, cfg, format, digits);
        else if (cl.command == "validate") doc = cmd_validate(cl, cfg, format, digits);
        else fail("unknown command '" + cl.command + "'");

        if (out_path) {
            std::ofstream file(*out_path, std::ios::binary);
            if (!file) fail("out: cannot open '" + *out_path + "' for writing");
            file << doc.text;
            if (!file.good()) fail("out: write to '" + *out_path + "' failed");
        } else {
            out << doc.text;
        }
        return doc.exit_code;
    } catch (const grid_cap_error& e) {
        err << "aiotlink: " << e.what() << "\n";
        return kExitResourceCap;
    } catch (const config_error& e) {
        err << "aiotlink: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        err << "aiotlink: config: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "aiotlink: " << e.what() << "\n";
        return kExitConfigError;
    }
}

}  // namespace aiot::io
