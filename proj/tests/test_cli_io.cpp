#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <aiot/io.hpp>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace aiot;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run(io::CommandLine cl) {
    std::ostringstream out, err;
    const int code = io::run_command(cl, out, err);
    return {code, out.str(), err.str()};
}

io::CommandLine make(const std::string& command) {
    io::CommandLine cl;
    cl.command = command;
    return cl;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("aiot_test_" + std::to_string(::getpid()) + "_" + name);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("budget with a preset emits a feasible record and a config echo") {
    auto cl = make("budget");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::B;
    cl.overrides.d1_m = 2.0;
    cl.overrides.d2_m = 100.0;

    const auto r = run(cl);
    REQUIRE(r.code == io::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["command"] == "budget");
    CHECK(doc["results"]["feasible"] == true);
    CHECK(doc["results"]["powered"] == true);
    CHECK(doc["results"]["powerup_margin_db"].is_null());
    CHECK(doc["results"]["reverse_path"] == "backscatter");
    CHECK(doc["resolved_config"]["profiles"]["tag"]["device_type"] == "B");
    CHECK(doc["resolved_config"]["profiles"]["reader"]["sensitivity_dbm"] == -112.0);
    CHECK(doc["resolved_config"]["link"]["d1_m"] == 2.0);
    REQUIRE(doc.contains("notes"));
}

TEST_CASE("an infeasible link is a result, not an error") {
    auto cl = make("budget");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::B;
    cl.overrides.d1_m = 2.0;
    cl.overrides.d2_m = 100000.0;  // far beyond the ~314 m limit
    const auto r = run(cl);
    CHECK(r.code == io::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["results"]["feasible"] == false);
    CHECK(doc["results"]["detection_margin_db"].get<double>() < 0.0);
}

TEST_CASE("monostatic links take one distance and reject mismatches") {
    auto cl = make("budget");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::B;
    cl.overrides.monostatic = true;
    cl.overrides.d1_m = 3.0;
    const auto r = run(cl);
    REQUIRE(r.code == io::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["resolved_config"]["link"]["d2_m"] == 3.0);
    CHECK(doc["resolved_config"]["profiles"]["configuration"] == "monostatic");

    cl.overrides.d2_m = 4.0;
    const auto bad = run(cl);
    CHECK(bad.code == io::kExitConfigError);
    CHECK(bad.err.find("monostatic") != std::string::npos);
}

TEST_CASE("device C budgets report the active uplink") {
    auto cl = make("budget");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::C;
    cl.overrides.d1_m = 2.0;
    cl.overrides.d2_m = 20.0;
    const auto r = run(cl);
    REQUIRE(r.code == io::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["results"]["reverse_path"] == "active-uplink");
    CHECK(doc["results"]["powered"] == true);
    CHECK(doc["results"]["powerup_margin_db"].is_null());
    bool noted = false;
    for (const auto& note : doc["notes"])
        if (note.get<std::string>().find("active uplink") != std::string::npos) noted = true;
    CHECK(noted);
}

TEST_CASE("echoed resolved config reproduces the run") {
    auto cl = make("budget");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::A;
    cl.overrides.d1_m = 2.0;
    cl.overrides.d2_m = 100.0;
    const auto first = run(cl);
    REQUIRE(first.code == io::kExitOk);
    const json doc = json::parse(first.out);

    io::CommandLine again = make("budget");
    again.config_text = doc["resolved_config"].dump();
    const auto second = run(again);
    REQUIRE(second.code == io::kExitOk);
    const json doc2 = json::parse(second.out);
    CHECK(doc2["results"] == doc["results"]);
    CHECK(doc2["resolved_config"] == doc["resolved_config"]);
}

TEST_CASE("invalid distances fail with a field-level message and exit 2") {
    auto cl = make("budget");
    cl.config_text = R"({"preset": "outdoor-ue-to-macro", "link": {"d1_m": -1, "d2_m": 10}})";
    const auto r = run(cl);
    CHECK(r.code == io::kExitConfigError);
    CHECK(r.out.empty());
    CHECK(r.err.find("d1_m") != std::string::npos);
}

TEST_CASE("preset and inline profiles are mutually exclusive") {
    auto cl = make("budget");
    cl.overrides.d1_m = 1.0;
    cl.overrides.d2_m = 1.0;
    cl.config_text = R"({
      "preset": "outdoor-ue-to-macro",
      "profiles": {
        "exciter": {"tx_power_dbm": 23, "antenna_gain_dbi": 0},
        "tag": {"device_type": "B", "antenna_gain_dbi": 2, "modulation_factor": 1},
        "reader": {"antenna_gain_dbi": 8, "sensitivity_dbm": -112}
      }
    })";
    const auto r = run(cl);
    CHECK(r.code == io::kExitConfigError);
    CHECK(r.err.find("exactly one") != std::string::npos);

    auto none = make("budget");
    none.overrides.d1_m = 1.0;
    CHECK(run(none).code == io::kExitConfigError);
}

TEST_CASE("budget CSV is one header row plus one data row") {
    auto cl = make("budget");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::B;
    cl.overrides.d1_m = 2.0;
    cl.overrides.d2_m = 100.0;
    cl.format = io::OutputFormat::csv;
    const auto r = run(cl);
    REQUIRE(r.code == io::kExitOk);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].find("detection_margin_db") != std::string::npos);
}

TEST_CASE("CSV and JSON runs carry numerically identical results") {
    auto cl = make("budget");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::A;
    cl.overrides.d1_m = 2.0;
    cl.overrides.d2_m = 100.0;

    const auto j = run(cl);
    cl.format = io::OutputFormat::csv;
    const auto c = run(cl);
    REQUIRE(j.code == 0);
    REQUIRE(c.code == 0);

    const json doc = json::parse(j.out);
    const auto rows = lines(c.out);
    REQUIRE(rows.size() == 2);

    // locate columns by header name and compare the shared numeric fields
    std::vector<std::string> header, data;
    {
        std::istringstream h(rows[0]), d(rows[1]);
        std::string cell;
        while (std::getline(h, cell, ',')) header.push_back(cell);
        while (std::getline(d, cell, ',')) data.push_back(cell);
    }
    REQUIRE(header.size() == data.size());
    auto cell_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return data[i];
        FAIL("missing column " << name);
        return std::string();
    };
    for (const char* key :
         {"forward_power_dbm", "reverse_power_dbm", "detection_margin_db", "powerup_margin_db"}) {
        const double from_csv = std::stod(cell_of(key));
        const double from_json = doc["results"][key].get<double>();
        CHECK(from_csv == from_json);  // same rounded value in both formats
    }
}

TEST_CASE("range command reproduces the closed-form limits") {
    auto cl = make("range");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::B;
    cl.overrides.d1_m = 2.0;
    const auto r = run(cl);
    REQUIRE(r.code == io::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["results"]["powerup_unbounded"] == true);
    CHECK(doc["results"]["max_powerup_distance_m"].is_null());
    const double d2 = doc["results"]["max_reader_distance_m"].get<double>();
    CHECK(std::abs(d2 - 313.902) <= 0.01);

    cl.overrides.device = DeviceType::A;
    const json doc_a = json::parse(run(cl).out);
    CHECK(doc_a["results"]["powerup_unbounded"] == false);
    CHECK(std::abs(doc_a["results"]["max_powerup_distance_m"].get<double>() - 2.60363) <= 1e-4);
}

TEST_CASE("region CSV has n1*n2 data rows and the pinned columns") {
    auto cl = make("region");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::A;
    cl.overrides.n1 = std::size_t{10};
    cl.overrides.n2 = std::size_t{10};
    cl.format = io::OutputFormat::csv;
    const auto r = run(cl);
    REQUIRE(r.code == io::kExitOk);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 101);
    CHECK(rows[0] == "d1_m,d2_m,feasible,powerup_margin_db,detection_margin_db");

    // no feasible cell beyond the power-up limit
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::istringstream in(rows[i]);
        std::string d1, d2, feasible;
        std::getline(in, d1, ',');
        std::getline(in, d2, ',');
        std::getline(in, feasible, ',');
        if (feasible == "1") CHECK(std::stod(d1) <= 2.604);
    }

    // byte-identical re-run
    const auto again = run(cl);
    CHECK(again.out == r.out);
}

TEST_CASE("region CSV and JSON runs agree cell by cell") {
    auto cl = make("region");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::A;
    cl.overrides.n1 = std::size_t{5};
    cl.overrides.n2 = std::size_t{6};
    const json doc = json::parse(run(cl).out);

    cl.format = io::OutputFormat::csv;
    const auto rows = lines(run(cl).out);
    REQUIRE(rows.size() == 1 + 5 * 6);

    std::size_t row = 1;
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 6; ++j, ++row) {
            std::istringstream in(rows[row]);
            std::string d1, d2, feasible, pm, dm;
            std::getline(in, d1, ',');
            std::getline(in, d2, ',');
            std::getline(in, feasible, ',');
            std::getline(in, pm, ',');
            std::getline(in, dm, ',');
            CHECK(std::stod(d1) == doc["results"]["d1_m"][i].get<double>());
            CHECK(std::stod(d2) == doc["results"]["d2_m"][j].get<double>());
            CHECK((feasible == "1") == (doc["results"]["feasible"][i][j].get<int>() == 1));
            CHECK(std::stod(pm) == doc["results"]["powerup_margin_db"][i][j].get<double>());
            CHECK(std::stod(dm) == doc["results"]["detection_margin_db"][i][j].get<double>());
        }
    }
}

TEST_CASE("region honors the cell cap with exit 3") {
    auto cl = make("region");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.n1 = std::size_t{100};
    cl.overrides.n2 = std::size_t{100};
    cl.overrides.cell_cap = std::size_t{500};
    const auto r = run(cl);
    CHECK(r.code == io::kExitResourceCap);
    CHECK(r.out.empty());
    CHECK(r.err.find("cap") != std::string::npos);

    // absurd cell counts in the config are a config error, not UB
    auto silly = make("region");
    silly.config_text =
        R"({"preset": "outdoor-ue-to-macro", "grid": {"n1": 1e12, "n2": 10}})";
    const auto bad = run(silly);
    CHECK(bad.code == io::kExitConfigError);
    CHECK(bad.err.find("n1") != std::string::npos);
}

TEST_CASE("region JSON carries the grid echo and matrices") {
    auto cl = make("region");
    cl.overrides.preset = "indoor-ue-to-smallcell";
    cl.overrides.device = DeviceType::B;
    cl.overrides.n1 = std::size_t{4};
    cl.overrides.n2 = std::size_t{5};
    const auto r = run(cl);
    REQUIRE(r.code == io::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["resolved_config"]["grid"]["n1"] == 4);
    CHECK(doc["results"]["feasible"].size() == 4);
    CHECK(doc["results"]["feasible"][0].size() == 5);
    CHECK(doc["results"]["powerup_margin_db"][0][0].is_null());  // device B
    CHECK(doc["results"]["config_fingerprint"].is_string());
    CHECK(doc["resolved_config"]["profiles"]["path_loss_exponent_forward"] == 2.5);
}

TEST_CASE("scenario --list names the three presets") {
    auto cl = make("scenario");
    cl.list_presets = true;
    const auto r = run(cl);
    REQUIRE(r.code == io::kExitOk);
    const json doc = json::parse(r.out);
    REQUIRE(doc["presets"].size() == 3);
    CHECK(doc["presets"][0] == "outdoor-ue-to-macro");
    CHECK(doc["presets"][1] == "indoor-ue-to-smallcell");
    CHECK(doc["presets"][2] == "indoor-ue-to-ue");

    auto unknown = make("scenario");
    unknown.overrides.preset = "nope";
    const auto bad = run(unknown);
    CHECK(bad.code == io::kExitConfigError);
    CHECK(bad.err.find("outdoor-ue-to-macro") != std::string::npos);
}

TEST_CASE("deploy evaluates coverage and sweeps from a config") {
    const char* config = R"({
      "deployment": {
        "path_loss_exponent_forward": 3.0,
        "path_loss_exponent_reverse": 3.0,
        "carrier": {"frequency_hz": 9e8},
        "exciters": [{"position_m": [0, 0], "tx_power_dbm": 23, "antenna_gain_dbi": 0}],
        "readers": [{"position_m": [0, 0], "antenna_gain_dbi": 8, "sensitivity_dbm": -112}],
        "tags": [
          {"position_m": [2, 0], "device_type": "A", "antenna_gain_dbi": 2,
           "modulation_factor": 0.25, "powerup_threshold_dbm": -19},
          {"position_m": [50, 0], "device_type": "A", "antenna_gain_dbi": 2,
           "modulation_factor": 0.25, "powerup_threshold_dbm": -19}
        ]
      }
    })";

    auto cl = make("deploy");
    cl.config_text = config;
    const auto r = run(cl);
    REQUIRE(r.code == io::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["results"]["coverage_fraction"] == 0.5);  // far tag cannot power up
    REQUIRE(doc["results"]["per_tag"].size() == 2);
    CHECK(doc["results"]["per_tag"][0]["feasible"] == true);
    CHECK(doc["results"]["per_tag"][1]["powered"] == false);

    // the echoed deployment block reruns identically
    io::CommandLine again = make("deploy");
    again.config_text = doc["resolved_config"].dump();
    const json doc2 = json::parse(run(again).out);
    CHECK(doc2["results"] == doc["results"]);

    // sweep over transmit power
    json sweep_cfg = json::parse(config);
    sweep_cfg["sweep"] = {{"parameter", "exciter_tx_power_dbm"}, {"values", {-20.0, 23.0, 40.0}}};
    io::CommandLine sw = make("deploy");
    sw.config_text = sweep_cfg.dump();
    const auto swr = run(sw);
    REQUIRE(swr.code == io::kExitOk);
    const json swdoc = json::parse(swr.out);
    REQUIRE(swdoc["results"]["sweep"].size() == 3);
    double prev = -1.0;
    for (const auto& point : swdoc["results"]["sweep"]) {
        const double f = point["coverage_fraction"].get<double>();
        CHECK(f >= prev);
        prev = f;
    }
}

TEST_CASE("validate maps violations to exit 4") {
    auto cl = make("validate");
    cl.overrides.device = DeviceType::C;
    cl.overrides.power_w = 10e-3;
    const auto r = run(cl);
    CHECK(r.code == io::kExitViolations);
    const json doc = json::parse(r.out);
    CHECK(doc["results"]["valid"] == false);
    CHECK(doc["results"]["violations"][0]["rule_id"] == "power.device-c");

    auto ok = make("validate");
    ok.overrides.device = DeviceType::A;
    ok.overrides.power_w = 1e-6;
    ok.overrides.data_rate_bps = 5000.0;
    const auto r2 = run(ok);
    CHECK(r2.code == io::kExitOk);
    CHECK(json::parse(r2.out)["results"]["valid"] == true);

    auto rate = make("validate");
    rate.overrides.device = DeviceType::A;
    rate.overrides.data_rate_bps = 50.0;
    CHECK(run(rate).code == io::kExitViolations);
}

TEST_CASE("validate checks the power-ordering chain from the config") {
    auto cl = make("validate");
    cl.config_text = R"({
      "profiles": {"tag": {"device_type": "B", "antenna_gain_dbi": 2, "modulation_factor": 1}},
      "validate": {
        "claimed_data_rate_bps": 1000,
        "power_ordering": {"device_a_w": 1e-6, "device_b_w": 2e-3, "device_c_w": 1e-3}
      }
    })";
    const auto r = run(cl);
    CHECK(r.code == io::kExitViolations);
    const json doc = json::parse(r.out);
    bool found = false;
    for (const auto& v : doc["results"]["violations"])
        if (v["rule_id"] == "power.ordering.bc") found = true;
    CHECK(found);
}

TEST_CASE("targets table round-trips through JSON unchanged") {
    const auto& table = targets_table();
    const std::string text = io::targets_to_json_text(table);
    CHECK(io::targets_from_json_text(text) == table);

    auto cl = make("validate");
    cl.print_targets = true;
    const auto r = run(cl);
    REQUIRE(r.code == io::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["targets"]["max_power_type_a_w"] == 1e-6);
    CHECK(doc["targets"]["positioning_indoor"]["accuracy_m"] == 3.0);
}

TEST_CASE("precision flag controls result digits") {
    auto cl = make("range");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::B;
    cl.overrides.d1_m = 2.0;
    cl.precision = 3;
    const json coarse = json::parse(run(cl).out);
    CHECK(coarse["results"]["max_reader_distance_m"] == 314.0);

    cl.precision = 12;
    const json fine = json::parse(run(cl).out);
    CHECK(std::abs(fine["results"]["max_reader_distance_m"].get<double>() - 313.902260814) <=
          1e-6);
}

TEST_CASE("output file is only written on success") {
    const fs::path good = temp_file("budget.json");
    const fs::path bad = temp_file("failed.json");
    fs::remove(good);
    fs::remove(bad);

    auto cl = make("budget");
    cl.overrides.preset = "outdoor-ue-to-macro";
    cl.overrides.device = DeviceType::B;
    cl.overrides.d1_m = 2.0;
    cl.overrides.d2_m = 100.0;
    cl.out_path = good.string();
    const auto r = run(cl);
    REQUIRE(r.code == io::kExitOk);
    CHECK(r.out.empty());  // went to the file
    CHECK(fs::exists(good));
    CHECK(json::parse(slurp(good))["results"]["feasible"] == true);

    auto failing = make("budget");
    failing.config_text = R"({"preset": "outdoor-ue-to-macro", "link": {"d1_m": 0, "d2_m": 1}})";
    failing.out_path = bad.string();
    CHECK(run(failing).code == io::kExitConfigError);
    CHECK_FALSE(fs::exists(bad));

    fs::remove(good);
}

#ifdef AIOT_CLI_PATH
TEST_CASE("the real binary wires flags, exit codes and files together") {
    const std::string cli = AIOT_CLI_PATH;
    REQUIRE(fs::exists(cli));
    const fs::path out1 = temp_file("proc_region1.csv");
    const fs::path out2 = temp_file("proc_region2.csv");

    auto sh = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };

    CHECK(sh("--help") == 0);
    CHECK(sh("--version") == 0);
    CHECK(sh("budget --preset outdoor-ue-to-macro --device B --d1 2 --d2 100") == 0);
    CHECK(sh("budget --preset outdoor-ue-to-macro --device B --d1 2") == 2);  // missing d2
    CHECK(sh("budget --no-such-flag") == 2);
    CHECK(sh("validate --device C --power-w 0.01") == 4);
    CHECK(sh("region --preset outdoor-ue-to-macro --n1 100 --n2 100 --cell-cap 10") == 3);

    // repeated runs produce byte-identical files
    const std::string args = "region --preset outdoor-ue-to-macro --device A --n1 40 --n2 40 "
                             "--format csv --out ";
    REQUIRE(sh(args + out1.string()) == 0);
    REQUIRE(sh(args + out2.string()) == 0);
    const std::string a = slurp(out1), b = slurp(out2);
    CHECK(a == b);
    CHECK_FALSE(a.empty());

    fs::remove(out1);
    fs::remove(out2);
}
#endif
