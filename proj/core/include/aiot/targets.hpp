// 3GPP ambient-IoT design targets and configuration validation.
#pragma once

#include "aiot/link_model.hpp"

#include <string>
#include <vector>

namespace aiot {

struct PositioningTarget {
    double accuracy_m = 0.0;
    double availability = 0.0;  // fraction of fixes within accuracy_m

    bool operator==(const PositioningTarget&) const = default;
};

/// Versioned constant table of the 3GPP design targets. Immutable at
/// runtime; exportable as JSON.
struct DesignTargets {
    std::string version = "1";

    double max_power_type_a_w = 1e-6;  // transmit/receive power, device A
    double max_power_type_c_w = 1e-3;  // device power consumption, device C
    double data_rate_max_floor_bps = 5000.0;
    double data_rate_min_floor_bps = 100.0;
    PositioningTarget positioning_indoor{3.0, 0.90};
    // "several tens of meters" encoded as 50 m; an interpretation, see note
    PositioningTarget positioning_outdoor{50.0, 0.90};
    double harvester_output_min_w = 1e-6;
    double harvester_output_max_w = 300e-6;  // "a few hundreds of uW"
    std::string outdoor_accuracy_note =
        "outdoor target 'several tens of meters' encoded as 50 m";
    std::string device_c_complexity_note =
        "device C complexity target (orders of magnitude below NB-IoT) is informational only";

    bool operator==(const DesignTargets&) const = default;
};

const DesignTargets& targets_table();

struct Violation {
    std::string rule_id;
    double observed = 0.0;
    double limit = 0.0;
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// Checks a device profile and its claimed operating data rate against the
/// target table. Returns violations instead of throwing: out-of-range
/// content is a result, not an error. Device B has no absolute power cap
/// of its own; it is constrained only relative to observed A and C values
/// (see validate_power_ordering).
std::vector<Violation> validate_device(const TagProfile& tag, double claimed_data_rate_bps);

/// The power-consumption ordering chain across the device classes:
/// P_A <= P_B < P_C. The first relation uses the weaker of the two listed
/// variants ("much less" vs "less or equal").
std::vector<Violation> validate_power_ordering(double power_a_w, double power_b_w,
                                               double power_c_w);

}  // namespace aiot
