#include "aiot/targets.hpp"

#include <cmath>
#include <cstdio>

namespace aiot {

namespace {

std::string format_si(double v, const char* unit) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g %s", v, unit);
    return buf;
}

}  // namespace

const DesignTargets& targets_table() {
    static const DesignTargets table;
    return table;
}

std::vector<Violation> validate_device(const TagProfile& tag, double claimed_data_rate_bps) {
    const DesignTargets& t = targets_table();
    std::vector<Violation> violations;

    if (tag.peak_power_consumption_w()) {
        const double p = *tag.peak_power_consumption_w();
        if (tag.device_type() == DeviceType::A && !(p <= t.max_power_type_a_w)) {
            violations.push_back({"power.device-a", p, t.max_power_type_a_w,
                                  "device A transmit/receive power consumption " +
                                      format_si(p, "W") + " exceeds the " +
                                      format_si(t.max_power_type_a_w, "W") + " target"});
        }
        if (tag.device_type() == DeviceType::C && !(p <= t.max_power_type_c_w)) {
            violations.push_back({"power.device-c", p, t.max_power_type_c_w,
                                  "device C power consumption " + format_si(p, "W") +
                                      " exceeds the " + format_si(t.max_power_type_c_w, "W") +
                                      " target"});
        }
    }

    if (!(claimed_data_rate_bps >= t.data_rate_min_floor_bps)) {
        violations.push_back({"data-rate.min", claimed_data_rate_bps, t.data_rate_min_floor_bps,
                              "claimed data rate " + format_si(claimed_data_rate_bps, "bps") +
                                  " is below the " +
                                  format_si(t.data_rate_min_floor_bps, "bps") +
                                  " minimum supported rate"});
    }
    if (!(claimed_data_rate_bps <= t.data_rate_max_floor_bps)) {
        violations.push_back({"data-rate.max", claimed_data_rate_bps, t.data_rate_max_floor_bps,
                              "claimed data rate " + format_si(claimed_data_rate_bps, "bps") +
                                  " is above the " +
                                  format_si(t.data_rate_max_floor_bps, "bps") +
                                  " maximum supported rate"});
    }

    return violations;
}

std::vector<Violation> validate_power_ordering(double power_a_w, double power_b_w,
                                               double power_c_w) {
    std::vector<Violation> violations;
    if (!(power_a_w <= power_b_w)) {
        violations.push_back({"power.ordering.ab", power_b_w, power_a_w,
                              "device B power consumption " + format_si(power_b_w, "W") +
                                  " must be at least device A's " + format_si(power_a_w, "W")});
    }
    if (!(power_b_w < power_c_w)) {
        violations.push_back({"power.ordering.bc", power_b_w, power_c_w,
                              "device B power consumption " + format_si(power_b_w, "W") +
                                  " must stay strictly below device C's " +
                                  format_si(power_c_w, "W")});
    }
    return violations;
}

}  // namespace aiot
