#include "aiot/link_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aiot {

namespace {

void require_positive_finite(double v, const char* what) {
    if (!std::isfinite(v) || v <= 0.0)
        throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}

void require_exponent(double gamma, const char* what) {
    if (!std::isfinite(gamma) || gamma < 1.0)
        throw std::invalid_argument(std::string(what) + " must be finite and >= 1");
}

}  // namespace

const char* to_string(DeviceType type) {
    switch (type) {
        case DeviceType::A: return "A";
        case DeviceType::B: return "B";
        case DeviceType::C: return "C";
    }
    throw std::invalid_argument("unknown device type");
}

DeviceType device_type_from_string(std::string_view name) {
    if (name == "A" || name == "a") return DeviceType::A;
    if (name == "B" || name == "b") return DeviceType::B;
    if (name == "C" || name == "c") return DeviceType::C;
    throw std::invalid_argument("unknown device type '" + std::string(name) +
                                "' (expected A, B or C)");
}

const char* to_string(LinkConfiguration config) {
    return config == LinkConfiguration::monostatic ? "monostatic" : "bistatic";
}

const char* to_string(DeploymentTopology topology) {
    switch (topology) {
        case DeploymentTopology::bs_direct: return "bs-direct";
        case DeploymentTopology::bs_intermediate: return "bs-intermediate";
        case DeploymentTopology::bs_assisted: return "bs-assisted";
        case DeploymentTopology::ue_direct: return "ue-direct";
    }
    throw std::invalid_argument("unknown deployment topology");
}

DeploymentTopology topology_from_int(int value) {
    if (value < 1 || value > 4)
        throw std::invalid_argument("deployment topology must be 1..4");
    return static_cast<DeploymentTopology>(value);
}

TagProfile TagProfile::passive(GainDbi antenna_gain, double modulation_factor,
                               PowerDbm powerup_threshold) {
    if (!std::isfinite(modulation_factor) || modulation_factor <= 0.0 || modulation_factor > 1.0)
        throw std::invalid_argument("device A modulation_factor must be in (0, 1]");
    TagProfile t;
    t.type_ = DeviceType::A;
    t.antenna_gain_ = antenna_gain;
    t.modulation_factor_ = modulation_factor;
    t.powerup_threshold_ = powerup_threshold;
    return t;
}

TagProfile TagProfile::semi_passive(GainDbi antenna_gain, double modulation_factor) {
    // reflection gain permits M > 1 for device B
    require_positive_finite(modulation_factor, "device B modulation_factor");
    TagProfile t;
    t.type_ = DeviceType::B;
    t.antenna_gain_ = antenna_gain;
    t.modulation_factor_ = modulation_factor;
    return t;
}

TagProfile TagProfile::active(GainDbi antenna_gain, PowerDbm tx_power) {
    TagProfile t;
    t.type_ = DeviceType::C;
    t.antenna_gain_ = antenna_gain;
    t.modulation_factor_ = 1.0;  // unused for active devices
    t.tx_power_ = tx_power;
    return t;
}

void TagProfile::set_peak_power_consumption_w(double watts) {
    require_positive_finite(watts, "peak_power_consumption_w");
    peak_power_consumption_w_ = watts;
}

LinkGeometry::LinkGeometry(double d1, double d2, double gf, double gr, Carrier carrier,
                           LinkConfiguration config)
    : d1_m_(d1), d2_m_(d2), gamma_forward_(gf), gamma_reverse_(gr), carrier_(carrier),
      configuration_(config) {
    require_positive_finite(d1_m_, "d1_m");
    require_positive_finite(d2_m_, "d2_m");
    require_exponent(gamma_forward_, "gamma_forward");
    require_exponent(gamma_reverse_, "gamma_reverse");
}

LinkGeometry LinkGeometry::monostatic(double d_m, double gamma, Carrier carrier) {
    return LinkGeometry(d_m, d_m, gamma, gamma, carrier, LinkConfiguration::monostatic);
}

LinkGeometry LinkGeometry::bistatic(double d1_m, double d2_m, double gamma_forward,
                                    double gamma_reverse, Carrier carrier) {
    return LinkGeometry(d1_m, d2_m, gamma_forward, gamma_reverse, carrier,
                        LinkConfiguration::bistatic);
}

double attenuated_eirp_mw(const ExciterProfile& exciter, double d1_m, double gamma) {
    require_positive_finite(d1_m, "d1_m");
    require_exponent(gamma, "gamma");
    return exciter.tx_power.milliwatts() * exciter.antenna_gain.linear() / std::pow(d1_m, gamma);
}

double tag_aperture_factor(const TagProfile& tag, const Carrier& carrier) {
    const double r = carrier.wavelength_m() / (4.0 * M_PI);
    return tag.antenna_gain().linear() * (r * r);
}

PowerDbm forward_link_power(const ExciterProfile& exciter, const TagProfile& tag,
                            const LinkGeometry& geometry) {
    const double a = attenuated_eirp_mw(exciter, geometry.d1_m(), geometry.gamma_forward());
    return PowerDbm::from_milliwatts(a * tag_aperture_factor(tag, geometry.carrier()));
}

PowerDbm backscatter_link_power(const ExciterProfile& exciter, const TagProfile& tag,
                                const ReaderProfile& reader, const LinkGeometry& geometry) {
    if (tag.device_type() == DeviceType::C)
        throw std::invalid_argument(
            "device C is an active transmitter; use active_uplink_power");
    const double a = attenuated_eirp_mw(exciter, geometry.d1_m(), geometry.gamma_forward());
    const double b = tag_aperture_factor(tag, geometry.carrier());
    const double mw = (((a * b) * b) * reader.antenna_gain.linear()) * tag.modulation_factor() /
                      std::pow(geometry.d2_m(), geometry.gamma_reverse());
    return PowerDbm::from_milliwatts(mw);
}

PowerDbm active_uplink_power(const TagProfile& tag, const ReaderProfile& reader, double d2_m,
                             double gamma, const Carrier& carrier) {
    if (tag.device_type() != DeviceType::C)
        throw std::invalid_argument("active_uplink_power requires a device C tag");
    require_positive_finite(d2_m, "d2_m");
    require_exponent(gamma, "gamma");
    const double r = carrier.wavelength_m() / (4.0 * M_PI);
    const double mw = ((tag.tx_power()->milliwatts() * tag.antenna_gain().linear()) *
                       reader.antenna_gain.linear()) *
                      (r * r) / std::pow(d2_m, gamma);
    return PowerDbm::from_milliwatts(mw);
}

FeasibilityResult link_feasible(const ExciterProfile& exciter, const TagProfile& tag,
                                const ReaderProfile& reader, const LinkGeometry& geometry) {
    FeasibilityResult result;

    if (tag.device_type() == DeviceType::A) {
        const double rx_tag = forward_link_power(exciter, tag, geometry).dbm();
        result.powerup_margin_db = rx_tag - tag.powerup_threshold()->dbm();
        result.powered = *result.powerup_margin_db >= 0.0;  // threshold-inclusive
    } else {
        result.powered = true;
    }

    const PowerDbm rx_reader =
        tag.device_type() == DeviceType::C
            ? active_uplink_power(tag, reader, geometry.d2_m(), geometry.gamma_reverse(),
                                  geometry.carrier())
            : backscatter_link_power(exciter, tag, reader, geometry);
    result.detection_margin_db = rx_reader.dbm() - reader.sensitivity.dbm();
    result.detected = result.detection_margin_db >= 0.0;

    result.feasible = result.powered && result.detected;
    return result;
}

}  // namespace aiot
