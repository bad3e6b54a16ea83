// Two-hop backscatter link budget: forward (exciter -> tag) power,
// reverse (tag -> reader) power, power-up check, and overall feasibility
// for the three device classes.
//
// Received tag power:    P_rx_tag = A * B
// Backscattered power:   P_rx_r   = A * B^2 * G_R * M / d2^gamma
// with A = P_T * G_T / d1^gamma (distance-attenuated EIRP, mW) and
// B = G_tag * (lambda / 4pi)^2 (tag aperture factor, dimensionless).
// Distances are in meters against an implicit 1 m reference, the reading
// under which the gamma = 2 case reduces to the Friis free-space product.
#pragma once

#include "aiot/rf_core.hpp"

#include <optional>
#include <string_view>

namespace aiot {

/// 3GPP ambient-IoT device classes.
/// A: passive backscatter, no storage, needs RF power-up.
/// B: semi-passive backscatter with storage, possibly reflection gain.
/// C: active transmitter with storage.
enum class DeviceType { A, B, C };

const char* to_string(DeviceType type);
DeviceType device_type_from_string(std::string_view name);

class TagProfile {
  public:
    /// Device A: requires a power-up threshold; modulation factor in (0, 1].
    static TagProfile passive(GainDbi antenna_gain, double modulation_factor,
                              PowerDbm powerup_threshold);
    /// Device B: modulation factor > 0, may exceed 1 (reflection gain).
    static TagProfile semi_passive(GainDbi antenna_gain, double modulation_factor);
    /// Device C: active transmitter; no backscatter modulation factor.
    static TagProfile active(GainDbi antenna_gain, PowerDbm tx_power);

    DeviceType device_type() const { return type_; }
    GainDbi antenna_gain() const { return antenna_gain_; }
    double modulation_factor() const { return modulation_factor_; }
    std::optional<PowerDbm> powerup_threshold() const { return powerup_threshold_; }
    std::optional<PowerDbm> tx_power() const { return tx_power_; }

    std::optional<double> peak_power_consumption_w() const { return peak_power_consumption_w_; }
    void set_peak_power_consumption_w(double watts);

  private:
    TagProfile() = default;

    DeviceType type_ = DeviceType::A;
    GainDbi antenna_gain_;
    double modulation_factor_ = 1.0;
    std::optional<PowerDbm> powerup_threshold_;
    std::optional<PowerDbm> tx_power_;
    std::optional<double> peak_power_consumption_w_;
};

struct ExciterProfile {
    PowerDbm tx_power;
    GainDbi antenna_gain;
};

struct ReaderProfile {
    GainDbi antenna_gain;
    PowerDbm sensitivity;
};

enum class LinkConfiguration { monostatic, bistatic };

const char* to_string(LinkConfiguration config);

/// Two-hop geometry. A monostatic link shares one node as exciter and
/// reader, so d1 = d2 and equal exponents hold by construction.
class LinkGeometry {
  public:
    static LinkGeometry monostatic(double d_m, double gamma, Carrier carrier);
    static LinkGeometry bistatic(double d1_m, double d2_m, double gamma_forward,
                                 double gamma_reverse, Carrier carrier);

    double d1_m() const { return d1_m_; }
    double d2_m() const { return d2_m_; }
    double gamma_forward() const { return gamma_forward_; }
    double gamma_reverse() const { return gamma_reverse_; }
    const Carrier& carrier() const { return carrier_; }
    LinkConfiguration configuration() const { return configuration_; }

  private:
    LinkGeometry(double d1, double d2, double gf, double gr, Carrier carrier,
                 LinkConfiguration config);

    double d1_m_;
    double d2_m_;
    double gamma_forward_;
    double gamma_reverse_;
    Carrier carrier_;
    LinkConfiguration configuration_;
};

/// Deployment topologies agreed for ambient-IoT study. Metadata only.
enum class DeploymentTopology {
    bs_direct = 1,        // BS <-> device
    bs_intermediate = 2,  // BS <-> intermediate node <-> device
    bs_assisted = 3,      // BS and assisting UE on opposite hops
    ue_direct = 4,        // UE <-> device
};

const char* to_string(DeploymentTopology topology);
DeploymentTopology topology_from_int(int value);

struct FeasibilityResult {
    bool powered = false;
    std::optional<double> powerup_margin_db;  // device A only
    bool detected = false;
    double detection_margin_db = 0.0;
    bool feasible = false;  // powered && detected
};

/// A = P_T * G_T / d1^gamma in mW (EIRP attenuated by the forward hop).
double attenuated_eirp_mw(const ExciterProfile& exciter, double d1_m, double gamma);

/// B = G_tag * (lambda / 4pi)^2, dimensionless.
double tag_aperture_factor(const TagProfile& tag, const Carrier& carrier);

/// Power received at the tag, P_rx_tag = A * B.
PowerDbm forward_link_power(const ExciterProfile& exciter, const TagProfile& tag,
                            const LinkGeometry& geometry);

/// Backscattered power at the reader, P_rx_r = A * B^2 * G_R * M / d2^gamma.
/// Device C is an active transmitter and is rejected here.
PowerDbm backscatter_link_power(const ExciterProfile& exciter, const TagProfile& tag,
                                const ReaderProfile& reader, const LinkGeometry& geometry);

/// One-way uplink for device C: P_rx = P_dev * G_tag * G_R * (lambda/4pi)^2 / d2^gamma.
/// Same path-loss form as the backscatter hops; there is no power-up leg.
PowerDbm active_uplink_power(const TagProfile& tag, const ReaderProfile& reader, double d2_m,
                             double gamma, const Carrier& carrier);

/// Evaluates both link conditions: power-up at the tag (device A only) and
/// detection at the reader. Margins are reported even when infeasible; a
/// zero margin counts as met.
FeasibilityResult link_feasible(const ExciterProfile& exciter, const TagProfile& tag,
                                const ReaderProfile& reader, const LinkGeometry& geometry);

}  // namespace aiot
