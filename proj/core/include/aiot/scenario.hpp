// Preset link scenarios for UE-illuminated deployments.
#pragma once

#include "aiot/link_model.hpp"

#include <string>
#include <vector>

namespace aiot {

enum class Environment { outdoor, indoor };

const char* to_string(Environment environment);
Environment environment_from_string(std::string_view name);

/// One fully specified link configuration: who excites, who reads, which
/// device class, and the propagation assumptions.
struct Scenario {
    std::string name;
    DeploymentTopology topology = DeploymentTopology::ue_direct;
    ExciterProfile exciter;
    ReaderProfile reader;
    TagProfile tag = TagProfile::semi_passive(GainDbi(2.0), 1.0);
    double gamma_forward = 3.0;
    double gamma_reverse = 3.0;
    Carrier carrier = Carrier::from_frequency_hz(900e6);
    NoiseSpec noise;
    Environment environment = Environment::outdoor;
};

// Versioned preset parameter table. Figure-level scenario parameters are
// engineering assumptions, pinned here so tests and output echoes can
// reference a single source.
namespace preset_defaults {

inline constexpr char kTableVersion[] = "1";

inline constexpr double kUeTxPowerDbm = 23.0;
inline constexpr double kUeTxGainDbi = 0.0;
inline constexpr double kMacroReaderGainDbi = 8.0;
inline constexpr double kSmallCellReaderGainDbi = 5.0;
inline constexpr double kUeReaderGainDbi = 0.0;
inline constexpr double kTagGainDbi = 2.0;
inline constexpr double kModulationFactorA = 0.25;
inline constexpr double kModulationFactorB = 1.0;
inline constexpr double kPowerupThresholdDbm = -19.0;
inline constexpr double kDeviceCTxPowerDbm = -20.0;  // conservative assumption
inline constexpr double kReaderSensitivityDbm = -112.0;
inline constexpr double kCarrierFrequencyHz = 900e6;
inline constexpr double kGammaOutdoor = 3.0;
inline constexpr double kGammaIndoor = 2.5;
inline constexpr double kNoiseFigureDb = 6.0;
inline constexpr double kFadeMarginDb = 10.0;
inline constexpr double kBandwidthHz = 15000.0;
inline constexpr double kSnrMinDb = 4.3;

}  // namespace preset_defaults

/// Names accepted by preset_scenario, in listing order.
const std::vector<std::string>& preset_scenario_names();

/// Builds one of the three UE-illumination presets:
///   outdoor-ue-to-macro     UE excites, macro BS reads, outdoor exponents
///   indoor-ue-to-smallcell  UE excites, small-cell AP reads, indoor exponents
///   indoor-ue-to-ue         UE excites, a second UE reads, indoor exponents
/// The device class selects the tag variant (A, B or C defaults).
/// Unknown names raise an error that lists the valid presets.
Scenario preset_scenario(const std::string& name, DeviceType device = DeviceType::A);

/// Default tag profile for a device class, from the preset table.
TagProfile preset_tag(DeviceType device);

}  // namespace aiot
