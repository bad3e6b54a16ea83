#include "aiot/scenario.hpp"

#include <stdexcept>

namespace aiot {

const char* to_string(Environment environment) {
    return environment == Environment::outdoor ? "outdoor" : "indoor";
}

Environment environment_from_string(std::string_view name) {
    if (name == "outdoor") return Environment::outdoor;
    if (name == "indoor") return Environment::indoor;
    throw std::invalid_argument("unknown environment '" + std::string(name) +
                                "' (expected outdoor or indoor)");
}

const std::vector<std::string>& preset_scenario_names() {
    static const std::vector<std::string> names = {
        "outdoor-ue-to-macro",
        "indoor-ue-to-smallcell",
        "indoor-ue-to-ue",
    };
    return names;
}

TagProfile preset_tag(DeviceType device) {
    using namespace preset_defaults;
    switch (device) {
        case DeviceType::A:
            return TagProfile::passive(GainDbi(kTagGainDbi), kModulationFactorA,
                                       PowerDbm(kPowerupThresholdDbm));
        case DeviceType::B:
            return TagProfile::semi_passive(GainDbi(kTagGainDbi), kModulationFactorB);
        case DeviceType::C:
            return TagProfile::active(GainDbi(kTagGainDbi), PowerDbm(kDeviceCTxPowerDbm));
    }
    throw std::invalid_argument("unknown device type");
}

Scenario preset_scenario(const std::string& name, DeviceType device) {
    using namespace preset_defaults;

    Scenario s;
    s.name = name;
    s.exciter = ExciterProfile{PowerDbm(kUeTxPowerDbm), GainDbi(kUeTxGainDbi)};
    s.tag = preset_tag(device);
    s.carrier = Carrier::from_frequency_hz(kCarrierFrequencyHz);
    s.noise = NoiseSpec{kNoiseFigureDb, kFadeMarginDb, kBandwidthHz, kSnrMinDb};

    if (name == "outdoor-ue-to-macro") {
        s.topology = DeploymentTopology::bs_assisted;
        s.environment = Environment::outdoor;
        s.reader = ReaderProfile{GainDbi(kMacroReaderGainDbi), PowerDbm(kReaderSensitivityDbm)};
    } else if (name == "indoor-ue-to-smallcell") {
        s.topology = DeploymentTopology::bs_assisted;
        s.environment = Environment::indoor;
        s.reader =
            ReaderProfile{GainDbi(kSmallCellReaderGainDbi), PowerDbm(kReaderSensitivityDbm)};
    } else if (name == "indoor-ue-to-ue") {
        s.topology = DeploymentTopology::ue_direct;
        s.environment = Environment::indoor;
        s.reader = ReaderProfile{GainDbi(kUeReaderGainDbi), PowerDbm(kReaderSensitivityDbm)};
    } else {
        std::string valid;
        for (const auto& n : preset_scenario_names()) {
            if (!valid.empty()) valid += ", ";
            valid += n;
        }
        throw std::invalid_argument("unknown preset '" + name + "' (valid presets: " + valid +
                                    ")");
    }

    const double gamma =
        s.environment == Environment::outdoor ? kGammaOutdoor : kGammaIndoor;
    s.gamma_forward = gamma;
    s.gamma_reverse = gamma;
    return s;
}

}  // namespace aiot
