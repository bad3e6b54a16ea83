// Scalar RF math: dB/linear conversions, carrier wavelength, Gaussian
// Q-function, required SNR for a target BER, and receiver reference
// sensitivity. Everything here is a pure function of its arguments.
#pragma once

#include <optional>

namespace aiot {

inline constexpr double kSpeedOfLightMps = 299'792'458.0;

// Thermal noise density at the 290 K reference temperature, dBm/Hz.
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

/// 10^(x/10). Rejects non-finite input.
double db_to_linear(double db);

/// 10*log10(ratio). Rejects ratio <= 0 and non-finite input.
double linear_to_db(double ratio);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// Power level in dBm. Finite by construction.
class PowerDbm {
  public:
    PowerDbm() = default;
    explicit PowerDbm(double dbm);
    static PowerDbm from_milliwatts(double mw);

    double dbm() const { return dbm_; }
    double milliwatts() const;

  private:
    double dbm_ = 0.0;
};

/// Antenna gain in dBi. Finite by construction.
class GainDbi {
  public:
    GainDbi() = default;
    explicit GainDbi(double dbi);

    double dbi() const { return dbi_; }
    double linear() const;

  private:
    double dbi_ = 0.0;
};

/// Receiver noise budget: S = -174 + NF + F + 10*log10(W) + SNR_min.
struct NoiseSpec {
    double noise_figure_db = 0.0;
    double fade_margin_db = 0.0;
    double bandwidth_hz = 1.0;
    double snr_min_db = 0.0;

    void validate() const;
};

struct ModulationSpec {
    double bit_rate_bps = 0.0;
    double target_ber = 0.0;  // uncoded, in (0, 0.5)

    void validate() const;
};

/// Carrier frequency with the derived wavelength (lambda = c / f).
class Carrier {
  public:
    static Carrier from_frequency_hz(double frequency_hz);
    static Carrier from_wavelength_m(double wavelength_m);

    double frequency_hz() const { return frequency_hz_; }
    double wavelength_m() const { return wavelength_m_; }

  private:
    Carrier(double frequency_hz, double wavelength_m)
        : frequency_hz_(frequency_hz), wavelength_m_(wavelength_m) {}

    double frequency_hz_ = 0.0;
    double wavelength_m_ = 0.0;
};

/// Upper-tail probability of the standard normal distribution.
double q_function(double x);

/// Inverse of q_function on (0, 1). Bracketed bisection with Newton
/// refinement on q_function itself, converged to better than 1e-12
/// absolute; no closed-form approximation is involved.
double q_inverse(double p);

/// Minimum SNR (dB) so that coherent binary modulation meets the target
/// BER: BER = Q(sqrt(2*SNR)), hence SNR = Q^-1(BER)^2 / 2. Returns an
/// empty optional when the requirement vanishes (the BER -> 0.5 limit,
/// where any SNR suffices).
std::optional<double> snr_min_for_ber(const ModulationSpec& mod);

/// Reference sensitivity S = -174 + NF + F + 10*log10(W) + SNR_min, dBm.
PowerDbm reader_sensitivity(const NoiseSpec& noise);

}  // namespace aiot
