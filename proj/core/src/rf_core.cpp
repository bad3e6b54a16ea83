#include "aiot/rf_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aiot {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

double db_to_linear(double db) {
    require_finite(db, "dB value");
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double ratio) {
    require_finite(ratio, "linear ratio");
    if (ratio <= 0.0) throw std::invalid_argument("linear ratio must be > 0");
    return 10.0 * std::log10(ratio);
}

double dbm_to_mw(double dbm) {
    require_finite(dbm, "dBm value");
    return std::pow(10.0, dbm / 10.0);
}

double mw_to_dbm(double mw) {
    require_finite(mw, "milliwatt value");
    if (mw <= 0.0) throw std::invalid_argument("milliwatt value must be > 0");
    return 10.0 * std::log10(mw);
}

PowerDbm::PowerDbm(double dbm) : dbm_(dbm) { require_finite(dbm, "power in dBm"); }

PowerDbm PowerDbm::from_milliwatts(double mw) { return PowerDbm(mw_to_dbm(mw)); }

double PowerDbm::milliwatts() const { return dbm_to_mw(dbm_); }

GainDbi::GainDbi(double dbi) : dbi_(dbi) { require_finite(dbi, "gain in dBi"); }

double GainDbi::linear() const { return db_to_linear(dbi_); }

void NoiseSpec::validate() const {
    require_finite(noise_figure_db, "noise_figure_db");
    require_finite(fade_margin_db, "fade_margin_db");
    require_finite(bandwidth_hz, "bandwidth_hz");
    require_finite(snr_min_db, "snr_min_db");
    if (bandwidth_hz <= 0.0) throw std::invalid_argument("bandwidth_hz must be > 0");
    if (noise_figure_db < 0.0) throw std::invalid_argument("noise_figure_db must be >= 0");
    if (fade_margin_db < 0.0) throw std::invalid_argument("fade_margin_db must be >= 0");
}

void ModulationSpec::validate() const {
    require_finite(bit_rate_bps, "bit_rate_bps");
    require_finite(target_ber, "target_ber");
    if (bit_rate_bps <= 0.0) throw std::invalid_argument("bit_rate_bps must be > 0");
    if (!(target_ber > 0.0 && target_ber < 0.5))
        throw std::invalid_argument("target_ber must be in (0, 0.5)");
}

Carrier Carrier::from_frequency_hz(double frequency_hz) {
    require_finite(frequency_hz, "frequency_hz");
    if (frequency_hz <= 0.0) throw std::invalid_argument("frequency_hz must be > 0");
    return Carrier(frequency_hz, kSpeedOfLightMps / frequency_hz);
}

Carrier Carrier::from_wavelength_m(double wavelength_m) {
    require_finite(wavelength_m, "wavelength_m");
    if (wavelength_m <= 0.0) throw std::invalid_argument("wavelength_m must be > 0");
    return Carrier(kSpeedOfLightMps / wavelength_m, wavelength_m);
}

double q_function(double x) {
    require_finite(x, "q_function argument");
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double q_inverse(double p) {
    if (!std::isfinite(p) || p <= 0.0 || p >= 1.0)
        throw std::invalid_argument("q_inverse requires p in (0, 1)");
    if (p == 0.5) return 0.0;
    if (p > 0.5) return -q_inverse(1.0 - p);

    // Bracket the root; Q underflows to 0 near x ~ 39, so growth terminates.
    double lo = 0.0, hi = 1.0;
    while (q_function(hi) > p) {
        lo = hi;
        hi *= 2.0;
    }

    // Coarse bisection, then Newton with the bracket as a safety net.
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        (q_function(mid) > p ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 100; ++i) {
        const double f = q_function(x) - p;
        if (f == 0.0) break;
        (f > 0.0 ? lo : hi) = x;
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        double next = pdf > 0.0 ? x + f / pdf : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const bool converged = std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(next));
        x = next;
        if (converged) break;
    }
    return x;
}

std::optional<double> snr_min_for_ber(const ModulationSpec& mod) {
    mod.validate();
    const double arg = q_inverse(mod.target_ber);
    const double snr_linear = 0.5 * arg * arg;
    if (snr_linear <= 0.0) return std::nullopt;  // BER -> 0.5 limit: any SNR suffices
    return linear_to_db(snr_linear);
}

PowerDbm reader_sensitivity(const NoiseSpec& noise) {
    noise.validate();
    return PowerDbm(kThermalNoiseDbmPerHz + noise.noise_figure_db + noise.fade_margin_db +
                    10.0 * std::log10(noise.bandwidth_hz) + noise.snr_min_db);
}

}  // namespace aiot
