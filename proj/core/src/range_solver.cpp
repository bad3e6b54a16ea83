#include "aiot/range_solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace aiot {

namespace {

// FNV-1a 64-bit over a canonical text rendering of the inputs. Stable
// across runs and platforms, which is all the fingerprint promises.
std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void append_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g|", v);
    out += buf;
}

std::string fingerprint(const ExciterProfile& e, const TagProfile& t, const ReaderProfile& r,
                        double gf, double gr, const Carrier& c, const GridSpec& grid) {
    std::string s = "region-v1|";
    append_num(s, e.tx_power.dbm());
    append_num(s, e.antenna_gain.dbi());
    s += to_string(t.device_type());
    s += '|';
    append_num(s, t.antenna_gain().dbi());
    append_num(s, t.modulation_factor());
    append_num(s, t.powerup_threshold() ? t.powerup_threshold()->dbm() : 0.0);
    append_num(s, t.tx_power() ? t.tx_power()->dbm() : 0.0);
    append_num(s, r.antenna_gain.dbi());
    append_num(s, r.sensitivity.dbm());
    append_num(s, gf);
    append_num(s, gr);
    append_num(s, c.frequency_hz());
    append_num(s, grid.d1_min_m);
    append_num(s, grid.d1_max_m);
    append_num(s, grid.d2_min_m);
    append_num(s, grid.d2_max_m);
    append_num(s, static_cast<double>(grid.n1));
    append_num(s, static_cast<double>(grid.n2));
    s += to_string(grid.d1_spacing);
    s += '|';
    s += to_string(grid.d2_spacing);

    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(s)));
    return hex;
}

std::vector<double> centers(double lo, double hi, std::size_t n, GridSpacing spacing) {
    std::vector<double> v(n);
    if (spacing == GridSpacing::linear) {
        const double step = (hi - lo) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = lo + (static_cast<double>(i) + 0.5) * step;
    } else {
        const double la = std::log(lo);
        const double step = (std::log(hi) - la) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = std::exp(la + (static_cast<double>(i) + 0.5) * step);
    }
    return v;
}

}  // namespace

const char* to_string(GridSpacing spacing) {
    return spacing == GridSpacing::linear ? "linear" : "logarithmic";
}

GridSpacing grid_spacing_from_string(std::string_view name) {
    if (name == "linear") return GridSpacing::linear;
    if (name == "logarithmic" || name == "log") return GridSpacing::logarithmic;
    throw std::invalid_argument("unknown grid spacing '" + std::string(name) +
                                "' (expected linear or logarithmic)");
}

void GridSpec::validate() const {
    auto check_axis = [](double lo, double hi, std::size_t n, const char* axis) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo <= 0.0 || lo >= hi)
            throw std::invalid_argument(std::string(axis) + " range must satisfy 0 < min < max");
        if (n < 2)
            throw std::invalid_argument(std::string(axis) + " cell count must be >= 2");
    };
    check_axis(d1_min_m, d1_max_m, n1, "d1");
    check_axis(d2_min_m, d2_max_m, n2, "d2");
}

std::vector<double> GridSpec::d1_centers() const {
    return centers(d1_min_m, d1_max_m, n1, d1_spacing);
}

std::vector<double> GridSpec::d2_centers() const {
    return centers(d2_min_m, d2_max_m, n2, d2_spacing);
}

std::optional<double> max_powerup_distance_m(const ExciterProfile& exciter, const TagProfile& tag,
                                             double gamma, const Carrier& carrier) {
    if (tag.device_type() != DeviceType::A) return std::nullopt;  // no power-up constraint
    const double numerator_mw =
        attenuated_eirp_mw(exciter, 1.0, gamma) * tag_aperture_factor(tag, carrier);
    return std::pow(numerator_mw / tag.powerup_threshold()->milliwatts(), 1.0 / gamma);
}

ReaderRange max_reader_distance_m(const ExciterProfile& exciter, const TagProfile& tag,
                                  const ReaderProfile& reader, double d1_m, double gamma_forward,
                                  double gamma_reverse, const Carrier& carrier) {
    const double sensitivity_mw = reader.sensitivity.milliwatts();

    if (tag.device_type() == DeviceType::C) {
        const double r = carrier.wavelength_m() / (4.0 * M_PI);
        const double k = ((tag.tx_power()->milliwatts() * tag.antenna_gain().linear()) *
                          reader.antenna_gain.linear()) *
                         (r * r);
        return {true, std::pow(k / sensitivity_mw, 1.0 / gamma_reverse)};
    }

    if (tag.device_type() == DeviceType::A) {
        const auto limit = max_powerup_distance_m(exciter, tag, gamma_forward, carrier);
        if (d1_m > *limit) return {false, 0.0};  // tag never energizes at this d1
    }

    const double a = attenuated_eirp_mw(exciter, d1_m, gamma_forward);
    const double b = tag_aperture_factor(tag, carrier);
    const double k = (((a * b) * b) * reader.antenna_gain.linear()) * tag.modulation_factor();
    return {true, std::pow(k / sensitivity_mw, 1.0 / gamma_reverse)};
}

OperatingRegion compute_region(const ExciterProfile& exciter, const TagProfile& tag,
                               const ReaderProfile& reader, double gamma_forward,
                               double gamma_reverse, const Carrier& carrier, const GridSpec& grid,
                               const RegionOptions& options) {
    grid.validate();
    if (grid.cell_count() > options.cell_cap) {
        throw grid_cap_error("grid of " + std::to_string(grid.cell_count()) +
                             " cells exceeds the cap of " + std::to_string(options.cell_cap));
    }

    OperatingRegion region;
    region.grid = grid;
    region.d1_m = grid.d1_centers();
    region.d2_m = grid.d2_centers();
    region.config_fingerprint =
        fingerprint(exciter, tag, reader, gamma_forward, gamma_reverse, carrier, grid);

    const std::size_t n1 = grid.n1, n2 = grid.n2;
    region.feasible.assign(n1 * n2, 0);
    region.powerup_margin_db.assign(n1 * n2, std::numeric_limits<double>::quiet_NaN());
    region.detection_margin_db.assign(n1 * n2, 0.0);

    const double sensitivity_dbm = reader.sensitivity.dbm();
    const double b = tag_aperture_factor(tag, carrier);
    const bool needs_powerup = tag.device_type() == DeviceType::A;
    const bool active = tag.device_type() == DeviceType::C;

    // Reverse-hop denominators are shared across columns.
    std::vector<double> d2_pow(n2);
    for (std::size_t j = 0; j < n2; ++j) d2_pow[j] = std::pow(region.d2_m[j], gamma_reverse);

    // Device C detection depends on d2 only.
    std::vector<double> uplink_margin_db;
    if (active) {
        uplink_margin_db.resize(n2);
        for (std::size_t j = 0; j < n2; ++j) {
            uplink_margin_db[j] =
                active_uplink_power(tag, reader, region.d2_m[j], gamma_reverse, carrier).dbm() -
                sensitivity_dbm;
        }
    }

    for (std::size_t i = 0; i < n1; ++i) {
        const double a = attenuated_eirp_mw(exciter, region.d1_m[i], gamma_forward);

        double powerup_margin = std::numeric_limits<double>::quiet_NaN();
        bool powered = true;
        if (needs_powerup) {
            powerup_margin = mw_to_dbm(a * b) - tag.powerup_threshold()->dbm();
            powered = powerup_margin >= 0.0;
        }

        const double k = (((a * b) * b) * reader.antenna_gain.linear()) * tag.modulation_factor();

        for (std::size_t j = 0; j < n2; ++j) {
            const std::size_t cell = i * n2 + j;
            const double detection_margin =
                active ? uplink_margin_db[j] : mw_to_dbm(k / d2_pow[j]) - sensitivity_dbm;
            region.powerup_margin_db[cell] = powerup_margin;
            region.detection_margin_db[cell] = detection_margin;
            region.feasible[cell] = (powered && detection_margin >= 0.0) ? 1 : 0;
        }
    }
    return region;
}

std::vector<BoundaryPoint> boundary(const OperatingRegion& region) {
    std::vector<BoundaryPoint> edge;
    const std::size_t n1 = region.grid.n1, n2 = region.grid.n2;
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = n2; j-- > 0;) {
            if (region.cell_feasible(i, j)) {
                edge.push_back({region.d1_m[i], region.d2_m[j]});
                break;
            }
        }
    }
    return edge;
}

RangeLimits::RangeLimits(ExciterProfile exciter, TagProfile tag, ReaderProfile reader,
                         double gamma_forward, double gamma_reverse, Carrier carrier)
    : exciter_(exciter), tag_(std::move(tag)), reader_(reader), gamma_forward_(gamma_forward),
      gamma_reverse_(gamma_reverse), carrier_(carrier),
      max_powerup_d1_m_(max_powerup_distance_m(exciter_, tag_, gamma_forward_, carrier_)) {}

ReaderRange RangeLimits::max_d2_at(double d1_m) const {
    return max_reader_distance_m(exciter_, tag_, reader_, d1_m, gamma_forward_, gamma_reverse_,
                                 carrier_);
}

}  // namespace aiot
