#include "aiot/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace aiot {

namespace {

void require_finite_position(const Position& p, const char* what) {
    if (!std::isfinite(p.x_m) || !std::isfinite(p.y_m))
        throw std::invalid_argument(std::string(what) + " position must be finite");
}

// Tie-break pairs by the smaller of the present margins; device B/C have
// only the detection margin.
double pair_score(const FeasibilityResult& r) {
    if (r.powerup_margin_db) return std::min(*r.powerup_margin_db, r.detection_margin_db);
    return r.detection_margin_db;
}

}  // namespace

double distance_m(const Position& a, const Position& b) {
    return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

void Deployment::validate() const {
    if (exciters.empty()) throw std::invalid_argument("deployment needs at least one exciter");
    if (readers.empty()) throw std::invalid_argument("deployment needs at least one reader");
    if (tags.empty()) throw std::invalid_argument("deployment needs at least one tag");
    for (const auto& e : exciters) require_finite_position(e.position, "exciter");
    for (const auto& r : readers) require_finite_position(r.position, "reader");
    for (const auto& t : tags) require_finite_position(t.position, "tag");
    if (!std::isfinite(gamma_forward) || gamma_forward < 1.0 || !std::isfinite(gamma_reverse) ||
        gamma_reverse < 1.0)
        throw std::invalid_argument("path-loss exponents must be finite and >= 1");
}

CoverageReport evaluate_deployment(const Deployment& deployment) {
    deployment.validate();

    CoverageReport report;
    report.per_tag.reserve(deployment.tags.size());
    std::size_t covered = 0;

    for (std::size_t ti = 0; ti < deployment.tags.size(); ++ti) {
        const PlacedTag& tag = deployment.tags[ti];

        TagCoverage best;
        best.tag_index = ti;
        bool have_best = false;
        double best_score = 0.0;

        for (std::size_t ei = 0; ei < deployment.exciters.size(); ++ei) {
            const PlacedExciter& exciter = deployment.exciters[ei];

            double d1 = distance_m(exciter.position, tag.position);
            bool clamped = false;
            if (d1 < kMinLinkDistanceM) {
                d1 = kMinLinkDistanceM;
                clamped = true;
            }

            // Node offsets on the forward hop attenuate the effective EIRP;
            // offsets on the reverse hop attenuate the effective reader gain.
            // The tag-side offset applies to both traversals.
            const double forward_loss_db = exciter.extra_path_loss_db + tag.extra_path_loss_db;
            const ExciterProfile eff_exciter{
                PowerDbm(exciter.profile.tx_power.dbm() - forward_loss_db),
                exciter.profile.antenna_gain};

            for (std::size_t ri = 0; ri < deployment.readers.size(); ++ri) {
                const PlacedReader& reader = deployment.readers[ri];

                double d2 = distance_m(tag.position, reader.position);
                bool pair_clamped = clamped;
                if (d2 < kMinLinkDistanceM) {
                    d2 = kMinLinkDistanceM;
                    pair_clamped = true;
                }

                const double reverse_loss_db =
                    tag.extra_path_loss_db + reader.extra_path_loss_db;
                const ReaderProfile eff_reader{
                    GainDbi(reader.profile.antenna_gain.dbi() - reverse_loss_db),
                    reader.profile.sensitivity};

                const auto geometry = LinkGeometry::bistatic(
                    d1, d2, deployment.gamma_forward, deployment.gamma_reverse,
                    deployment.carrier);
                const FeasibilityResult result =
                    link_feasible(eff_exciter, tag.profile, eff_reader, geometry);

                const double score = pair_score(result);
                if (!have_best || score > best_score) {  // ties keep the lowest index pair
                    have_best = true;
                    best_score = score;
                    best.best_exciter = ei;
                    best.best_reader = ri;
                    best.result = result;
                    best.distance_clamped = pair_clamped;
                }

                if (pair_clamped) {
                    char buf[128];
                    std::snprintf(buf, sizeof buf,
                                  "tag %zu / exciter %zu / reader %zu: link distance below "
                                  "%.1f m clamped",
                                  ti, ei, ri, kMinLinkDistanceM);
                    report.warnings.emplace_back(buf);
                }
            }
        }

        if (best.result.feasible) ++covered;
        report.per_tag.push_back(best);
    }

    report.coverage_fraction =
        static_cast<double>(covered) / static_cast<double>(deployment.tags.size());
    return report;
}

const char* to_string(SweepParameter parameter) {
    switch (parameter) {
        case SweepParameter::exciter_tx_power_dbm: return "exciter_tx_power_dbm";
        case SweepParameter::reader_sensitivity_dbm: return "reader_sensitivity_dbm";
        case SweepParameter::tag_modulation_factor: return "tag_modulation_factor";
        case SweepParameter::carrier_frequency_hz: return "carrier_frequency_hz";
    }
    throw std::invalid_argument("unknown sweep parameter");
}

SweepParameter sweep_parameter_from_string(std::string_view name) {
    if (name == "exciter_tx_power_dbm") return SweepParameter::exciter_tx_power_dbm;
    if (name == "reader_sensitivity_dbm") return SweepParameter::reader_sensitivity_dbm;
    if (name == "tag_modulation_factor") return SweepParameter::tag_modulation_factor;
    if (name == "carrier_frequency_hz") return SweepParameter::carrier_frequency_hz;
    throw std::invalid_argument(
        "unknown sweep parameter '" + std::string(name) +
        "' (expected exciter_tx_power_dbm, reader_sensitivity_dbm, tag_modulation_factor or "
        "carrier_frequency_hz)");
}

namespace {

TagProfile with_modulation_factor(const TagProfile& tag, double m) {
    switch (tag.device_type()) {
        case DeviceType::A:
            return TagProfile::passive(tag.antenna_gain(), m, *tag.powerup_threshold());
        case DeviceType::B:
            return TagProfile::semi_passive(tag.antenna_gain(), m);
        case DeviceType::C:
            throw std::invalid_argument(
                "tag_modulation_factor sweep does not apply to device C tags");
    }
    throw std::invalid_argument("unknown device type");
}

}  // namespace

std::vector<std::pair<double, double>> coverage_sweep(const Deployment& deployment,
                                                      SweepParameter parameter,
                                                      std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("sweep values must not be empty");
    deployment.validate();

    std::vector<std::pair<double, double>> out;
    out.reserve(values.size());

    for (const double value : values) {
        Deployment d = deployment;
        switch (parameter) {
            case SweepParameter::exciter_tx_power_dbm:
                for (auto& e : d.exciters) e.profile.tx_power = PowerDbm(value);
                break;
            case SweepParameter::reader_sensitivity_dbm:
                for (auto& r : d.readers) r.profile.sensitivity = PowerDbm(value);
                break;
            case SweepParameter::tag_modulation_factor:
                for (auto& t : d.tags) t.profile = with_modulation_factor(t.profile, value);
                break;
            case SweepParameter::carrier_frequency_hz:
                d.carrier = Carrier::from_frequency_hz(value);
                break;
        }
        out.emplace_back(value, evaluate_deployment(d).coverage_fraction);
    }
    return out;
}

}  // namespace aiot
