// Multi-node 2-D deployment coverage: which tags can be excited by some
// exciter and read by some reader.
#pragma once

#include "aiot/link_model.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace aiot {

struct Position {
    double x_m = 0.0;
    double y_m = 0.0;
};

double distance_m(const Position& a, const Position& b);

// Geometry is planar; antenna heights and similar fixed offsets fold into
// extra_path_loss_db per node (applied to every link touching the node).
struct PlacedExciter {
    Position position;
    ExciterProfile profile;
    double extra_path_loss_db = 0.0;
};

struct PlacedReader {
    Position position;
    ReaderProfile profile;
    double extra_path_loss_db = 0.0;
};

struct PlacedTag {
    Position position;
    TagProfile profile;
    double extra_path_loss_db = 0.0;
};

struct Deployment {
    std::vector<PlacedExciter> exciters;
    std::vector<PlacedReader> readers;
    std::vector<PlacedTag> tags;
    double gamma_forward = 3.0;
    double gamma_reverse = 3.0;
    Carrier carrier = Carrier::from_frequency_hz(900e6);

    void validate() const;
};

/// Links shorter than this are evaluated at this distance instead; the
/// far-field model breaks down below it. Every clamp is reported.
inline constexpr double kMinLinkDistanceM = 0.1;

struct TagCoverage {
    std::size_t tag_index = 0;
    std::size_t best_exciter = 0;
    std::size_t best_reader = 0;
    FeasibilityResult result;
    bool distance_clamped = false;
};

struct CoverageReport {
    std::vector<TagCoverage> per_tag;
    double coverage_fraction = 0.0;  // feasible tags / all tags
    std::vector<std::string> warnings;
};

/// Evaluates link_feasible for every (exciter, reader) pair of each tag
/// and keeps the pair maximizing the smaller of the two margins (the
/// binding constraint). Ties resolve to the lowest (exciter, reader)
/// index pair, so results are deterministic.
CoverageReport evaluate_deployment(const Deployment& deployment);

enum class SweepParameter {
    exciter_tx_power_dbm,
    reader_sensitivity_dbm,
    tag_modulation_factor,
    carrier_frequency_hz,
};

const char* to_string(SweepParameter parameter);
SweepParameter sweep_parameter_from_string(std::string_view name);

/// Re-evaluates coverage with the parameter overridden (on every matching
/// node) for each value in turn. Returns (value, coverage_fraction) pairs.
std::vector<std::pair<double, double>> coverage_sweep(const Deployment& deployment,
                                                      SweepParameter parameter,
                                                      std::span<const double> values);

}  // namespace aiot
