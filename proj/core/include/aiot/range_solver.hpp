// Closed-form range limits and (d1, d2) operating-region grids.
#pragma once

#include "aiot/link_model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aiot {

enum class GridSpacing { linear, logarithmic };

const char* to_string(GridSpacing spacing);
GridSpacing grid_spacing_from_string(std::string_view name);

/// Rectangular (d1, d2) grid. Cells are evaluated at cell centers, not
/// corners; boundary extraction relies on this convention. The d2 axis
/// defaults to logarithmic spacing because reverse ranges commonly span
/// three decades.
struct GridSpec {
    double d1_min_m = 0.5;
    double d1_max_m = 10.0;
    double d2_min_m = 1.0;
    double d2_max_m = 1000.0;
    std::size_t n1 = 50;
    std::size_t n2 = 60;
    GridSpacing d1_spacing = GridSpacing::linear;
    GridSpacing d2_spacing = GridSpacing::logarithmic;

    void validate() const;
    std::size_t cell_count() const { return n1 * n2; }
    std::vector<double> d1_centers() const;
    std::vector<double> d2_centers() const;
};

struct RegionOptions {
    std::size_t cell_cap = 4'000'000;
};

/// Thrown when a grid exceeds the configured cell cap.
class grid_cap_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Feasibility booleans and dB margins over a (d1, d2) grid, row-major
/// with d1 as the outer index. Power-up margins hold NaN for device
/// types without a power-up constraint (B, C).
struct OperatingRegion {
    GridSpec grid;
    std::vector<double> d1_m;  // cell centers
    std::vector<double> d2_m;
    std::vector<std::uint8_t> feasible;
    std::vector<double> powerup_margin_db;
    std::vector<double> detection_margin_db;
    std::string config_fingerprint;  // digest of all input profiles

    std::size_t index(std::size_t i1, std::size_t i2) const { return i1 * grid.n2 + i2; }
    bool cell_feasible(std::size_t i1, std::size_t i2) const {
        return feasible[index(i1, i2)] != 0;
    }
};

struct BoundaryPoint {
    double d1_m;
    double d2_m;  // largest feasible d2 in this d1 column
};

/// Largest d1 at which a passive tag still powers up:
/// d1* = (P_T G_T G_tag (lambda/4pi)^2 / P_thr)^(1/gamma).
/// Devices B and C have no power-up constraint and return an empty
/// optional (unbounded).
std::optional<double> max_powerup_distance_m(const ExciterProfile& exciter, const TagProfile& tag,
                                             double gamma, const Carrier& carrier);

struct ReaderRange {
    bool powered = false;  // false: device A not energized at this d1 (d2_m is 0)
    double d2_m = 0.0;
};

/// Largest d2 at which the reader still detects the tag, at a fixed d1:
/// d2* = (A B^2 G_R M / S)^(1/gamma_r) for backscatter devices, and the
/// one-way uplink inversion for device C.
ReaderRange max_reader_distance_m(const ExciterProfile& exciter, const TagProfile& tag,
                                  const ReaderProfile& reader, double d1_m, double gamma_forward,
                                  double gamma_reverse, const Carrier& carrier);

/// Evaluates link_feasible at every cell center. Deterministic: identical
/// inputs produce bitwise-identical grids.
OperatingRegion compute_region(const ExciterProfile& exciter, const TagProfile& tag,
                               const ReaderProfile& reader, double gamma_forward,
                               double gamma_reverse, const Carrier& carrier, const GridSpec& grid,
                               const RegionOptions& options = {});

/// Per d1 column with any feasible cell, the largest feasible d2 center;
/// ordered by ascending d1. Empty region yields an empty list.
std::vector<BoundaryPoint> boundary(const OperatingRegion& region);

/// Bundled closed-form limits for one link configuration.
class RangeLimits {
  public:
    RangeLimits(ExciterProfile exciter, TagProfile tag, ReaderProfile reader,
                double gamma_forward, double gamma_reverse, Carrier carrier);

    std::optional<double> max_powerup_d1_m() const { return max_powerup_d1_m_; }
    ReaderRange max_d2_at(double d1_m) const;

  private:
    ExciterProfile exciter_;
    TagProfile tag_;
    ReaderProfile reader_;
    double gamma_forward_;
    double gamma_reverse_;
    Carrier carrier_;
    std::optional<double> max_powerup_d1_m_;
};

}  // namespace aiot
