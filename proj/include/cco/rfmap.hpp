#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cco/configuration.hpp"

namespace cco {

struct InvalidGridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidLayoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Regular 2-D grid of receiver locations. Cell (row, col) is evaluated at
// its center, receiver height kReceiverHeightM above ground.
struct GridSpec {
    double width_m = 1200.0;
    double height_m = 1200.0;
    double resolution_m = 10.0;
    int rows = 120;
    int cols = 120;

    static GridSpec make(double width_m, double height_m, double resolution_m);

    double cell_x(int col) const { return (col + 0.5) * resolution_m; }
    double cell_y(int row) const { return (row + 0.5) * resolution_m; }
    std::size_t cell_count() const {
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }
};

constexpr double kReceiverHeightM = 1.5;

struct SectorAntenna {
    int site_id = 0;
    double x_m = 0.0, y_m = 0.0, z_m = 25.0;
    double azimuth_deg = 0.0;         // boresight, degrees CCW from +x
    double max_gain_dbi = 15.0;
    double h_beamwidth_deg = 65.0;
    double v_beamwidth_deg = 10.0;
    double front_back_ratio_db = 30.0;  // A_m
    double sla_v_db = 30.0;
};

struct PathLossParams {
    // intercept = 32.4 dB free-space at 3.5 GHz plus ~36 dB wideband-to-RSRP
    // normalization, so received levels land in the usual RSRP range
    double pl0_db = 68.4;
    double exponent = 3.76;
    double d0_m = 1.0;
    double min_distance_m = 10.0;
};

struct ShadowingParams {
    double sigma_db = 8.0;
    double decorrelation_m = 50.0;
};

struct SiteSpec {
    double x_m = 0.0, y_m = 0.0, z_m = 25.0;
    std::array<double, 3> azimuths_deg{0.0, 120.0, 240.0};
};

struct LayoutConfig {
    GridSpec grid;
    std::vector<SiteSpec> sites;
    SectorAntenna antenna_template;   // gains/beamwidths shared by all sectors
    PathLossParams pathloss;
    ShadowingParams shadowing;
    double reference_power_dbm = 40.0;
    std::vector<int> downtilts_deg{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
};

// Five-site layout: four sites near the corners at 25-30 m plus a lower
// 20 m site in the upper-right quadrant.
LayoutConfig default_layout();

struct RadioEnvironment {
    GridSpec grid;
    std::vector<SectorAntenna> antennas;
    PathLossParams pathloss;
    ShadowingParams shadowing;
    std::uint64_t seed = 0;
    double reference_power_dbm = 40.0;
    std::vector<int> downtilts_deg;
    // one field per sector, row-major rows x cols, dB
    std::vector<std::vector<float>> shadowing_fields;
};

RadioEnvironment generate_environment(const LayoutConfig& layout, std::uint64_t seed);

// Two-plane sector pattern: horizontal and vertical parabolic cuts, each
// clamped (front-to-back ratio A_m, vertical sidelobe level SLA_v), summed
// and clamped again at A_m.
double antenna_gain(const SectorAntenna& a, double az_offset_deg,
                    double el_offset_deg, double downtilt_deg);

// Log-distance path loss, distance clamped below min_distance_m.
double path_loss(double d_m, const PathLossParams& p);

// Zero-mean Gaussian random field, marginal std sigma_db, exponential
// autocorrelation exp(-d / decorrelation_m) along grid axes. Realized as a
// separable AR(1) filter in both directions.
std::vector<float> shadowing_field(const GridSpec& grid, double sigma_db,
                                   double decorrelation_m, std::uint64_t seed,
                                   int sector_index);

// Per-sector RSRP maps at reference power for every downtilt in the set.
struct CoverageTensor {
    int n_sectors = 0;
    int n_downtilts = 0;
    GridSpec grid;
    std::vector<int> downtilts_deg;
    double reference_power_dbm = 40.0;
    std::uint64_t seed = 0;
    std::vector<float> rsrp_dbm;  // [sector][downtilt][row][col], row-major

    std::size_t slice_size() const { return grid.cell_count(); }
    const float* slice(int sector, int downtilt_index) const {
        return rsrp_dbm.data() +
               (static_cast<std::size_t>(sector) * n_downtilts + downtilt_index) * slice_size();
    }
    float at(int sector, int downtilt_index, int row, int col) const {
        return slice(sector, downtilt_index)[static_cast<std::size_t>(row) * grid.cols + col];
    }
    int downtilt_index(int downtilt_deg) const;

    void save(const std::string& path) const;
    static CoverageTensor load(const std::string& path);
};

CoverageTensor precompute_coverage(const RadioEnvironment& env);

// Per-sector RSRP maps for one configuration, dBm.
struct RsrpStack {
    int n_sectors = 0;
    int rows = 0;
    int cols = 0;
    std::vector<double> maps;  // [sector][row][col]

    std::size_t cell_count() const {
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }
    const double* map(int sector) const { return maps.data() + sector * cell_count(); }
    double* map(int sector) { return maps.data() + sector * cell_count(); }
};

// Tensor slice selection plus per-sector power offset; pure, the tensor is
// never mutated.
RsrpStack apply_configuration(const CoverageTensor& tensor, const Configuration& config);

}  // namespace cco
