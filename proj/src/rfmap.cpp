#include "cco/rfmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <thread>

#include "cco/random.hpp"

namespace cco {

GridSpec GridSpec::make(double width_m, double height_m, double resolution_m) {
    if (width_m <= 0 || height_m <= 0 || resolution_m <= 0)
        throw InvalidGridError("grid dimensions must be positive");
    double rc = height_m / resolution_m;
    double cc = width_m / resolution_m;
    double rr = std::round(rc), cr = std::round(cc);
    if (std::abs(rc - rr) > 1e-9 || std::abs(cc - cr) > 1e-9 || rr < 1 || cr < 1)
        throw InvalidGridError("grid extent must be an integer multiple of the resolution");
    GridSpec g;
    g.width_m = width_m;
    g.height_m = height_m;
    g.resolution_m = resolution_m;
    g.rows = static_cast<int>(rr);
    g.cols = static_cast<int>(cr);
    return g;
}

LayoutConfig default_layout() {
    LayoutConfig l;
    l.grid = GridSpec::make(1200.0, 1200.0, 10.0);
    l.sites = {
        {150.0, 150.0, 25.0, {45.0, 165.0, 285.0}},
        {1050.0, 150.0, 30.0, {135.0, 255.0, 15.0}},
        {150.0, 1050.0, 28.0, {315.0, 75.0, 195.0}},
        {1050.0, 1050.0, 26.0, {225.0, 345.0, 105.0}},
        {820.0, 820.0, 20.0, {0.0, 120.0, 240.0}},
    };
    return l;
}

RadioEnvironment generate_environment(const LayoutConfig& layout, std::uint64_t seed) {
    if (layout.sites.empty()) throw InvalidLayoutError("layout has no sites");
    for (std::size_t i = 0; i < layout.sites.size(); ++i)
        for (std::size_t j = i + 1; j < layout.sites.size(); ++j) {
            double dx = layout.sites[i].x_m - layout.sites[j].x_m;
            double dy = layout.sites[i].y_m - layout.sites[j].y_m;
            if (dx == 0.0 && dy == 0.0)
                throw InvalidLayoutError("two sites share one position");
        }

    RadioEnvironment env;
    env.grid = layout.grid;
    env.pathloss = layout.pathloss;
    env.shadowing = layout.shadowing;
    env.seed = seed;
    env.reference_power_dbm = layout.reference_power_dbm;
    env.downtilts_deg = layout.downtilts_deg;

    for (std::size_t s = 0; s < layout.sites.size(); ++s) {
        const SiteSpec& site = layout.sites[s];
        if (site.z_m <= 0) throw InvalidLayoutError("site height must be positive");
        for (double az : site.azimuths_deg) {
            SectorAntenna a = layout.antenna_template;
            a.site_id = static_cast<int>(s);
            a.x_m = site.x_m;
            a.y_m = site.y_m;
            a.z_m = site.z_m;
            a.azimuth_deg = std::fmod(std::fmod(az, 360.0) + 360.0, 360.0);
            env.antennas.push_back(a);
        }
    }

    env.shadowing_fields.resize(env.antennas.size());
    for (std::size_t i = 0; i < env.antennas.size(); ++i)
        env.shadowing_fields[i] =
            shadowing_field(env.grid, env.shadowing.sigma_db, env.shadowing.decorrelation_m,
                            seed, static_cast<int>(i));
    return env;
}

double antenna_gain(const SectorAntenna& a, double az_offset_deg,
                    double el_offset_deg, double downtilt_deg) {
    double az = std::fmod(std::fmod(az_offset_deg, 360.0) + 540.0, 360.0) - 180.0;
    double ah = std::min(12.0 * (az / a.h_beamwidth_deg) * (az / a.h_beamwidth_deg),
                         a.front_back_ratio_db);
    double ev = el_offset_deg - downtilt_deg;
    double av = std::min(12.0 * (ev / a.v_beamwidth_deg) * (ev / a.v_beamwidth_deg),
                         a.sla_v_db);
    return a.max_gain_dbi - std::min(ah + av, a.front_back_ratio_db);
}

double path_loss(double d_m, const PathLossParams& p) {
    double d = std::max(d_m, p.min_distance_m);
    return p.pl0_db + 10.0 * p.exponent * std::log10(d / p.d0_m);
}

std::vector<float> shadowing_field(const GridSpec& grid, double sigma_db,
                                   double decorrelation_m, std::uint64_t seed,
                                   int sector_index) {
    const int rows = grid.rows, cols = grid.cols;
    std::vector<float> field(grid.cell_count(), 0.0f);
    if (sigma_db == 0.0) return field;

    Rng rng(mix_seed(seed, 0x5ADEull * 1000 + static_cast<std::uint64_t>(sector_index)));
    std::vector<double> f(grid.cell_count());
    for (double& v : f) v = rng.normal();

    // AR(1) along columns then rows; stationary unit variance, axis
    // correlation rho^lag = exp(-lag * res / decorrelation).
    const double rho = std::exp(-grid.resolution_m / decorrelation_m);
    const double w = std::sqrt(1.0 - rho * rho);
    for (int r = 0; r < rows; ++r) {
        double* row = f.data() + static_cast<std::size_t>(r) * cols;
        for (int c = 1; c < cols; ++c) row[c] = rho * row[c - 1] + w * row[c];
    }
    for (int c = 0; c < cols; ++c)
        for (int r = 1; r < rows; ++r) {
            std::size_t i = static_cast<std::size_t>(r) * cols + c;
            f[i] = rho * f[i - cols] + w * f[i];
        }

    for (std::size_t i = 0; i < f.size(); ++i)
        field[i] = static_cast<float>(sigma_db * f[i]);
    return field;
}

int CoverageTensor::downtilt_index(int downtilt_deg) const {
    for (std::size_t i = 0; i < downtilts_deg.size(); ++i)
        if (downtilts_deg[i] == downtilt_deg) return static_cast<int>(i);
    throw InvalidConfigurationError("downtilt " + std::to_string(downtilt_deg) +
                                    " not in the precomputed set");
}

CoverageTensor precompute_coverage(const RadioEnvironment& env) {
    CoverageTensor t;
    t.n_sectors = static_cast<int>(env.antennas.size());
    t.n_downtilts = static_cast<int>(env.downtilts_deg.size());
    t.grid = env.grid;
    t.downtilts_deg = env.downtilts_deg;
    t.reference_power_dbm = env.reference_power_dbm;
    t.seed = env.seed;
    t.rsrp_dbm.resize(static_cast<std::size_t>(t.n_sectors) * t.n_downtilts * t.slice_size());

    const double rad2deg = 180.0 / 3.14159265358979323846;
    auto fill_sector = [&](int s) {
        const SectorAntenna& a = env.antennas[s];
        const std::vector<float>& shadow = env.shadowing_fields[s];
        for (int r = 0; r < env.grid.rows; ++r) {
            for (int c = 0; c < env.grid.cols; ++c) {
                double dx = env.grid.cell_x(c) - a.x_m;
                double dy = env.grid.cell_y(r) - a.y_m;
                double dz = a.z_m - kReceiverHeightM;
                double dh = std::hypot(dx, dy);
                double d3 = std::hypot(dh, dz);
                double az = rad2deg * std::atan2(dy, dx) - a.azimuth_deg;
                double el = rad2deg * std::atan2(dz, dh);  // positive below horizontal
                double pl = path_loss(d3, env.pathloss);
                std::size_t cell = static_cast<std::size_t>(r) * env.grid.cols + c;
                double base = env.reference_power_dbm - pl + shadow[cell];
                for (int d = 0; d < t.n_downtilts; ++d) {
                    double g = antenna_gain(a, az, el,
                                            static_cast<double>(env.downtilts_deg[d]));
                    std::size_t idx =
                        (static_cast<std::size_t>(s) * t.n_downtilts + d) * t.slice_size() + cell;
                    t.rsrp_dbm[idx] = static_cast<float>(base + g);
                }
            }
        }
    };

    // sectors write disjoint slices, safe to split across threads
    int threads = 1;
    if (const char* cap = std::getenv("CCO_THREADS")) {
        threads = std::max(1, std::atoi(cap));
    } else {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, t.n_sectors);
    if (threads <= 1) {
        for (int s = 0; s < t.n_sectors; ++s) fill_sector(s);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (int s = w; s < t.n_sectors; s += threads) fill_sector(s);
            });
        for (auto& th : pool) th.join();
    }
    return t;
}

RsrpStack apply_configuration(const CoverageTensor& tensor, const Configuration& config) {
    if (static_cast<int>(config.settings.size()) != tensor.n_sectors)
        throw InvalidConfigurationError("configuration sector count does not match tensor");
    config.validate();

    RsrpStack stack;
    stack.n_sectors = tensor.n_sectors;
    stack.rows = tensor.grid.rows;
    stack.cols = tensor.grid.cols;
    stack.maps.resize(static_cast<std::size_t>(stack.n_sectors) * stack.cell_count());

    for (int s = 0; s < tensor.n_sectors; ++s) {
        int di = tensor.downtilt_index(config.settings[s].downtilt_deg);
        double offset = config.settings[s].power_dbm - tensor.reference_power_dbm;
        const float* src = tensor.slice(s, di);
        double* dst = stack.map(s);
        for (std::size_t i = 0; i < stack.cell_count(); ++i)
            dst[i] = static_cast<double>(src[i]) + offset;
    }
    return stack;
}

namespace {

constexpr std::uint32_t kTensorMagic = 0x43434F54u;  // "CCOT"
constexpr std::uint32_t kTensorVersion = 1u;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("coverage tensor file truncated");
}

}  // namespace

void CoverageTensor::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_pod(os, kTensorMagic);
    write_pod(os, kTensorVersion);
    write_pod(os, static_cast<std::uint32_t>(n_sectors));
    write_pod(os, static_cast<std::uint32_t>(n_downtilts));
    write_pod(os, static_cast<std::uint32_t>(grid.rows));
    write_pod(os, static_cast<std::uint32_t>(grid.cols));
    write_pod(os, grid.resolution_m);
    write_pod(os, seed);
    write_pod(os, reference_power_dbm);
    for (int d : downtilts_deg) write_pod(os, static_cast<std::int32_t>(d));
    os.write(reinterpret_cast<const char*>(rsrp_dbm.data()),
             static_cast<std::streamsize>(rsrp_dbm.size() * sizeof(float)));
    if (!os) throw std::runtime_error("write error on " + path);
}

CoverageTensor CoverageTensor::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::uint32_t magic = 0, version = 0, ns = 0, nd = 0, rows = 0, cols = 0;
    read_pod(is, magic);
    read_pod(is, version);
    if (magic != kTensorMagic) throw std::runtime_error(path + ": not a coverage tensor file");
    if (version != kTensorVersion) throw std::runtime_error(path + ": unsupported tensor version");
    read_pod(is, ns);
    read_pod(is, nd);
    read_pod(is, rows);
    read_pod(is, cols);

    CoverageTensor t;
    double resolution = 0.0;
    read_pod(is, resolution);
    read_pod(is, t.seed);
    read_pod(is, t.reference_power_dbm);
    t.n_sectors = static_cast<int>(ns);
    t.n_downtilts = static_cast<int>(nd);
    t.grid = GridSpec::make(cols * resolution, rows * resolution, resolution);
    t.downtilts_deg.resize(nd);
    for (std::uint32_t i = 0; i < nd; ++i) {
        std::int32_t v = 0;
        read_pod(is, v);
        t.downtilts_deg[i] = v;
    }
    t.rsrp_dbm.resize(static_cast<std::size_t>(ns) * nd * t.slice_size());
    is.read(reinterpret_cast<char*>(t.rsrp_dbm.data()),
            static_cast<std::streamsize>(t.rsrp_dbm.size() * sizeof(float)));
    if (!is || is.gcount() != static_cast<std::streamsize>(t.rsrp_dbm.size() * sizeof(float)))
        throw std::runtime_error(path + ": tensor payload truncated");
    return t;
}

}  // namespace cco
