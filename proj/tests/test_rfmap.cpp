#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <vector>

#include "cco/rfmap.hpp"

using namespace cco;

namespace {

// small environment for fast structural tests
LayoutConfig small_layout() {
    LayoutConfig l = default_layout();
    l.grid = GridSpec::make(600.0, 600.0, 20.0);
    l.sites = {
        {80.0, 80.0, 25.0, {45.0, 165.0, 285.0}},
        {520.0, 80.0, 30.0, {135.0, 255.0, 15.0}},
        {80.0, 520.0, 28.0, {315.0, 75.0, 195.0}},
        {520.0, 520.0, 26.0, {225.0, 345.0, 105.0}},
        {400.0, 400.0, 20.0, {0.0, 120.0, 240.0}},
    };
    return l;
}

double field_mean(const std::vector<float>& f) {
    double s = 0.0;
    for (float v : f) s += v;
    return s / f.size();
}

}  // namespace

TEST_CASE("grid spec derives exact integer dimensions") {
    GridSpec g = GridSpec::make(1200.0, 1200.0, 10.0);
    CHECK(g.rows == 120);
    CHECK(g.cols == 120);
    CHECK(g.cell_count() == 14400);
    CHECK_THROWS_AS(GridSpec::make(1205.0, 1200.0, 10.0), InvalidGridError);
    CHECK_THROWS_AS(GridSpec::make(1200.0, 1200.0, -1.0), InvalidGridError);
}

TEST_CASE("default layout yields 15 antennas with 120 degree sector separation") {
    RadioEnvironment env = generate_environment(default_layout(), 7);
    REQUIRE(env.antennas.size() == 15);
    for (int site = 0; site < 5; ++site) {
        double a0 = env.antennas[3 * site].azimuth_deg;
        double a1 = env.antennas[3 * site + 1].azimuth_deg;
        double a2 = env.antennas[3 * site + 2].azimuth_deg;
        auto sep = [](double x, double y) {
            double d = std::fmod(std::fabs(x - y), 360.0);
            return std::min(d, 360.0 - d);
        };
        CHECK(sep(a0, a1) == doctest::Approx(120.0));
        CHECK(sep(a1, a2) == doctest::Approx(120.0));
    }
    // one low site
    int low = 0;
    for (const auto& a : env.antennas)
        if (a.z_m < 25.0) ++low;
    CHECK(low == 3);
}

TEST_CASE("environment generation is deterministic in (layout, seed)") {
    LayoutConfig l = small_layout();
    RadioEnvironment a = generate_environment(l, 123);
    RadioEnvironment b = generate_environment(l, 123);
    RadioEnvironment c = generate_environment(l, 124);

    for (std::size_t s = 0; s < a.shadowing_fields.size(); ++s)
        CHECK(a.shadowing_fields[s] == b.shadowing_fields[s]);

    bool any_diff = false;
    for (std::size_t s = 0; s < a.shadowing_fields.size() && !any_diff; ++s)
        any_diff = a.shadowing_fields[s] != c.shadowing_fields[s];
    CHECK(any_diff);
}

TEST_CASE("overlapping sites are rejected") {
    LayoutConfig l = small_layout();
    l.sites[1].x_m = l.sites[0].x_m;
    l.sites[1].y_m = l.sites[0].y_m;
    CHECK_THROWS_AS(generate_environment(l, 1), InvalidLayoutError);
}

TEST_CASE("antenna pattern hits its landmark values") {
    SectorAntenna a;  // defaults: 15 dBi, 65/10 degree beamwidths, 30 dB clamps
    CHECK(antenna_gain(a, 0.0, 5.0, 5.0) == doctest::Approx(a.max_gain_dbi));
    CHECK(antenna_gain(a, a.h_beamwidth_deg / 2, 5.0, 5.0) ==
          doctest::Approx(a.max_gain_dbi - 3.0));
    CHECK(antenna_gain(a, 180.0, 5.0, 5.0) == doctest::Approx(a.max_gain_dbi - 30.0));
    CHECK(antenna_gain(a, 0.0, 5.0 + a.v_beamwidth_deg / 2, 5.0) ==
          doctest::Approx(a.max_gain_dbi - 3.0));
}

TEST_CASE("antenna pattern stays within [max_gain - A_m, max_gain]") {
    SectorAntenna a;
    for (double az = -180.0; az <= 180.0; az += 7.0)
        for (double el = -90.0; el <= 90.0; el += 4.5)
            for (int tilt = 0; tilt <= 10; tilt += 5) {
                double g = antenna_gain(a, az, el, tilt);
                CHECK(g <= a.max_gain_dbi + 1e-12);
                CHECK(g >= a.max_gain_dbi - a.front_back_ratio_db - 1e-12);
            }
}

TEST_CASE("log-distance path loss") {
    // d0 sits below the default clamp, so test with a loose clamp
    PathLossParams q{32.4, 3.76, 1.0, 0.5};
    CHECK(path_loss(1.0, q) == doctest::Approx(32.4));
    CHECK(path_loss(10.0, q) == doctest::Approx(32.4 + 37.6));
    CHECK(path_loss(0.1, q) == doctest::Approx(path_loss(0.5, q)));
    CHECK(path_loss(200.0, q) >= path_loss(100.0, q));
}

TEST_CASE("shadowing field statistics") {
    GridSpec g = GridSpec::make(1200.0, 1200.0, 10.0);
    const double sigma = 8.0, decorr = 50.0;

    SUBCASE("zero sigma gives the zero field") {
        auto f = shadowing_field(g, 0.0, decorr, 9, 0);
        for (float v : f) CHECK(v == 0.0f);
    }

    SUBCASE("marginal std and lag-decorrelation, pooled over seeds") {
        double sq_sum = 0.0;
        std::size_t n = 0;
        double num = 0.0, den = 0.0;
        const int lag = static_cast<int>(decorr / g.resolution_m);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto f = shadowing_field(g, sigma, decorr, seed, 3);
            double mu = field_mean(f);
            for (float v : f) {
                sq_sum += (v - mu) * (v - mu);
                ++n;
            }
            // autocorrelation along rows at the decorrelation distance
            for (int r = 0; r < g.rows; ++r)
                for (int c = 0; c + lag < g.cols; ++c) {
                    double x = f[r * g.cols + c] - mu;
                    double y = f[r * g.cols + c + lag] - mu;
                    num += x * y;
                    den += x * x;
                }
        }
        double std_hat = std::sqrt(sq_sum / n);
        CHECK(std_hat == doctest::Approx(sigma).epsilon(0.1));
        double rho_hat = num / den;
        CHECK(std::fabs(rho_hat - std::exp(-1.0)) < 0.1);
    }
}

TEST_CASE("coverage tensor construction") {
    LayoutConfig l = small_layout();
    RadioEnvironment env = generate_environment(l, 11);
    CoverageTensor t = precompute_coverage(env);

    CHECK(t.n_sectors == 15);
    CHECK(t.n_downtilts == 11);
    CHECK(t.rsrp_dbm.size() == 15u * 11u * t.grid.cell_count());
    for (float v : t.rsrp_dbm) CHECK(std::isfinite(v));

    SUBCASE("bit-identical across runs") {
        CoverageTensor t2 = precompute_coverage(generate_environment(l, 11));
        CHECK(t.rsrp_dbm == t2.rsrp_dbm);
    }

    SUBCASE("cell under a site gains from downtilt") {
        // cell ~70 m from site 0 (80, 80): near enough that downtilt 0
        // overshoots but the vertical cut still separates the two tilts
        int row = 6, col = 6;
        double sum0 = 0.0, sum10 = 0.0;
        for (int s = 0; s < 3; ++s) {
            sum0 += t.at(s, t.downtilt_index(0), row, col);
            sum10 += t.at(s, t.downtilt_index(10), row, col);
        }
        CHECK(sum10 > sum0);
    }

    SUBCASE("reference power shifts every entry additively") {
        LayoutConfig l2 = l;
        l2.reference_power_dbm += 3.0;
        CoverageTensor t2 = precompute_coverage(generate_environment(l2, 11));
        for (std::size_t i = 0; i < t.rsrp_dbm.size(); i += 997)
            CHECK(t2.rsrp_dbm[i] == doctest::Approx(t.rsrp_dbm[i] + 3.0).epsilon(1e-6));
    }
}

TEST_CASE("apply_configuration is an exact per-sector dB shift") {
    LayoutConfig l = small_layout();
    CoverageTensor t = precompute_coverage(generate_environment(l, 21));

    Configuration ref = Configuration::uniform(15, 5, t.reference_power_dbm);
    RsrpStack base = apply_configuration(t, ref);
    for (int s = 0; s < 15; ++s)
        for (std::size_t i = 0; i < base.cell_count(); i += 131) {
            int row = static_cast<int>(i) / t.grid.cols;
            int col = static_cast<int>(i) % t.grid.cols;
            CHECK(base.map(s)[i] == static_cast<double>(t.at(s, t.downtilt_index(5), row, col)));
        }

    Configuration lo = ref, hi = ref;
    lo.settings[1].power_dbm = 30.0;
    hi.settings[1].power_dbm = 50.0;
    RsrpStack slo = apply_configuration(t, lo);
    RsrpStack shi = apply_configuration(t, hi);
    for (std::size_t i = 0; i < slo.cell_count(); i += 101) {
        CHECK(shi.map(1)[i] - slo.map(1)[i] == doctest::Approx(20.0).epsilon(1e-12));
        CHECK(shi.map(0)[i] == slo.map(0)[i]);
    }

    Configuration bad = ref;
    bad.settings[0].power_dbm = 51.0;
    CHECK_THROWS_AS(apply_configuration(t, bad), InvalidConfigurationError);
    bad = ref;
    bad.settings[0].downtilt_deg = 11;
    CHECK_THROWS_AS(apply_configuration(t, bad), InvalidConfigurationError);
}

TEST_CASE("tensor file round trip and truncation check") {
    LayoutConfig l = small_layout();
    CoverageTensor t = precompute_coverage(generate_environment(l, 33));
    const std::string path = "test_tensor.bin";
    t.save(path);
    CoverageTensor r = CoverageTensor::load(path);
    CHECK(r.n_sectors == t.n_sectors);
    CHECK(r.downtilts_deg == t.downtilts_deg);
    CHECK(r.rsrp_dbm == t.rsrp_dbm);
    CHECK(r.seed == t.seed);

    // truncate and expect rejection
    {
        std::ifstream is(path, std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(is)),
                                std::istreambuf_iterator<char>());
        std::ofstream os(path, std::ios::binary);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS(CoverageTensor::load(path));
    std::remove(path.c_str());
}
