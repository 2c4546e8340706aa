#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cco {

struct InvalidConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kNumSectors = 15;
constexpr int kMaxDowntiltDeg = 10;     // downtilt set {0,...,10}
constexpr double kMinPowerDbm = 30.0;
constexpr double kMaxPowerDbm = 50.0;

// Joint per-sector setting of downtilt and transmit power, the variable
// every optimizer searches over.
struct SectorSetting {
    int downtilt_deg = 0;
    double power_dbm = kMinPowerDbm;
};

struct Configuration {
    std::vector<SectorSetting> settings;

    void validate() const {
        for (const auto& s : settings) {
            if (s.downtilt_deg < 0 || s.downtilt_deg > kMaxDowntiltDeg)
                throw InvalidConfigurationError("downtilt out of {0..10}");
            if (s.power_dbm < kMinPowerDbm || s.power_dbm > kMaxPowerDbm)
                throw InvalidConfigurationError("power out of [30, 50] dBm");
        }
    }

    static Configuration uniform(int n_sectors, int downtilt_deg, double power_dbm) {
        Configuration c;
        c.settings.assign(static_cast<std::size_t>(n_sectors), {downtilt_deg, power_dbm});
        return c;
    }
};

// Unit-cube encoding shared by the surrogate and the acquisition search:
// dims [0, n) are downtilt / 10, dims [n, 2n) are (power - 30) / 20.
// Downtilt is continuous inside the cube and rounded only when decoding.
inline std::vector<double> encode_configuration(const Configuration& c) {
    const std::size_t n = c.settings.size();
    std::vector<double> u(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = static_cast<double>(c.settings[i].downtilt_deg) / kMaxDowntiltDeg;
        u[n + i] = (c.settings[i].power_dbm - kMinPowerDbm) / (kMaxPowerDbm - kMinPowerDbm);
    }
    return u;
}

inline Configuration decode_point(const std::vector<double>& u) {
    if (u.size() % 2 != 0) throw InvalidConfigurationError("encoded point must have even dimension");
    const std::size_t n = u.size() / 2;
    Configuration c;
    c.settings.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = std::clamp(u[i], 0.0, 1.0);
        double p = std::clamp(u[n + i], 0.0, 1.0);
        c.settings[i].downtilt_deg = static_cast<int>(std::lround(t * kMaxDowntiltDeg));
        c.settings[i].power_dbm = kMinPowerDbm + p * (kMaxPowerDbm - kMinPowerDbm);
    }
    return c;
}

}  // namespace cco
