#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cco/random.hpp"
#include "cco/sobol.hpp"

using namespace cco;

namespace {

// max deviation between empirical and exact box mass over anchored boxes
// [0,a]x[0,b] in the first two dimensions: a cheap star-discrepancy proxy
double discrepancy_proxy(const std::vector<std::vector<double>>& pts) {
    double worst = 0.0;
    for (int i = 1; i <= 10; ++i)
        for (int j = 1; j <= 10; ++j) {
            double a = i / 10.0, b = j / 10.0;
            std::size_t in = 0;
            for (const auto& p : pts)
                if (p[0] < a && p[1] < b) ++in;
            worst = std::max(worst, std::fabs(static_cast<double>(in) / pts.size() - a * b));
        }
    return worst;
}

}  // namespace

TEST_CASE("points stay inside the unit cube") {
    auto pts = sobol_points(512, 30, 42);
    REQUIRE(pts.size() == 512);
    for (const auto& p : pts) {
        REQUIRE(p.size() == 30);
        for (double v : p) {
            CHECK(v >= 0.0);
            CHECK(v < 1.0);
        }
    }
}

TEST_CASE("deterministic in the seed") {
    auto a = sobol_points(64, 8, 7);
    auto b = sobol_points(64, 8, 7);
    auto c = sobol_points(64, 8, 8);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("sequence object and batch helper agree") {
    SobolSequence seq(5, 99);
    auto batch = sobol_points(16, 5, 99);
    for (int i = 0; i < 16; ++i) CHECK(seq.next() == batch[i]);
}

TEST_CASE("dimension limits") {
    CHECK_THROWS(SobolSequence(0, 1));
    CHECK_THROWS(SobolSequence(33, 1));
    CHECK_NOTHROW(SobolSequence(32, 1));
    CHECK_NOTHROW(SobolSequence(1, 1));
}

TEST_CASE("per-dimension means are balanced") {
    auto pts = sobol_points(1024, 30, 3);
    for (int d = 0; d < 30; ++d) {
        double s = 0.0;
        for (const auto& p : pts) s += p[d];
        CHECK(s / pts.size() == doctest::Approx(0.5).epsilon(0.02));
    }
}

TEST_CASE("lower discrepancy than iid uniform sampling") {
    const int n = 512;
    auto pts = sobol_points(n, 30, 123);
    double d_sobol = discrepancy_proxy(pts);

    std::vector<double> d_rand;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(1000 + seed);
        std::vector<std::vector<double>> u(n, std::vector<double>(2));
        for (auto& p : u) {
            p[0] = rng.uniform(0.0, 1.0);
            p[1] = rng.uniform(0.0, 1.0);
        }
        d_rand.push_back(discrepancy_proxy(u));
    }
    std::sort(d_rand.begin(), d_rand.end());
    double median = d_rand[d_rand.size() / 2];
    CHECK(d_sobol < median);
}

TEST_CASE("distinct seeds still cover low dimensions evenly") {
    // a digital shift must not break 2^k stratification in a single dimension
    for (std::uint64_t seed : {5ull, 17ull, 91ull}) {
        auto pts = sobol_points(256, 4, seed);
        for (int d = 0; d < 4; ++d) {
            std::vector<int> bins(16, 0);
            for (const auto& p : pts)
                ++bins[std::min(15, static_cast<int>(p[d] * 16.0))];
            for (int b : bins) CHECK(b == 16);
        }
    }
}
