#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "cco/pareto.hpp"
#include "cco/random.hpp"

using namespace cco;
using P2 = std::array<double, 2>;

namespace {

bool dominates(const P2& a, const P2& b) {
    return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

// quadratic-time reference filter
std::vector<P2> brute_front(const std::vector<P2>& pts) {
    std::vector<P2> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dom = false;
        for (std::size_t j = 0; j < pts.size() && !dom; ++j)
            if (j != i && dominates(pts[j], pts[i])) dom = true;
        // keep the first occurrence of duplicates only
        for (std::size_t j = 0; j < i && !dom; ++j)
            if (pts[j] == pts[i]) dom = true;
        if (!dom) out.push_back(pts[i]);
    }
    return out;
}

std::vector<P2> random_points(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<P2> pts(n);
    for (auto& p : pts) p = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    return pts;
}

}  // namespace

TEST_CASE("non_dominated basics") {
    SUBCASE("singleton passes through") {
        ParetoFront f = non_dominated({{0.3, 0.7}});
        REQUIRE(f.size() == 1);
        CHECK(f.points[0] == P2{0.3, 0.7});
        CHECK(f.config_index[0] == 0);
    }
    SUBCASE("dominated point dropped, incomparable kept") {
        ParetoFront f = non_dominated({{1.0, 2.0}, {2.0, 1.0}, {2.0, 2.0}});
        REQUIRE(f.size() == 2);
        CHECK(f.points[0] == P2{1.0, 2.0});
        CHECK(f.points[1] == P2{2.0, 1.0});
        CHECK(f.config_index[0] == 0);
        CHECK(f.config_index[1] == 1);
    }
    SUBCASE("empty input") {
        CHECK(non_dominated({}).empty());
    }
    SUBCASE("duplicates collapse to one survivor") {
        ParetoFront f = non_dominated({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}});
        CHECK(f.size() == 1);
    }
}

TEST_CASE("non_dominated matches a quadratic brute-force filter") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto pts = random_points(1000, seed);
        ParetoFront f = non_dominated(pts);
        std::vector<P2> ref = brute_front(pts);
        // both sorted ascending by first objective for comparison
        std::sort(ref.begin(), ref.end());
        REQUIRE(f.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(f.points[i] == ref[i]);
            CHECK(pts[f.config_index[i]] == f.points[i]);
        }
        // sorted and strictly improving in the second objective
        for (std::size_t i = 1; i < f.size(); ++i) {
            CHECK(f.points[i][0] > f.points[i - 1][0]);
            CHECK(f.points[i][1] < f.points[i - 1][1]);
        }
    }
}

TEST_CASE("non_dominated is idempotent") {
    auto pts = random_points(500, 9);
    ParetoFront once = non_dominated(pts);
    ParetoFront twice = non_dominated(once.points);
    CHECK(once.points == twice.points);
}

TEST_CASE("hypervolume of simple shapes") {
    const P2 ref{1.0, 1.0};
    SUBCASE("single point spans a rectangle") {
        ParetoFront f = non_dominated({{0.25, 0.5}});
        CHECK(hypervolume_2d(f, ref) == doctest::Approx(0.75 * 0.5).epsilon(1e-15));
    }
    SUBCASE("two-point staircase") {
        ParetoFront f = non_dominated({{0.2, 0.6}, {0.5, 0.3}});
        // rect 1: (0.5-0.2)*(1-0.6); rect 2: (1-0.5)*(1-0.3)
        CHECK(hypervolume_2d(f, ref) == doctest::Approx(0.3 * 0.4 + 0.5 * 0.7).epsilon(1e-15));
    }
    SUBCASE("points outside the reference box contribute nothing") {
        ParetoFront f = non_dominated({{1.5, 0.1}, {0.1, 1.5}});
        CHECK(hypervolume_2d(f, ref) == 0.0);
        ParetoFront e;
        CHECK(hypervolume_2d(e, ref) == 0.0);
    }
    SUBCASE("point on the boundary is degenerate") {
        ParetoFront f = non_dominated({{1.0, 0.0}});
        CHECK(hypervolume_2d(f, ref) == 0.0);
    }
}

TEST_CASE("hypervolume agrees with a Monte Carlo estimate") {
    const P2 ref{1.0, 1.0};
    auto pts = random_points(60, 31);
    ParetoFront f = non_dominated(pts);
    double hv = hypervolume_2d(f, ref);

    Rng rng(77);
    const std::size_t n = 200000;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < n; ++i) {
        P2 q{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
        for (const auto& p : f.points)
            if (p[0] <= q[0] && p[1] <= q[1]) {
                ++inside;
                break;
            }
    }
    double est = static_cast<double>(inside) / n;
    double se = std::sqrt(est * (1.0 - est) / n);
    CHECK(std::fabs(hv - est) < 3.0 * se + 1e-6);
}

TEST_CASE("hypervolume grows when a strictly better point joins") {
    const P2 ref{1.0, 1.0};
    auto pts = random_points(40, 55);
    ParetoFront before = non_dominated(pts);
    double hv0 = hypervolume_2d(before, ref);
    pts.push_back({0.01, 0.01});
    double hv1 = hypervolume_2d(non_dominated(pts), ref);
    CHECK(hv1 > hv0);
    CHECK(hv1 <= 1.0);
}

TEST_CASE("frontier comparison") {
    const P2 ref{1.0, 1.0};
    NamedFront good{"good", non_dominated({{0.1, 0.2}, {0.2, 0.1}}), 10};
    NamedFront bad{"bad", non_dominated({{0.5, 0.6}, {0.6, 0.5}}), 10};

    SUBCASE("a front dominating another wins both directions") {
        FrontierComparison c = compare_frontiers({good, bad}, ref);
        REQUIRE(c.names.size() == 2);
        CHECK(c.hypervolumes[0] > c.hypervolumes[1]);
        CHECK(c.improvement[0][1] > 0.0);
        CHECK(c.improvement[1][0] < 0.0);
        CHECK(c.improvement[0][0] == 0.0);
        CHECK(c.improvement[1][1] == 0.0);
    }
    SUBCASE("comparison against itself is neutral") {
        FrontierComparison c = compare_frontiers({good, good}, ref);
        CHECK(c.improvement[0][1] == doctest::Approx(0.0));
        CHECK(c.improvement[1][0] == doctest::Approx(0.0));
    }
    SUBCASE("empty fronts produce a notice, not a crash") {
        NamedFront empty{"empty", {}, 0};
        FrontierComparison c = compare_frontiers({good, empty}, ref);
        CHECK(!c.notices.empty());
    }
}
