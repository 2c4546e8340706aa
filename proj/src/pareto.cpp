#include "cco/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cco {

ParetoFront non_dominated(const std::vector<std::array<double, 2>>& points) {
    ParetoFront front;
    if (points.empty()) return front;

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    // sort by first objective, then second; ties keep the earliest index
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a][0] != points[b][0]) return points[a][0] < points[b][0];
        return points[a][1] < points[b][1];
    });

    double best_second = std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
        const auto& p = points[idx];
        // strict < collapses duplicates and drops weakly dominated points
        if (p[1] < best_second) {
            front.points.push_back(p);
            front.config_index.push_back(idx);
            best_second = p[1];
        }
    }
    return front;
}

double hypervolume_2d(const ParetoFront& front, const std::array<double, 2>& ref_point) {
    std::vector<std::array<double, 2>> inside;
    for (const auto& p : front.points)
        if (p[0] < ref_point[0] && p[1] < ref_point[1]) inside.push_back(p);

    // disjoint vertical strips between consecutive first-objective knots
    double hv = 0.0;
    for (std::size_t i = 0; i < inside.size(); ++i) {
        double right = (i + 1 < inside.size()) ? inside[i + 1][0] : ref_point[0];
        hv += (right - inside[i][0]) * (ref_point[1] - inside[i][1]);
    }
    return hv;
}

namespace {

// second objective of the front's staircase at first-objective value x:
// the best (smallest) second objective among points with first <= x.
double staircase_value(const ParetoFront& front, double x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : front.points) {
        if (p[0] <= x) best = p[1];
        else break;
    }
    return best;
}

}  // namespace

FrontierComparison compare_frontiers(const std::vector<NamedFront>& fronts,
                                     const std::array<double, 2>& ref_point) {
    if (fronts.size() < 2)
        throw std::invalid_argument("compare_frontiers: need at least two fronts");

    FrontierComparison cmp;
    std::vector<const NamedFront*> usable;
    for (const auto& nf : fronts) {
        if (nf.front.empty()) {
            cmp.notices.push_back("front '" + nf.name + "' has no points; excluded");
            continue;
        }
        usable.push_back(&nf);
        cmp.names.push_back(nf.name);
        cmp.hypervolumes.push_back(hypervolume_2d(nf.front, ref_point));
        cmp.evaluation_counts.push_back(nf.evaluations);
    }

    const std::size_t m = usable.size();
    cmp.improvement.assign(m, std::vector<double>(m, 0.0));
    if (m < 2) return cmp;

    // common grid: union of all fronts' first-objective knots, clipped to
    // the range where every front is defined
    double lo = 0.0, hi = ref_point[0];
    for (const auto* nf : usable) lo = std::max(lo, nf->front.points.front()[0]);
    std::vector<double> grid;
    for (const auto* nf : usable)
        for (const auto& p : nf->front.points)
            if (p[0] >= lo && p[0] <= hi) grid.push_back(p[0]);
    grid.push_back(lo);
    grid.push_back(hi);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            if (a == b) continue;
            double gap = 0.0;
            for (double x : grid)
                gap += staircase_value(usable[b]->front, x) - staircase_value(usable[a]->front, x);
            cmp.improvement[a][b] = gap / static_cast<double>(grid.size());
        }
    return cmp;
}

}  // namespace cco
