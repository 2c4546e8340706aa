#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace cco {

// Non-dominated set of 2-D objective points (minimization), sorted ascending
// by the first objective (hence strictly descending in the second).
// config_index maps each point back to the history entry that produced it.
struct ParetoFront {
    std::vector<std::array<double, 2>> points;
    std::vector<std::size_t> config_index;

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
};

ParetoFront non_dominated(const std::vector<std::array<double, 2>>& points);

// Exact dominated area within the reference box, staircase sum.
double hypervolume_2d(const ParetoFront& front, const std::array<double, 2>& ref_point);

struct FrontierComparison {
    std::vector<std::string> names;
    std::vector<double> hypervolumes;
    std::vector<std::size_t> evaluation_counts;
    // improvement[a][b]: mean gap of front b's interpolated staircase above
    // front a's, over a common first-objective grid; positive means a is
    // better than b.
    std::vector<std::vector<double>> improvement;
    std::vector<std::string> notices;
};

struct NamedFront {
    std::string name;
    ParetoFront front;
    std::size_t evaluations = 0;
};

FrontierComparison compare_frontiers(const std::vector<NamedFront>& fronts,
                                     const std::array<double, 2>& ref_point);

}  // namespace cco
