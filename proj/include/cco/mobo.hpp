#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "cco/configuration.hpp"
#include "cco/gp.hpp"
#include "cco/objectives.hpp"
#include "cco/pareto.hpp"

namespace cco {

// Objectives are modeled and compared after division by the grid cell
// count, so both live in [0,1]; the reference point leaves a little slack
// so boundary points still contribute hypervolume.
constexpr std::array<double, 2> kDefaultRefPoint{1.05, 1.05};

struct BoBudget {
    int n_init = 512;
    int n_iterations = 500;
};

struct BoState {
    std::vector<std::pair<Configuration, ObjectivePair>> history;
    ParetoFront front;  // over cell-normalized objectives
    std::array<double, 2> ref_point = kDefaultRefPoint;
    BoBudget budget;
    std::uint64_t seed = 0;
};

struct Box2d {
    double lo0, lo1, hi0, hi1;
    double area() const { return (hi0 - lo0) * (hi1 - lo1); }
};

// Disjoint boxes covering the region dominated by the front inside the
// reference box; their areas sum to the 2-D hypervolume.
std::vector<Box2d> pareto_boxes(const ParetoFront& front, const std::array<double, 2>& ref_point);

// Exact single-candidate EHVI for two objectives with independent Gaussian
// posteriors (closed form over the staircase strip decomposition).
double ehvi(const GpModel& model_under, const GpModel& model_over, const Eigen::VectorXd& x,
            const ParetoFront& front, const std::array<double, 2>& ref_point);

// Monte-Carlo qEHVI over a candidate batch (rows of X_batch); the q = 1
// case is the test oracle for the closed form.
double mc_qehvi(const GpModel& model_under, const GpModel& model_over,
                const Eigen::MatrixXd& X_batch, const ParetoFront& front,
                const std::array<double, 2>& ref_point, int n_samples, std::uint64_t seed);

// Quasi-random raw samples, top-10 refinement by coordinate pattern search.
Eigen::VectorXd optimize_acquisition(const GpModel& model_under, const GpModel& model_over,
                                     const ParetoFront& front,
                                     const std::array<double, 2>& ref_point, int dimension,
                                     std::uint64_t seed);

BoState bo_loop(const CoverageTensor& tensor, const Thresholds& thresholds, BoBudget budget,
                std::uint64_t seed);

}  // namespace cco
