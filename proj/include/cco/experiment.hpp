#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cco/ddpg.hpp"
#include "cco/mobo.hpp"
#include "cco/objectives.hpp"
#include "cco/pareto.hpp"
#include "cco/rfmap.hpp"

namespace cco {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MethodConfig {
    std::string name = "random";       // random | bo | ddpg
    long budget = 164;                 // random: total evaluations
    int n_init = 64;                   // bo
    int n_iterations = 100;            // bo
    long iterations_per_lambda = 1000; // ddpg
    double lambda_stride = 0.1;        // ddpg (0.1 -> 11 runs)
};

struct OutputConfig {
    std::string environment = "environment.txt";
    std::string tensor = "coverage.tensor";
    std::string history = "history.csv";
    std::string front = "front.csv";
};

struct ExperimentConfig {
    LayoutConfig layout;
    std::uint64_t seed = 0;
    Thresholds thresholds;
    MethodConfig method;
    OutputConfig output;

    static ExperimentConfig from_file(const std::string& path);
};

void write_environment_file(const RadioEnvironment& env, const std::string& path);
RadioEnvironment read_environment_file(const std::string& path);

// One row per black-box evaluation; the same schema for every method.
struct HistoryRow {
    long iteration = 0;
    std::string method;
    std::optional<double> lambda;
    Configuration config;
    ObjectivePair pair;
};

std::vector<HistoryRow> random_search(const CoverageTensor& tensor, const Thresholds& th,
                                      long n, std::uint64_t seed);

// Dispatch on cfg.method; deterministic given (cfg, seed).
std::vector<HistoryRow> run_method(const ExperimentConfig& cfg, const CoverageTensor& tensor);

// Planned evaluation counts implied by a method config, used for budget
// accounting before (or without) running.
long planned_evaluations(const MethodConfig& method);

// history CSV with a cumulative-best hypervolume column over the
// cell-normalized objectives w.r.t. kDefaultRefPoint
void write_history_csv(const std::vector<HistoryRow>& rows, double cell_count,
                       const std::string& path);
void write_front_csv(const std::vector<HistoryRow>& rows, double cell_count,
                     const std::string& path);

struct HistoryFile {
    std::string path;
    std::vector<HistoryRow> rows;
    std::vector<double> hypervolume;  // cumulative column as stored
};
HistoryFile read_history_csv(const std::string& path);

ParetoFront front_of(const std::vector<HistoryRow>& rows, double cell_count);

// Hard-threshold classification raster, binary PGM: under-covered cells
// black, over-covered white, covered gray (a cell both under and over
// renders black).
void write_coverage_raster(const std::string& path, const CoverageTensor& tensor,
                           const Configuration& config, const Thresholds& th);

}  // namespace cco
