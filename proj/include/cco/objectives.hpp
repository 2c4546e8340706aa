#pragma once

#include <utility>
#include <vector>

#include "cco/configuration.hpp"
#include "cco/rfmap.hpp"

namespace cco {

struct Thresholds {
    double gamma_w_dbm = -110.0;       // under-coverage RSRP threshold
    double gamma_o_db = 6.0;           // over-coverage SIR margin
    double sigmoid_temperature_db = 1.0;
};

// Per-cell serving sector (argmax RSRP, lowest index on ties) and its RSRP.
struct AttachmentGrid {
    int rows = 0, cols = 0;
    std::vector<int> serving;
    std::vector<double> serving_rsrp_dbm;

    std::size_t cell_count() const {
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }
};

// Both objectives are minimized. under_cov / over_cov are the soft sigmoid
// sums; the percentages are the hard-threshold cell fractions used for
// reporting and rasters.
struct ObjectivePair {
    double under_cov = 0.0;
    double over_cov = 0.0;
    double under_pct = 0.0;
    double over_pct = 0.0;
};

AttachmentGrid attach(const RsrpStack& stack);

// Aggregate non-serving power per cell, summed in linear milliwatts and
// reported in dBm.
std::vector<double> interference_db(const RsrpStack& stack, const AttachmentGrid& attachment);

double under_coverage(const AttachmentGrid& attachment, const Thresholds& th);

double over_coverage(const RsrpStack& stack, const AttachmentGrid& attachment,
                     const Thresholds& th);

std::pair<double, double> coverage_percentages(const RsrpStack& stack,
                                               const AttachmentGrid& attachment,
                                               const Thresholds& th);

double scalarize(const ObjectivePair& pair, double lambda);

// The black box every optimizer calls: apply the configuration, attach,
// and score both objectives. Pure and deterministic.
ObjectivePair evaluate(const Configuration& config, const CoverageTensor& tensor,
                       const Thresholds& th);

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace cco
