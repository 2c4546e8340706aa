#include "cco/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace cco {

AttachmentGrid attach(const RsrpStack& stack) {
    if (stack.n_sectors < 1) throw std::invalid_argument("attach: empty RSRP stack");
    AttachmentGrid g;
    g.rows = stack.rows;
    g.cols = stack.cols;
    const std::size_t n = stack.cell_count();
    g.serving.assign(n, 0);
    g.serving_rsrp_dbm.assign(stack.map(0), stack.map(0) + n);
    for (int s = 1; s < stack.n_sectors; ++s) {
        const double* m = stack.map(s);
        for (std::size_t i = 0; i < n; ++i) {
            if (m[i] > g.serving_rsrp_dbm[i]) {
                g.serving_rsrp_dbm[i] = m[i];
                g.serving[i] = s;
            }
        }
    }
    return g;
}

std::vector<double> interference_db(const RsrpStack& stack, const AttachmentGrid& attachment) {
    if (stack.n_sectors < 2)
        throw std::invalid_argument("interference_db: need at least two sectors");
    const std::size_t n = stack.cell_count();
    const double ln10_over_10 = 0.23025850929940456840;
    std::vector<double> linear_sum(n, 0.0);
    for (int s = 0; s < stack.n_sectors; ++s) {
        const double* m = stack.map(s);
        for (std::size_t i = 0; i < n; ++i)
            if (attachment.serving[i] != s) linear_sum[i] += std::exp(ln10_over_10 * m[i]);
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 10.0 * std::log10(linear_sum[i]);
    return out;
}

double under_coverage(const AttachmentGrid& attachment, const Thresholds& th) {
    double sum = 0.0;
    for (double r : attachment.serving_rsrp_dbm)
        sum += sigmoid((th.gamma_w_dbm - r) / th.sigmoid_temperature_db);
    return sum;
}

double over_coverage(const RsrpStack& stack, const AttachmentGrid& attachment,
                     const Thresholds& th) {
    std::vector<double> interf = interference_db(stack, attachment);
    double sum = 0.0;
    for (std::size_t i = 0; i < interf.size(); ++i)
        sum += sigmoid((interf[i] - attachment.serving_rsrp_dbm[i] + th.gamma_o_db) /
                       th.sigmoid_temperature_db);
    return sum;
}

std::pair<double, double> coverage_percentages(const RsrpStack& stack,
                                               const AttachmentGrid& attachment,
                                               const Thresholds& th) {
    std::vector<double> interf = interference_db(stack, attachment);
    const std::size_t n = attachment.cell_count();
    std::size_t under = 0, over = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (attachment.serving_rsrp_dbm[i] < th.gamma_w_dbm) ++under;
        if (interf[i] - attachment.serving_rsrp_dbm[i] + th.gamma_o_db > 0.0) ++over;
    }
    return {static_cast<double>(under) / n, static_cast<double>(over) / n};
}

double scalarize(const ObjectivePair& pair, double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("scalarize: lambda must lie in [0, 1]");
    return lambda * pair.under_cov + (1.0 - lambda) * pair.over_cov;
}

ObjectivePair evaluate(const Configuration& config, const CoverageTensor& tensor,
                       const Thresholds& th) {
    RsrpStack stack = apply_configuration(tensor, config);
    AttachmentGrid att = attach(stack);
    std::vector<double> interf = interference_db(stack, att);

    const std::size_t n = att.cell_count();
    ObjectivePair pair;
    std::size_t under = 0, over = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = att.serving_rsrp_dbm[i];
        double margin = interf[i] - r + th.gamma_o_db;
        pair.under_cov += sigmoid((th.gamma_w_dbm - r) / th.sigmoid_temperature_db);
        pair.over_cov += sigmoid(margin / th.sigmoid_temperature_db);
        if (r < th.gamma_w_dbm) ++under;
        if (margin > 0.0) ++over;
    }
    pair.under_pct = static_cast<double>(under) / n;
    pair.over_pct = static_cast<double>(over) / n;
    return pair;
}

}  // namespace cco
