#include "cco/mobo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cco/random.hpp"
#include "cco/sobol.hpp"

namespace cco {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }
double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// E[(u - Z)_+] for Z ~ N(mu, sd^2)
double expected_shortfall(double u, double mu, double sd) {
    if (sd <= 0.0) return std::max(u - mu, 0.0);
    double z = (u - mu) / sd;
    return (u - mu) * normal_cdf(z) + sd * normal_pdf(z);
}

// Strips of the NON-dominated region used by the EHVI integral: for
// Z1 in [a_i, b_i) the improvement in the second objective is capped at u_i.
struct EhviStrips {
    std::vector<double> a, b, u;
};

EhviStrips make_strips(const ParetoFront& front, const std::array<double, 2>& ref) {
    EhviStrips s;
    const std::size_t n = front.size();
    const double neg_inf = -std::numeric_limits<double>::infinity();
    s.a.push_back(neg_inf);
    s.u.push_back(ref[1]);
    for (std::size_t i = 0; i < n; ++i) {
        s.b.push_back(front.points[i][0]);
        s.a.push_back(front.points[i][0]);
        s.u.push_back(std::min(front.points[i][1], ref[1]));
    }
    s.b.push_back(ref[0]);
    return s;
}

double ehvi_from_posterior(const EhviStrips& s, double mu1, double sd1, double mu2, double sd2) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.a.size(); ++i) {
        double a = s.a[i], b = s.b[i], u = s.u[i];
        if (b <= a) continue;
        double e1;
        if (std::isinf(a)) {
            e1 = expected_shortfall(b, mu1, sd1);
        } else if (sd1 <= 0.0) {
            e1 = std::max(b - std::max(mu1, a), 0.0);
        } else {
            double ah = (a - mu1) / sd1, bh = (b - mu1) / sd1;
            e1 = (b - a) * normal_cdf(ah) +
                 (b - mu1) * (normal_cdf(bh) - normal_cdf(ah)) +
                 sd1 * (normal_pdf(bh) - normal_pdf(ah));
        }
        total += e1 * expected_shortfall(u, mu2, sd2);
    }
    return std::max(total, 0.0);
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::vector<Box2d> pareto_boxes(const ParetoFront& front,
                                const std::array<double, 2>& ref_point) {
    for (const auto& p : front.points)
        if (p[0] >= ref_point[0] || p[1] >= ref_point[1])
            throw std::invalid_argument("pareto_boxes: ref_point does not dominate the front");

    std::vector<Box2d> boxes;
    for (std::size_t i = 0; i < front.size(); ++i) {
        double right = (i + 1 < front.size()) ? front.points[i + 1][0] : ref_point[0];
        boxes.push_back({front.points[i][0], front.points[i][1], right, ref_point[1]});
    }
    return boxes;
}

double ehvi(const GpModel& model_under, const GpModel& model_over, const Eigen::VectorXd& x,
            const ParetoFront& front, const std::array<double, 2>& ref_point) {
    double m1, v1, m2, v2;
    model_under.posterior_point(x, m1, v1);
    model_over.posterior_point(x, m2, v2);
    EhviStrips strips = make_strips(front, ref_point);
    return ehvi_from_posterior(strips, m1, std::sqrt(v1), m2, std::sqrt(v2));
}

double mc_qehvi(const GpModel& model_under, const GpModel& model_over,
                const Eigen::MatrixXd& X_batch, const ParetoFront& front,
                const std::array<double, 2>& ref_point, int n_samples, std::uint64_t seed) {
    const Eigen::Index q = X_batch.rows();
    Eigen::VectorXd mu1, mu2;
    Eigen::MatrixXd c1, c2;
    model_under.posterior_joint(X_batch, mu1, c1);
    model_over.posterior_joint(X_batch, mu2, c2);

    auto chol = [](Eigen::MatrixXd c) {
        double jitter = 1e-12 + 1e-9 * c.diagonal().maxCoeff();
        c.diagonal().array() += jitter;
        return Eigen::LLT<Eigen::MatrixXd>(c).matrixL().toDenseMatrix();
    };
    Eigen::MatrixXd l1 = chol(c1), l2 = chol(c2);

    const double base_hv = hypervolume_2d(front, ref_point);
    Rng noise(mix_seed(seed, 0x511ull));

    double total = 0.0;
    Eigen::VectorXd e1(q), e2(q);
    for (int s = 0; s < n_samples; ++s) {
        for (Eigen::Index i = 0; i < q; ++i) e1[i] = noise.normal();
        for (Eigen::Index i = 0; i < q; ++i) e2[i] = noise.normal();
        Eigen::VectorXd z1 = mu1 + l1 * e1;
        Eigen::VectorXd z2 = mu2 + l2 * e2;

        std::vector<std::array<double, 2>> pts(front.points.begin(), front.points.end());
        for (Eigen::Index i = 0; i < q; ++i) pts.push_back({z1[i], z2[i]});
        double hv = hypervolume_2d(non_dominated(pts), ref_point);
        total += hv - base_hv;
    }
    return total / n_samples;
}

Eigen::VectorXd optimize_acquisition(const GpModel& model_under, const GpModel& model_over,
                                     const ParetoFront& front,
                                     const std::array<double, 2>& ref_point, int dimension,
                                     std::uint64_t seed) {
    const int kRawSamples = 1024;
    const int kTopK = 10;
    const int kPatternIters = 50;

    EhviStrips strips = make_strips(front, ref_point);
    auto score = [&](const Eigen::VectorXd& x) {
        double m1, v1, m2, v2;
        model_under.posterior_point(x, m1, v1);
        model_over.posterior_point(x, m2, v2);
        return ehvi_from_posterior(strips, m1, std::sqrt(v1), m2, std::sqrt(v2));
    };

    auto raw = sobol_points(kRawSamples, dimension, mix_seed(seed, 0xACC));
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(kRawSamples);
    for (int i = 0; i < kRawSamples; ++i)
        ranked.emplace_back(score(to_eigen(raw[i])), i);
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    Eigen::VectorXd best_x = to_eigen(raw[ranked[0].second]);
    double best_f = ranked[0].first;

    for (int t = 0; t < std::min(kTopK, kRawSamples); ++t) {
        Eigen::VectorXd x = to_eigen(raw[ranked[t].second]);
        double f = ranked[t].first;
        double step = 0.25;
        for (int it = 0; it < kPatternIters && step > 1e-6; ++it) {
            bool improved = false;
            for (int k = 0; k < dimension; ++k) {
                for (double dir : {+1.0, -1.0}) {
                    double old = x[k];
                    x[k] = std::clamp(old + dir * step, 0.0, 1.0);
                    double fk = score(x);
                    if (fk > f) {
                        f = fk;
                        improved = true;
                    } else {
                        x[k] = old;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        if (f > best_f) {
            best_f = f;
            best_x = x;
        }
    }
    return best_x;
}

BoState bo_loop(const CoverageTensor& tensor, const Thresholds& thresholds, BoBudget budget,
                std::uint64_t seed) {
    const int d = 2 * tensor.n_sectors;
    const double cells = static_cast<double>(tensor.grid.cell_count());

    BoState state;
    state.budget = budget;
    state.seed = seed;

    auto record = [&](const Configuration& c) {
        ObjectivePair pair = evaluate(c, tensor, thresholds);
        state.history.emplace_back(c, pair);
        return pair;
    };

    for (const auto& p : sobol_points(budget.n_init, d, mix_seed(seed, 0x1417)))
        record(decode_point(p));

    GpPriors priors;
    KernelHyperparams warm_under, warm_over;
    bool have_warm = false;

    for (int it = 0; it < budget.n_iterations; ++it) {
        const Eigen::Index n = static_cast<Eigen::Index>(state.history.size());
        Eigen::MatrixXd X(n, d);
        Eigen::VectorXd y_under(n), y_over(n);
        std::vector<std::array<double, 2>> pts(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto enc = encode_configuration(state.history[i].first);
            X.row(i) = to_eigen(enc).transpose();
            y_under[i] = state.history[i].second.under_cov / cells;
            y_over[i] = state.history[i].second.over_cov / cells;
            pts[i] = {y_under[i], y_over[i]};
        }

        int restarts = have_warm ? 2 : 8;
        const KernelHyperparams* wu = have_warm ? &warm_under : nullptr;
        const KernelHyperparams* wo = have_warm ? &warm_over : nullptr;
        GpModel mu = GpModel::fit_map(X, y_under, priors, restarts,
                                      mix_seed(seed, 1000 + it), wu);
        GpModel mo = GpModel::fit_map(X, y_over, priors, restarts,
                                      mix_seed(seed, 2000 + it), wo);
        warm_under = mu.hyperparams();
        warm_over = mo.hyperparams();
        have_warm = true;

        ParetoFront front = non_dominated(pts);
        Eigen::VectorXd x =
            optimize_acquisition(mu, mo, front, state.ref_point, d, mix_seed(seed, 3000 + it));
        record(decode_point(std::vector<double>(x.data(), x.data() + x.size())));
    }

    std::vector<std::array<double, 2>> pts;
    pts.reserve(state.history.size());
    for (const auto& h : state.history)
        pts.push_back({h.second.under_cov / cells, h.second.over_cov / cells});
    state.front = non_dominated(pts);
    return state;
}

}  // namespace cco
