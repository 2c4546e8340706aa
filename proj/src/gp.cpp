#include "cco/gp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "cco/random.hpp"

namespace cco {

namespace {

constexpr double kSqrt5 = 2.2360679774997896964091736687747;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kJitterLadder[] = {0.0, 1e-8, 1e-6, 1e-4};

// K (noise-free) and the shared gradient factor
// G = sig * exp(-sqrt5 r) * (5/3) * (1 + sqrt5 r), where dK/dlog(l_k) = G .* S_k
// with S_k the squared scaled per-dimension differences.
void build_kernel(const Eigen::MatrixXd& Xs, double sig, Eigen::MatrixXd& K,
                  Eigen::MatrixXd* G) {
    const Eigen::Index n = Xs.rows();
    K.resize(n, n);
    if (G) G->resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = sig;
        if (G) (*G)(i, i) = sig * 5.0 / 3.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            double r = (Xs.row(i) - Xs.row(j)).norm();
            double e = std::exp(-kSqrt5 * r);
            double k = sig * (1.0 + kSqrt5 * r + 5.0 * r * r / 3.0) * e;
            K(i, j) = K(j, i) = k;
            if (G) {
                double g = sig * e * (5.0 / 3.0) * (1.0 + kSqrt5 * r);
                (*G)(i, j) = (*G)(j, i) = g;
            }
        }
    }
}

Eigen::LLT<Eigen::MatrixXd> factorize_with_jitter(const Eigen::MatrixXd& K, double noise,
                                                  double sig) {
    Eigen::MatrixXd A = K;
    A.diagonal().array() += noise;
    for (double j : kJitterLadder) {
        Eigen::MatrixXd B = A;
        B.diagonal().array() += j * sig;
        Eigen::LLT<Eigen::MatrixXd> llt(B);
        if (llt.info() == Eigen::Success) return llt;
    }
    throw GpFitError("kernel matrix not positive definite at maximum jitter");
}

}  // namespace

double matern52(const Eigen::VectorXd& x, const Eigen::VectorXd& xp,
                const Eigen::VectorXd& lengthscales, double signal_variance) {
    double r2 = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        double d = (x[k] - xp[k]) / lengthscales[k];
        r2 += d * d;
    }
    double r = std::sqrt(r2);
    return signal_variance * (1.0 + kSqrt5 * r + 5.0 * r2 / 3.0) * std::exp(-kSqrt5 * r);
}

MllResult log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const KernelHyperparams& hp) {
    const Eigen::Index n = X.rows(), d = X.cols();
    const double sig = hp.signal_variance();
    const double noise = hp.noise_variance();
    Eigen::VectorXd ell = hp.lengthscales();
    Eigen::MatrixXd Xs = X * ell.cwiseInverse().asDiagonal();

    Eigen::MatrixXd K, G;
    build_kernel(Xs, sig, K, &G);
    Eigen::LLT<Eigen::MatrixXd> llt = factorize_with_jitter(K, noise, sig);

    Eigen::VectorXd alpha = llt.solve(y);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(llt.matrixLLT()(i, i));

    MllResult res;
    res.value = -0.5 * y.dot(alpha) - logdet - 0.5 * n * kLog2Pi;

    // W = alpha alpha^T - K^-1; grad_theta = 0.5 tr(W dK/dtheta)
    Eigen::MatrixXd Kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd W = alpha * alpha.transpose() - Kinv;

    res.grad.resize(d + 2);
    Eigen::MatrixXd H = W.cwiseProduct(G);
    Eigen::VectorXd h = H.rowwise().sum();
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::VectorXd a = Xs.col(k);
        // 0.5 * sum_ij H_ij (a_i - a_j)^2, H symmetric
        double s = a.cwiseProduct(a).dot(h) - a.dot(H * a);
        res.grad[k] = s;
    }
    res.grad[d] = 0.5 * W.cwiseProduct(K).sum();
    res.grad[d + 1] = 0.5 * noise * W.trace();
    return res;
}

namespace {

Eigen::VectorXd pack(const KernelHyperparams& hp) {
    Eigen::VectorXd z(hp.log_lengthscales.size() + 2);
    z.head(hp.log_lengthscales.size()) = hp.log_lengthscales;
    z[z.size() - 2] = hp.log_signal_variance;
    z[z.size() - 1] = hp.log_noise_variance;
    return z;
}

KernelHyperparams unpack(const Eigen::VectorXd& z) {
    KernelHyperparams hp;
    hp.log_lengthscales = z.head(z.size() - 2);
    hp.log_signal_variance = z[z.size() - 2];
    hp.log_noise_variance = z[z.size() - 1];
    return hp;
}

struct MapObjective {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& y;
    const GpPriors& priors;

    double value_and_grad(const Eigen::VectorXd& z, Eigen::VectorXd& grad) const {
        const Eigen::Index d = z.size() - 2;
        MllResult mll = log_marginal_likelihood(X, y, unpack(z));
        double v = mll.value;
        grad = mll.grad;
        for (Eigen::Index k = 0; k < d; ++k) {
            v += priors.lengthscale.log_pdf(z[k]);
            grad[k] += priors.lengthscale.dlog_pdf(z[k]);
        }
        v += priors.signal_variance.log_pdf(z[d]);
        grad[d] += priors.signal_variance.dlog_pdf(z[d]);
        v += priors.noise_variance.log_pdf(z[d + 1]);
        grad[d + 1] += priors.noise_variance.dlog_pdf(z[d + 1]);
        return v;
    }
};

// gradient ascent with backtracking line search in log-hyperparameter space
bool ascend(const MapObjective& obj, Eigen::VectorXd& z, double& best_value) {
    constexpr int kMaxIters = 200;
    constexpr double kGradTol = 1e-6;

    Eigen::VectorXd grad, trial_grad;
    double f;
    try {
        f = obj.value_and_grad(z, grad);
    } catch (const GpFitError&) {
        return false;
    }

    double step = 0.1;
    for (int it = 0; it < kMaxIters; ++it) {
        double gnorm = grad.norm();
        if (gnorm < kGradTol) break;
        bool accepted = false;
        while (step > 1e-12) {
            Eigen::VectorXd zt = z + step * grad;
            double ft;
            try {
                ft = obj.value_and_grad(zt, trial_grad);
            } catch (const GpFitError&) {
                step *= 0.5;
                continue;
            }
            if (ft > f + 1e-4 * step * gnorm * gnorm) {
                z = zt;
                f = ft;
                grad = trial_grad;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        step = std::min(step * 2.0, 1.0);
    }
    best_value = f;
    return true;
}

}  // namespace

GpModel GpModel::with_hyperparams(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const KernelHyperparams& hp) {
    GpModel m;
    m.X_ = X;
    m.hp_ = hp;
    if (y.size() > 0) {
        m.y_mean_ = y.mean();
        double var = (y.array() - m.y_mean_).square().sum() / y.size();
        m.y_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
        m.y_std_ = (y.array() - m.y_mean_) / m.y_scale_;
    }
    m.factorize();
    return m;
}

GpModel GpModel::fit_map(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const GpPriors& priors, int restarts, std::uint64_t seed,
                         const KernelHyperparams* warm_start) {
    if (X.rows() < 2) throw GpFitError("fit_map needs at least two observations");
    const Eigen::Index d = X.cols();

    double mean = y.mean();
    double var = (y.array() - mean).square().sum() / y.size();
    double scale = var > 1e-24 ? std::sqrt(var) : 1.0;
    Eigen::VectorXd ys = (y.array() - mean) / scale;

    MapObjective obj{X, ys, priors};
    Rng rng(mix_seed(seed, 0x6Full));

    bool any = false;
    double best = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_z;

    std::vector<Eigen::VectorXd> starts;
    if (warm_start) starts.push_back(pack(*warm_start));
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd z(d + 2);
        for (Eigen::Index k = 0; k < d; ++k)
            z[k] = priors.lengthscale.log_median + priors.lengthscale.log_std * rng.normal();
        z[d] = priors.signal_variance.log_median + priors.signal_variance.log_std * rng.normal();
        z[d + 1] = priors.noise_variance.log_median + priors.noise_variance.log_std * rng.normal();
        starts.push_back(z);
    }

    for (Eigen::VectorXd z : starts) {
        double f;
        if (!ascend(obj, z, f)) continue;
        if (!any || f > best) {
            any = true;
            best = f;
            best_z = z;
        }
    }
    if (!any) throw GpFitError("all MAP restarts failed to factorize");

    GpModel m;
    m.X_ = X;
    m.y_mean_ = mean;
    m.y_scale_ = scale;
    m.y_std_ = ys;
    m.hp_ = unpack(best_z);
    m.factorize();
    return m;
}

void GpModel::factorize() {
    if (X_.rows() == 0) return;
    Eigen::VectorXd ell = hp_.lengthscales();
    Eigen::MatrixXd Xs = X_ * ell.cwiseInverse().asDiagonal();
    Eigen::MatrixXd K;
    build_kernel(Xs, hp_.signal_variance(), K, nullptr);
    Eigen::LLT<Eigen::MatrixXd> llt =
        factorize_with_jitter(K, hp_.noise_variance(), hp_.signal_variance());
    L_ = llt.matrixL();
    alpha_ = llt.solve(y_std_);
}

void GpModel::posterior_point(const Eigen::VectorXd& x, double& mean, double& variance) const {
    const double sig = hp_.signal_variance();
    if (X_.rows() == 0) {
        mean = y_mean_;
        variance = sig * y_scale_ * y_scale_;
        return;
    }
    Eigen::VectorXd ell = hp_.lengthscales();
    Eigen::VectorXd ks(X_.rows());
    for (Eigen::Index i = 0; i < X_.rows(); ++i)
        ks[i] = matern52(x, X_.row(i).transpose(), ell, sig);
    double m = ks.dot(alpha_);
    Eigen::VectorXd v = L_.triangularView<Eigen::Lower>().solve(ks);
    double var = std::max(sig - v.squaredNorm(), 0.0);
    mean = y_mean_ + y_scale_ * m;
    variance = var * y_scale_ * y_scale_;
}

void GpModel::posterior_joint(const Eigen::MatrixXd& Xstar, Eigen::VectorXd& mean,
                              Eigen::MatrixXd& cov) const {
    const Eigen::Index q = Xstar.rows();
    const double sig = hp_.signal_variance();
    const double s2 = y_scale_ * y_scale_;
    Eigen::VectorXd ell = hp_.lengthscales();

    Eigen::MatrixXd Kss(q, q);
    for (Eigen::Index i = 0; i < q; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            double k = matern52(Xstar.row(i).transpose(), Xstar.row(j).transpose(), ell, sig);
            Kss(i, j) = Kss(j, i) = k;
        }

    if (X_.rows() == 0) {
        mean = Eigen::VectorXd::Constant(q, y_mean_);
        cov = s2 * Kss;
        return;
    }

    Eigen::MatrixXd Ks(X_.rows(), q);
    for (Eigen::Index i = 0; i < X_.rows(); ++i)
        for (Eigen::Index j = 0; j < q; ++j)
            Ks(i, j) = matern52(X_.row(i).transpose(), Xstar.row(j).transpose(), ell, sig);

    mean = (y_mean_ + (y_scale_ * (Ks.transpose() * alpha_)).array()).matrix();
    Eigen::MatrixXd V = L_.triangularView<Eigen::Lower>().solve(Ks);
    cov = s2 * (Kss - V.transpose() * V);
}

void GpModel::posterior(const Eigen::MatrixXd& Xstar, Eigen::VectorXd& mean,
                        Eigen::VectorXd& variance) const {
    mean.resize(Xstar.rows());
    variance.resize(Xstar.rows());
    for (Eigen::Index i = 0; i < Xstar.rows(); ++i)
        posterior_point(Xstar.row(i).transpose(), mean[i], variance[i]);
}

}  // namespace cco
