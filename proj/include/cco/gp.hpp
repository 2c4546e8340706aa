#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace cco {

struct GpFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All hyperparameters live in log space, where the MAP search runs and the
// log-normal priors are Gaussian.
struct KernelHyperparams {
    Eigen::VectorXd log_lengthscales;
    double log_signal_variance = 0.0;
    double log_noise_variance = 0.0;

    Eigen::VectorXd lengthscales() const { return log_lengthscales.array().exp(); }
    double signal_variance() const { return std::exp(log_signal_variance); }
    double noise_variance() const { return std::exp(log_noise_variance); }
};

struct LogNormalPrior {
    double log_median = 0.0;
    double log_std = 1.0;

    double log_pdf(double z) const {
        double u = (z - log_median) / log_std;
        return -0.5 * u * u - std::log(log_std) - 0.9189385332046727;  // log sqrt(2*pi)
    }
    double dlog_pdf(double z) const { return -(z - log_median) / (log_std * log_std); }
};

struct GpPriors {
    LogNormalPrior lengthscale{std::log(0.3), 1.0};
    LogNormalPrior signal_variance{0.0, 1.0};
    LogNormalPrior noise_variance{std::log(1e-3), 1.0};
};

double matern52(const Eigen::VectorXd& x, const Eigen::VectorXd& xp,
                const Eigen::VectorXd& lengthscales, double signal_variance);

struct MllResult {
    double value = 0.0;
    Eigen::VectorXd grad;  // [log_lengthscales..., log_signal_var, log_noise_var]
};

// Log marginal likelihood of standardized targets with analytic gradient
// w.r.t. the log hyperparameters. Throws GpFitError if K + noise*I cannot
// be factorized even at the top of the jitter ladder.
MllResult log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const KernelHyperparams& hp);

// Matern-5/2 ARD surrogate. Inputs are expected in [0,1]^d; targets are
// standardized internally and de-standardized on prediction.
class GpModel {
public:
    // MAP fit: multi-start gradient ascent on MLL + log-prior. Deterministic
    // given seed. warm_start, when given, is used as an extra start.
    static GpModel fit_map(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const GpPriors& priors, int restarts, std::uint64_t seed,
                           const KernelHyperparams* warm_start = nullptr);

    // Build with fixed hyperparameters (no fitting). X may have zero rows,
    // in which case predictions are the prior.
    static GpModel with_hyperparams(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const KernelHyperparams& hp);

    void posterior(const Eigen::MatrixXd& Xstar, Eigen::VectorXd& mean,
                   Eigen::VectorXd& variance) const;
    void posterior_point(const Eigen::VectorXd& x, double& mean, double& variance) const;

    // joint predictive distribution over a batch of points
    void posterior_joint(const Eigen::MatrixXd& Xstar, Eigen::VectorXd& mean,
                         Eigen::MatrixXd& cov) const;

    const KernelHyperparams& hyperparams() const { return hp_; }
    Eigen::Index n_train() const { return X_.rows(); }
    double y_mean() const { return y_mean_; }
    double y_scale() const { return y_scale_; }

private:
    void factorize();

    Eigen::MatrixXd X_;
    Eigen::VectorXd y_std_;
    double y_mean_ = 0.0, y_scale_ = 1.0;
    KernelHyperparams hp_;
    Eigen::MatrixXd L_;      // lower Cholesky of K + noise*I (+ jitter)
    Eigen::VectorXd alpha_;  // (K + noise*I)^-1 y_std
};

}  // namespace cco
