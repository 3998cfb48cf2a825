#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hiker/kernels.hpp"
#include "hiker/space.hpp"

namespace hiker {

struct FitConfig {
    int likelihood_budget = 200;
    bool use_reinterpolation = true;
};

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Negated concentrated log-likelihood n*ln(sigma2) + ln det(K_eta) with the
// process mean and variance profiled out. Returns +inf when the
// nugget-augmented matrix cannot be factorized and a large finite sentinel
// for degenerate (constant-y) data.
double neg_concentrated_log_likelihood(const KernelParams& params, const std::vector<Point>& X,
                                       const Eigen::VectorXd& y, KernelKind kind,
                                       const SearchSpace& space);

// Kriging model with constant trend. Immutable once built; prediction is
// safe from concurrent threads.
class KrigingModel {
public:
    // Builds the model at fixed kernel parameters.
    KrigingModel(SearchSpace space, std::vector<Point> X, Eigen::VectorXd y, KernelKind kind,
                 KernelParams params, bool use_reinterpolation = true);

    double predict_mean(const Point& x) const;
    double predict_variance(const Point& x) const;

    const KernelParams& params() const { return params_; }
    KernelKind kind() const { return kind_; }
    double process_mean() const { return mu_; }
    double process_variance() const { return sigma2_; }
    double reinterpolation_variance() const { return sigma2_ri_; }
    const std::vector<Point>& training_points() const { return X_; }
    const Eigen::VectorXd& observations() const { return y_; }
    const Eigen::MatrixXd& correlation() const { return k_eta_; }

private:
    SearchSpace space_;
    std::vector<Point> X_;
    Eigen::VectorXd y_;
    KernelKind kind_;
    KernelParams params_;
    bool use_ri_;

    Eigen::MatrixXd k_eta_;     // nugget-augmented (and possibly flipped) matrix
    Eigen::MatrixXd k_inv_;
    Eigen::MatrixXd ri_core_;   // K_eta^-1 (K_eta - eta I) K_eta^-1
    Eigen::VectorXd alpha_;     // K_eta^-1 (y - 1 mu)
    double mu_ = 0.0;
    double sigma2_ = 0.0;
    double sigma2_ri_ = 0.0;
};

// MLE fit: DIRECT over param_bounds (log10 coordinates where tagged) within
// the likelihood budget. Throws FitError when no candidate factorizes.
KrigingModel fit(const std::vector<Point>& X, const Eigen::VectorXd& y, KernelKind kind,
                 const SearchSpace& space, const FitConfig& config = {});

}  // namespace hiker
