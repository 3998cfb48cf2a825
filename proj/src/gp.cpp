#include "hiker/gp.hpp"

#include <cmath>
#include <limits>

#include "hiker/optim.hpp"

namespace hiker {
namespace {

// Large finite value for degenerate data so DIRECT still terminates.
constexpr double kDegenerateSentinel = 1e10;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool constant_observations(const Eigen::VectorXd& y) {
    return (y.array() == y[0]).all();
}

struct Concentrated {
    bool ok = false;
    double mu = 0.0;
    double sigma2 = 0.0;
    double log_det = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt;
};

Concentrated concentrate(const Eigen::MatrixXd& k_eta, const Eigen::VectorXd& y) {
    Concentrated c;
    c.llt.compute(k_eta);
    if (c.llt.info() != Eigen::Success) return c;

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(y.size());
    const Eigen::VectorXd kinv_y = c.llt.solve(y);
    const Eigen::VectorXd kinv_1 = c.llt.solve(ones);
    c.mu = ones.dot(kinv_y) / ones.dot(kinv_1);
    const Eigen::VectorXd r = y - c.mu * ones;
    c.sigma2 = r.dot(c.llt.solve(r)) / static_cast<double>(y.size());
    c.log_det = 2.0 * c.llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    c.ok = true;
    return c;
}

}  // namespace

double neg_concentrated_log_likelihood(const KernelParams& params, const std::vector<Point>& X,
                                       const Eigen::VectorXd& y, KernelKind kind,
                                       const SearchSpace& space) {
    if (!y.allFinite()) throw std::invalid_argument("observations must be finite");
    if (X.size() < 2 || y.size() != static_cast<Eigen::Index>(X.size()))
        throw std::invalid_argument("need n >= 2 matching points and observations");
    if (constant_observations(y)) return kDegenerateSentinel;

    const Eigen::MatrixXd k_eta = kernel_matrix(kind, params, space, X).values;
    const Concentrated c = concentrate(k_eta, y);
    if (!c.ok) return kInf;
    if (!(c.sigma2 > 0.0)) return kDegenerateSentinel;
    const double value = static_cast<double>(y.size()) * std::log(c.sigma2) + c.log_det;
    return std::isfinite(value) ? value : kInf;
}

KrigingModel::KrigingModel(SearchSpace space, std::vector<Point> X, Eigen::VectorXd y,
                           KernelKind kind, KernelParams params, bool use_reinterpolation)
    : space_(std::move(space)),
      X_(std::move(X)),
      y_(std::move(y)),
      kind_(kind),
      params_(std::move(params)),
      use_ri_(use_reinterpolation) {
    const int n = static_cast<int>(X_.size());
    if (n < 1 || y_.size() != n) throw std::invalid_argument("need matching points and observations");
    if (!y_.allFinite()) throw std::invalid_argument("observations must be finite");

    k_eta_ = kernel_matrix(kind_, params_, space_, X_).values;
    Eigen::LLT<Eigen::MatrixXd> llt(k_eta_);
    if (llt.info() != Eigen::Success)
        throw FitError("correlation matrix is not positive definite");

    if (n == 1) {
        // the concentrated formulas reduce to the observation itself
        mu_ = y_[0];
        alpha_ = Eigen::VectorXd::Zero(1);
        k_inv_ = llt.solve(Eigen::MatrixXd::Identity(1, 1));
        ri_core_ = k_inv_ - params_.eta * (k_inv_ * k_inv_);
        return;
    }

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd kinv_1 = llt.solve(ones);
    mu_ = ones.dot(llt.solve(y_)) / ones.dot(kinv_1);
    const Eigen::VectorXd r = y_ - mu_ * ones;
    alpha_ = llt.solve(r);
    sigma2_ = std::max(0.0, r.dot(alpha_) / n);

    k_inv_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
    // K_eta^-1 (K_eta - eta I) K_eta^-1, the re-interpolation core.
    ri_core_ = k_inv_ - params_.eta * (k_inv_ * k_inv_);
    sigma2_ri_ = std::max(0.0, r.dot(ri_core_ * r) / n);
}

double KrigingModel::predict_mean(const Point& x) const {
    const Eigen::VectorXd k = cross_kernel(kind_, params_, space_, X_, x);
    return mu_ + k.dot(alpha_);
}

double KrigingModel::predict_variance(const Point& x) const {
    const Eigen::VectorXd k = cross_kernel(kind_, params_, space_, X_, x);
    if (use_ri_) return std::max(0.0, sigma2_ri_ * (1.0 - k.dot(ri_core_ * k)));
    return std::max(0.0, sigma2_ * (1.0 - k.dot(k_inv_ * k)));
}

KrigingModel fit(const std::vector<Point>& X, const Eigen::VectorXd& y, KernelKind kind,
                 const SearchSpace& space, const FitConfig& config) {
    const auto bounds = param_bounds(kind, space);
    const int p = static_cast<int>(bounds.size());
    if (config.likelihood_budget < p + 1)
        throw std::invalid_argument("likelihood budget must be at least #params + 1");

    Eigen::VectorXd lo(p), hi(p);
    for (int j = 0; j < p; ++j) {
        lo[j] = bounds[j].log10_scale ? std::log10(bounds[j].lower) : bounds[j].lower;
        hi[j] = bounds[j].log10_scale ? std::log10(bounds[j].upper) : bounds[j].upper;
    }

    auto decode = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd raw(p);
        for (int j = 0; j < p; ++j) {
            double value = bounds[j].log10_scale ? std::pow(10.0, v[j]) : v[j];
            if (bounds[j].integer) value = std::round(value);
            raw[j] = value;
        }
        return params_from_vector(kind, space, raw);
    };

    BoxProblem problem;
    problem.lower = lo;
    problem.upper = hi;
    problem.budget = config.likelihood_budget;
    problem.objective = [&](const Eigen::VectorXd& v) {
        return neg_concentrated_log_likelihood(decode(v), X, y, kind, space);
    };

    const DirectResult res = direct_minimize(problem);
    if (std::isinf(res.value)) throw FitError("likelihood evaluation failed for every candidate");
    return KrigingModel(space, X, y, kind, decode(res.argmin), config.use_reinterpolation);
}

}  // namespace hiker
