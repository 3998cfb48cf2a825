#include "hiker/smbo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "hiker/optim.hpp"

namespace hiker {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }
double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Proposals landing on an existing training point would make the
// correlation matrix singular; nudge them inside the box.
Point perturb_duplicates(const SearchSpace& space, const std::vector<Point>& X, Point cand,
                         Rng& rng) {
    auto is_duplicate = [&](const Point& p) {
        for (const Point& x : X) {
            bool same = true;
            for (int i = 0; i < space.size() && same; ++i) {
                if (space.dim(i).is_numeric())
                    same = std::abs(p.num(i) - x.num(i)) <= 1e-9;
                else
                    same = p.cat(i) == x.cat(i);
            }
            if (same) return true;
        }
        return false;
    };

    for (int attempt = 0; attempt < 100 && is_duplicate(cand); ++attempt) {
        for (int i = 0; i < space.size(); ++i) {
            if (!space.dim(i).is_numeric()) continue;
            const auto& r = space.dim(i).range();
            const double v = cand.num(i) + rng.uniform(-1e-3, 1e-3);
            cand.values[i] = std::clamp(v, r.lower, r.upper);
        }
    }
    return cand;
}

}  // namespace

double expected_improvement(double mean, double sd, double y_min) {
    if (sd < 0.0) throw std::invalid_argument("expected_improvement: sd must be >= 0");
    const double gap = y_min - mean;
    if (sd == 0.0) return std::max(gap, 0.0);
    const double u = gap / sd;
    return gap * normal_cdf(u) + sd * normal_pdf(u);
}

SmboHistory smbo_run(const std::function<double(const Point&)>& objective,
                     const SearchSpace& space, const SmboConfig& config, Rng& rng) {
    if (config.init_size < 1 || config.init_size >= config.total_budget + 1)
        throw std::invalid_argument("smbo_run: need 1 <= init_size <= total_budget");

    SmboHistory hist;
    auto record = [&](Point p, int iteration, bool initial, bool fallback) {
        const double value = objective(p);
        const double best =
            hist.best_so_far.empty() ? value : std::min(value, hist.best_so_far.back());
        hist.steps.push_back({std::move(p), value, iteration, initial, fallback});
        hist.best_so_far.push_back(best);
    };

    for (Point& p : space.sample_uniform(config.init_size, rng))
        record(std::move(p), 0, true, false);

    std::vector<Point> X;
    Eigen::VectorXd y;
    for (int iter = 1; static_cast<int>(hist.steps.size()) < config.total_budget; ++iter) {
        X.clear();
        y.resize(hist.steps.size());
        for (std::size_t i = 0; i < hist.steps.size(); ++i) {
            X.push_back(hist.steps[i].point);
            y[static_cast<Eigen::Index>(i)] = hist.steps[i].value;
        }

        std::unique_ptr<KrigingModel> model;
        try {
            model = std::make_unique<KrigingModel>(
                fit(X, y, config.kernel, space, config.fit));
        } catch (const FitError&) {
            record(space.sample_uniform(1, rng)[0], iter, false, true);
            continue;
        }

        const double y_min = hist.best_so_far.back();
        BoxProblem problem;
        problem.lower = space.encoded_lower();
        problem.upper = space.encoded_upper();
        problem.budget = config.infill_budget;
        problem.objective = [&](const Eigen::VectorXd& v) {
            const Point p = space.decode(v);
            return -expected_improvement(model->predict_mean(p),
                                         std::sqrt(model->predict_variance(p)), y_min);
        };

        const DEResult best = de_minimize(problem, DEConfig{}, rng);
        record(perturb_duplicates(space, X, space.decode(best.argmin), rng), iter, false, false);
    }
    return hist;
}

}  // namespace hiker
