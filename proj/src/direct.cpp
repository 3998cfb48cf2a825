#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hiker/optim.hpp"

namespace hiker {
namespace {

// Potential-optimality slack from Jones et al.
constexpr double kEpsilon = 1e-4;

struct Rect {
    Eigen::VectorXd center;   // unit-cube coordinates
    double f = 0.0;
    std::vector<int> levels;  // per-dimension trisection count, side = 3^-level
    double measure = 0.0;     // center-to-vertex distance
};

double rect_measure(const std::vector<int>& levels) {
    double s = 0.0;
    for (int k : levels) {
        const double side = std::pow(3.0, -k);
        s += side * side;
    }
    return 0.5 * std::sqrt(s);
}

}  // namespace

DirectResult direct_minimize(const BoxProblem& problem) {
    const int d = static_cast<int>(problem.lower.size());
    if (d < 1 || problem.upper.size() != d)
        throw std::invalid_argument("direct_minimize: bad bounds");
    for (int i = 0; i < d; ++i)
        if (!(problem.lower[i] < problem.upper[i]))
            throw std::invalid_argument("direct_minimize: lower must be < upper");

    const Eigen::VectorXd width = problem.upper - problem.lower;
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& u) {
        ++evals;
        const Eigen::VectorXd x = problem.lower + u.cwiseProduct(width);
        return problem.objective(x);
    };

    std::vector<Rect> rects;
    Rect root;
    root.center = Eigen::VectorXd::Constant(d, 0.5);
    root.levels.assign(d, 0);
    root.measure = rect_measure(root.levels);
    root.f = eval(root.center);
    rects.push_back(std::move(root));

    int best = 0;

    while (evals < problem.budget) {
        // Group rectangles by measure; keep the best-f representative of
        // each group.
        std::vector<int> order(rects.size());
        for (std::size_t i = 0; i < rects.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (rects[a].measure != rects[b].measure) return rects[a].measure < rects[b].measure;
            if (rects[a].f != rects[b].f) return rects[a].f < rects[b].f;
            return a < b;
        });

        std::vector<int> group_best;
        std::vector<double> group_d, group_f;
        for (int idx : order) {
            const Rect& r = rects[idx];
            if (!group_d.empty() && r.measure <= group_d.back() * (1.0 + 1e-12)) continue;
            group_best.push_back(idx);
            group_d.push_back(r.measure);
            group_f.push_back(r.f);
        }

        const double fmin = rects[best].f;
        std::vector<int> selected;
        for (std::size_t j = 0; j < group_best.size(); ++j) {
            // Slopes to smaller groups bound the rate constant from below,
            // slopes to larger ones from above.
            double lo = 0.0;
            for (std::size_t i = 0; i < j; ++i)
                lo = std::max(lo, (group_f[j] - group_f[i]) / (group_d[j] - group_d[i]));
            double hi = std::numeric_limits<double>::infinity();
            for (std::size_t i = j + 1; i < group_best.size(); ++i)
                hi = std::min(hi, (group_f[i] - group_f[j]) / (group_d[i] - group_d[j]));
            if (lo > hi) continue;
            if (std::isfinite(hi) &&
                group_f[j] - hi * group_d[j] > fmin - kEpsilon * std::abs(fmin))
                continue;
            selected.push_back(group_best[j]);
        }
        if (selected.empty()) selected.push_back(group_best.back());

        for (int idx : selected) {
            if (evals >= problem.budget) break;

            const Eigen::VectorXd center = rects[idx].center;
            std::vector<int> levels = rects[idx].levels;
            const int min_level = *std::min_element(levels.begin(), levels.end());
            const double delta = std::pow(3.0, -(min_level + 1));

            struct Child {
                int dim;
                double w;
                Eigen::VectorXd plus, minus;
                double f_plus, f_minus;
            };
            std::vector<Child> children;
            for (int i = 0; i < d; ++i) {
                if (levels[i] != min_level) continue;
                Child c;
                c.dim = i;
                c.plus = center;
                c.plus[i] += delta;
                c.minus = center;
                c.minus[i] -= delta;
                c.f_plus = eval(c.plus);
                c.f_minus = eval(c.minus);
                c.w = std::min(c.f_plus, c.f_minus);
                children.push_back(std::move(c));
            }
            std::sort(children.begin(), children.end(), [](const Child& a, const Child& b) {
                if (a.w != b.w) return a.w < b.w;
                return a.dim < b.dim;
            });

            // Split along the sampled dimensions in order of their best child
            // value; earlier splits leave larger boxes to better dimensions.
            for (const Child& c : children) {
                levels[c.dim] += 1;
                Rect hi, lo_r;
                hi.center = c.plus;
                hi.f = c.f_plus;
                hi.levels = levels;
                hi.measure = rect_measure(levels);
                lo_r.center = c.minus;
                lo_r.f = c.f_minus;
                lo_r.levels = levels;
                lo_r.measure = hi.measure;
                rects.push_back(std::move(hi));
                rects.push_back(std::move(lo_r));
                if (rects[rects.size() - 2].f < rects[best].f) best = static_cast<int>(rects.size()) - 2;
                if (rects[rects.size() - 1].f < rects[best].f) best = static_cast<int>(rects.size()) - 1;
            }
            rects[idx].levels = levels;
            rects[idx].measure = rect_measure(levels);
        }
    }

    DirectResult out;
    out.argmin = problem.lower + rects[best].center.cwiseProduct(width);
    out.value = rects[best].f;
    out.evaluations = evals;
    return out;
}

}  // namespace hiker
