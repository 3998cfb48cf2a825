#pragma once

#include <functional>
#include <vector>

#include "hiker/gp.hpp"
#include "hiker/rng.hpp"
#include "hiker/space.hpp"

namespace hiker {

// Expected improvement of a normal predictive distribution below y_min.
// For sd = 0 this degenerates to max(y_min - mean, 0).
double expected_improvement(double mean, double sd, double y_min);

struct SmboConfig {
    int init_size = 3;
    int total_budget = 10;
    KernelKind kernel = KernelKind::Stan;
    FitConfig fit;
    int infill_budget = 10000;  // DE objective calls per iteration
};

struct SmboStep {
    Point point;
    double value = 0.0;
    int iteration = 0;
    bool initial = false;
    bool fallback = false;  // model fit failed, point drawn uniformly instead
};

struct SmboHistory {
    std::vector<SmboStep> steps;
    std::vector<double> best_so_far;

    double best_value() const { return best_so_far.back(); }
};

// Sequential model-based optimization: uniform random initialization, then
// fit-model / maximize-EI / evaluate until the budget is spent.
SmboHistory smbo_run(const std::function<double(const Point&)>& objective,
                     const SearchSpace& space, const SmboConfig& config, Rng& rng);

}  // namespace hiker
