#pragma once

#include <functional>

#include <Eigen/Core>

#include "hiker/rng.hpp"

namespace hiker {

// Box-constrained minimization problem. The objective must return a finite
// value or +inf as an infeasibility sentinel.
struct BoxProblem {
    std::function<double(const Eigen::VectorXd&)> objective;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    int budget = 200;
};

struct DirectResult {
    Eigen::VectorXd argmin;
    double value = 0.0;
    int evaluations = 0;
};

// Deterministic DIRECT (dividing rectangles) global minimizer. The budget is
// a soft cap: a started subdivision batch finishes, so the final count can
// exceed it by at most one batch of trisection children.
DirectResult direct_minimize(const BoxProblem& problem);

struct DEConfig {
    int population = 0;    // 0 means 10 * dimension
    double weight = 0.8;   // F
    double crossover = 0.5;  // CR
};

struct DEResult {
    Eigen::VectorXd argmin;
    double value = 0.0;
};

// Differential evolution, rand/1/bin, bound repair by clipping. The total
// number of objective calls is floor(budget / NP) * NP: one initial
// population round plus floor(budget / NP) - 1 generations.
DEResult de_minimize(const BoxProblem& problem, const DEConfig& config, Rng& rng);

}  // namespace hiker
