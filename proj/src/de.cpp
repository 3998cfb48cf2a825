#include <algorithm>
#include <stdexcept>
#include <vector>

#include "hiker/optim.hpp"

namespace hiker {

DEResult de_minimize(const BoxProblem& problem, const DEConfig& config, Rng& rng) {
    const int d = static_cast<int>(problem.lower.size());
    if (d < 1 || problem.upper.size() != d)
        throw std::invalid_argument("de_minimize: bad bounds");

    const int np = config.population > 0 ? config.population : 10 * d;
    if (np < 4) throw std::invalid_argument("de_minimize: population must be >= 4");

    auto clip = [&](Eigen::VectorXd& x) {
        for (int i = 0; i < d; ++i) {
            if (x[i] < problem.lower[i]) x[i] = problem.lower[i];
            if (x[i] > problem.upper[i]) x[i] = problem.upper[i];
        }
    };

    std::vector<Eigen::VectorXd> pop(np);
    std::vector<double> fitness(np);
    int best = 0;
    for (int i = 0; i < np; ++i) {
        pop[i].resize(d);
        for (int j = 0; j < d; ++j) pop[i][j] = rng.uniform(problem.lower[j], problem.upper[j]);
        fitness[i] = problem.objective(pop[i]);
        if (fitness[i] < fitness[best]) best = i;
    }

    const int rounds = std::max(1, problem.budget / np);  // initial round included
    Eigen::VectorXd trial(d);
    for (int g = 1; g < rounds; ++g) {
        for (int i = 0; i < np; ++i) {
            int r1, r2, r3;
            do { r1 = rng.uniform_int(np); } while (r1 == i);
            do { r2 = rng.uniform_int(np); } while (r2 == i || r2 == r1);
            do { r3 = rng.uniform_int(np); } while (r3 == i || r3 == r1 || r3 == r2);

            const int j_rand = rng.uniform_int(d);
            for (int j = 0; j < d; ++j) {
                if (j == j_rand || rng.uniform01() < config.crossover)
                    trial[j] = pop[r1][j] + config.weight * (pop[r2][j] - pop[r3][j]);
                else
                    trial[j] = pop[i][j];
            }
            clip(trial);

            const double f_trial = problem.objective(trial);
            if (f_trial <= fitness[i]) {
                pop[i] = trial;
                fitness[i] = f_trial;
                if (f_trial < fitness[best]) best = i;
            }
        }
    }

    return DEResult{pop[best], fitness[best]};
}

}  // namespace hiker
