#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace hiker {

// Blocked rank table: one row of within-block ranks per block, k treatments.
// Ties carry average ranks, so every row sums to k(k+1)/2.
struct RankTable {
    std::vector<std::string> treatments;
    std::vector<std::vector<double>> ranks;  // [block][treatment]

    int k() const { return static_cast<int>(treatments.size()); }
    int blocks() const { return static_cast<int>(ranks.size()); }
};

// Average ranks for one block of metrics; rank 1 is the smallest metric.
std::vector<double> average_ranks(const std::vector<double>& metrics);

struct FriedmanResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Friedman chi-square test with tie correction, p from the chi-square
// distribution with k-1 degrees of freedom.
FriedmanResult friedman_test(const RankTable& table);

struct SignificanceEdge {
    int from = 0;  // better mean rank
    int to = 0;    // worse mean rank
    double level = 0.0;
};

struct NemenyiResult {
    std::vector<double> mean_ranks;
    Eigen::MatrixXd p_values;  // symmetric, unit diagonal
    std::vector<SignificanceEdge> edges;
};

// All-pairs Nemenyi post-hoc test on mean-rank differences, using the
// studentized-range tail with infinite degrees of freedom. Each significant
// pair yields one edge at the smallest level it passes.
NemenyiResult nemenyi_posthoc(const RankTable& table,
                              const std::vector<double>& levels = {1e-12, 1e-6, 0.01, 0.1});

// Upper tail P(X >= x) of the chi-square distribution.
double chi_square_sf(double x, int df);

// Upper tail of the studentized range of k standard normals (infinite
// degrees of freedom).
double studentized_range_sf(double q, int k);

}  // namespace hiker
