#include "hiker/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace hiker {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }
double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                               0.8650633666889845, 0.9739065285171717};
constexpr double kGlWeight[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                 0.1494513491505806, 0.0666713443086881};

void check_table(const RankTable& table) {
    if (table.k() < 2) throw std::invalid_argument("rank table needs k >= 2 treatments");
    if (table.blocks() < 2) throw std::invalid_argument("rank table needs >= 2 blocks");
    for (const auto& row : table.ranks)
        if (static_cast<int>(row.size()) != table.k())
            throw std::invalid_argument("rank table row length mismatch");
}

}  // namespace

std::vector<double> average_ranks(const std::vector<double>& metrics) {
    const int k = static_cast<int>(metrics.size());
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return metrics[a] < metrics[b]; });

    std::vector<double> ranks(k);
    int i = 0;
    while (i < k) {
        int j = i;
        while (j + 1 < k && metrics[order[j + 1]] == metrics[order[i]]) ++j;
        const double avg = 0.5 * (i + j) + 1.0;  // mean of ranks i+1 .. j+1
        for (int t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

FriedmanResult friedman_test(const RankTable& table) {
    check_table(table);
    const int k = table.k();
    const int n = table.blocks();

    std::vector<double> column_sums(k, 0.0);
    double tie_term = 0.0;  // sum over blocks of (t^3 - t) per tie group
    for (const auto& row : table.ranks) {
        for (int j = 0; j < k; ++j) column_sums[j] += row[j];

        std::vector<double> sorted(row);
        std::sort(sorted.begin(), sorted.end());
        int i = 0;
        while (i < k) {
            int j = i;
            while (j + 1 < k && sorted[j + 1] == sorted[i]) ++j;
            const double t = j - i + 1;
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }

    double ssbn = 0.0;
    for (double s : column_sums) ssbn += s * s;

    const double correction = 1.0 - tie_term / (static_cast<double>(k) * (k * k - 1) * n);
    FriedmanResult out;
    if (correction <= 0.0) return out;  // every block fully tied
    out.statistic =
        (12.0 / (static_cast<double>(k) * n * (k + 1)) * ssbn - 3.0 * n * (k + 1)) / correction;
    if (out.statistic < 0.0) out.statistic = 0.0;
    out.p_value = chi_square_sf(out.statistic, k - 1);
    return out;
}

double chi_square_sf(double x, int df) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double studentized_range_sf(double q, int k) {
    if (k < 2) throw std::invalid_argument("studentized range needs k >= 2");
    if (q <= 0.0) return 1.0;

    // 1 - F(q) = k * int phi(u) Phi(u-q) sum_{i=0}^{k-2} Phi(u)^i (Phi(u)-Phi(u-q))^{k-2-i} du,
    // the factored form of k * int phi(u) [Phi(u)^{k-1} - (Phi(u)-Phi(u-q))^{k-1}] du,
    // which keeps small tail values accurate.
    auto integrand = [&](double u) {
        const double a = normal_cdf(u);
        const double b = normal_cdf(u - q);
        const double diff = a - b;
        double series = 0.0;
        double a_pow = 1.0;
        for (int i = 0; i <= k - 2; ++i) {
            series += a_pow * std::pow(diff, k - 2 - i);
            a_pow *= a;
        }
        return normal_pdf(u) * b * series;
    };

    const double lo = -9.0;
    const double hi = q + 9.0;
    const int panels = static_cast<int>(std::ceil((hi - lo) / 0.5));
    const double h = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        const double half = 0.5 * h;
        for (int g = 0; g < 5; ++g) {
            total += kGlWeight[g] *
                     (integrand(mid - half * kGlNode[g]) + integrand(mid + half * kGlNode[g]));
        }
    }
    total *= 0.5 * h * k;
    return std::clamp(total, 0.0, 1.0);
}

NemenyiResult nemenyi_posthoc(const RankTable& table, const std::vector<double>& levels) {
    check_table(table);
    const int k = table.k();
    const int n = table.blocks();

    NemenyiResult out;
    out.mean_ranks.assign(k, 0.0);
    for (const auto& row : table.ranks)
        for (int j = 0; j < k; ++j) out.mean_ranks[j] += row[j];
    for (double& m : out.mean_ranks) m /= n;

    std::vector<double> sorted_levels(levels);
    std::sort(sorted_levels.begin(), sorted_levels.end());

    const double scale = std::sqrt(static_cast<double>(k) * (k + 1) / (6.0 * n));
    out.p_values = Eigen::MatrixXd::Ones(k, k);
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            const double q = std::abs(out.mean_ranks[a] - out.mean_ranks[b]) / scale;
            const double p = studentized_range_sf(q * kSqrt2, k);
            out.p_values(a, b) = p;
            out.p_values(b, a) = p;

            for (double level : sorted_levels) {
                if (p <= level) {
                    const bool a_better = out.mean_ranks[a] <= out.mean_ranks[b];
                    out.edges.push_back({a_better ? a : b, a_better ? b : a, level});
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace hiker
