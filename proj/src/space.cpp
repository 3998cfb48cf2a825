#include "hiker/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace hiker {

SearchSpace::SearchSpace(std::vector<Dimension> dimensions, std::vector<ActivityRule> rules)
    : dims_(std::move(dimensions)), rules_(std::move(rules)) {
    const int d = static_cast<int>(dims_.size());
    if (d == 0) throw std::invalid_argument("search space needs at least one dimension");

    std::unordered_set<std::string> names;
    for (const auto& dim : dims_) {
        if (!names.insert(dim.name).second)
            throw std::invalid_argument("duplicate dimension name: " + dim.name);
        if (dim.is_numeric()) {
            if (!(dim.range().lower < dim.range().upper))
                throw std::invalid_argument("numeric dimension needs lower < upper: " + dim.name);
        } else if (dim.level_count() < 2) {
            throw std::invalid_argument("categorical dimension needs >= 2 levels: " + dim.name);
        }
    }

    rule_index_.assign(d, -1);
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        const auto& rule = rules_[r];
        if (rule.target < 0 || rule.target >= d || rule.parent < 0 || rule.parent >= d)
            throw std::invalid_argument("activity rule references unknown dimension");
        if (rule.target == rule.parent)
            throw std::invalid_argument("activity rule must not reference its own target");
        if (rule_index_[rule.target] >= 0)
            throw std::invalid_argument("at most one activity rule per dimension");
        if (!dims_[rule.parent].is_numeric() && rule.active_levels.empty())
            throw std::invalid_argument("categorical rule needs a non-empty level set");
        rule_index_[rule.target] = static_cast<int>(r);
    }

    // Single-parent rules form a cycle only if following parents revisits a
    // dimension.
    for (int start = 0; start < d; ++start) {
        int steps = 0;
        int cur = start;
        while (rule_index_[cur] >= 0) {
            cur = rules_[rule_index_[cur]].parent;
            if (++steps > d) throw std::invalid_argument("activity rules form a cycle");
        }
    }
}

const ActivityRule* SearchSpace::rule_for(int i) const {
    return rule_index_[i] >= 0 ? &rules_[rule_index_[i]] : nullptr;
}

std::vector<char> SearchSpace::activity(const Point& x) const {
    std::vector<char> act(dims_.size(), 1);
    for (int i = 0; i < size(); ++i) {
        const ActivityRule* rule = rule_for(i);
        if (!rule) continue;
        bool on;
        if (dims_[rule->parent].is_numeric()) {
            const double v = x.num(rule->parent);
            on = rule->active_when_greater ? v > rule->threshold : v < rule->threshold;
        } else {
            const int lvl = x.cat(rule->parent);
            on = std::find(rule->active_levels.begin(), rule->active_levels.end(), lvl) !=
                 rule->active_levels.end();
        }
        act[i] = on ? 1 : 0;
    }
    return act;
}

void SearchSpace::validate(const Point& x) const {
    if (static_cast<int>(x.values.size()) != size())
        throw std::invalid_argument("point has wrong number of values");
    for (int i = 0; i < size(); ++i) {
        const auto& dim = dims_[i];
        if (dim.is_numeric()) {
            if (!std::holds_alternative<double>(x.values[i]))
                throw std::invalid_argument("expected numeric value in dimension " + dim.name);
            const double v = x.num(i);
            if (!(v >= dim.range().lower && v <= dim.range().upper))
                throw std::invalid_argument("value out of bounds in dimension " + dim.name);
        } else {
            if (!std::holds_alternative<int>(x.values[i]))
                throw std::invalid_argument("expected categorical value in dimension " + dim.name);
            const int v = x.cat(i);
            if (v < 0 || v >= dim.level_count())
                throw std::invalid_argument("unknown level in dimension " + dim.name);
        }
    }
}

Eigen::VectorXd SearchSpace::encode(const Point& x) const {
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i)
        v[i] = dims_[i].is_numeric() ? x.num(i) : static_cast<double>(x.cat(i));
    return v;
}

Point SearchSpace::decode(const Eigen::VectorXd& v) const {
    Point x;
    x.values.reserve(size());
    for (int i = 0; i < size(); ++i) {
        if (dims_[i].is_numeric()) {
            const auto& r = dims_[i].range();
            x.values.emplace_back(std::clamp(v[i], r.lower, r.upper));
        } else {
            int lvl = static_cast<int>(std::floor(v[i]));
            x.values.emplace_back(std::clamp(lvl, 0, dims_[i].level_count() - 1));
        }
    }
    return x;
}

Eigen::VectorXd SearchSpace::encoded_lower() const {
    Eigen::VectorXd lo(size());
    for (int i = 0; i < size(); ++i)
        lo[i] = dims_[i].is_numeric() ? dims_[i].range().lower : 0.0;
    return lo;
}

Eigen::VectorXd SearchSpace::encoded_upper() const {
    Eigen::VectorXd hi(size());
    for (int i = 0; i < size(); ++i)
        hi[i] = dims_[i].is_numeric() ? dims_[i].range().upper
                                      : static_cast<double>(dims_[i].level_count());
    return hi;
}

std::vector<Point> SearchSpace::sample_uniform(int n, Rng& rng) const {
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
    std::vector<Point> out;
    out.reserve(n);
    for (int s = 0; s < n; ++s) {
        Point x;
        x.values.reserve(size());
        for (int i = 0; i < size(); ++i) {
            if (dims_[i].is_numeric()) {
                const auto& r = dims_[i].range();
                x.values.emplace_back(rng.uniform(r.lower, r.upper));
            } else {
                x.values.emplace_back(rng.uniform_int(dims_[i].level_count()));
            }
        }
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<Point> SearchSpace::sample_lhs(int n, Rng& rng) const {
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
    std::vector<Point> out(n);
    for (auto& p : out) p.values.resize(size());

    std::vector<int> perm(n);
    for (int i = 0; i < size(); ++i) {
        if (dims_[i].is_numeric()) {
            // One draw per stratum, strata shuffled per dimension.
            std::iota(perm.begin(), perm.end(), 0);
            for (int j = n - 1; j > 0; --j)
                std::swap(perm[j], perm[rng.uniform_int(j + 1)]);
            const auto& r = dims_[i].range();
            const double w = (r.upper - r.lower) / n;
            for (int s = 0; s < n; ++s)
                out[s].values[i] = r.lower + (perm[s] + rng.uniform01()) * w;
        } else {
            for (int s = 0; s < n; ++s)
                out[s].values[i] = rng.uniform_int(dims_[i].level_count());
        }
    }
    return out;
}

SearchSpace make_benchmark_space(double c) {
    ActivityRule rule;
    rule.target = 1;
    rule.parent = 0;
    rule.threshold = c;
    rule.active_when_greater = true;
    return SearchSpace({numeric_dim("x1", 0.0, 1.0), numeric_dim("x2", 0.0, 1.0)}, {rule});
}

}  // namespace hiker
