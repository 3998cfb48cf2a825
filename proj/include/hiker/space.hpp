#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "hiker/rng.hpp"

namespace hiker {

// One coordinate of a point: a real for numeric dimensions, a level index
// for categorical ones.
using Value = std::variant<double, int>;

struct NumericRange {
    double lower = 0.0;
    double upper = 1.0;
};

struct CategoricalLevels {
    std::vector<std::string> levels;
};

// A single search-space dimension, either bounded numeric or categorical.
struct Dimension {
    std::string name;
    std::variant<NumericRange, CategoricalLevels> kind;

    bool is_numeric() const { return std::holds_alternative<NumericRange>(kind); }
    const NumericRange& range() const { return std::get<NumericRange>(kind); }
    const CategoricalLevels& cats() const { return std::get<CategoricalLevels>(kind); }
    int level_count() const { return static_cast<int>(cats().levels.size()); }
};

inline Dimension numeric_dim(std::string name, double lower, double upper) {
    return Dimension{std::move(name), NumericRange{lower, upper}};
}

inline Dimension categorical_dim(std::string name, std::vector<std::string> levels) {
    return Dimension{std::move(name), CategoricalLevels{std::move(levels)}};
}

// Activity predicate: dimension `target` is active iff the condition on the
// parent dimension's value holds. Exactly one condition form is used,
// depending on whether the parent is numeric or categorical.
struct ActivityRule {
    int target = -1;
    int parent = -1;
    // Numeric parent: active iff x_parent > threshold (or < when flipped).
    double threshold = 0.0;
    bool active_when_greater = true;
    // Categorical parent: active iff x_parent is one of these level indices.
    std::vector<int> active_levels;
};

struct Point {
    std::vector<Value> values;

    double num(int i) const { return std::get<double>(values[i]); }
    int cat(int i) const { return std::get<int>(values[i]); }
};

// Hierarchical search space: an ordered list of dimensions plus at most one
// activity rule per dimension. Immutable after construction.
class SearchSpace {
public:
    SearchSpace(std::vector<Dimension> dimensions, std::vector<ActivityRule> rules = {});

    int size() const { return static_cast<int>(dims_.size()); }
    const Dimension& dim(int i) const { return dims_[i]; }
    const std::vector<Dimension>& dimensions() const { return dims_; }
    const std::vector<ActivityRule>& rules() const { return rules_; }

    // Rule governing dimension i, if any.
    const ActivityRule* rule_for(int i) const;
    bool has_rule(int i) const { return rule_index_[i] >= 0; }

    // Per-dimension activity of x; true where no rule exists.
    std::vector<char> activity(const Point& x) const;

    // Throws std::invalid_argument when x violates the Point invariants.
    void validate(const Point& x) const;

    // Numeric encoding used by the box optimizers: numeric coordinates map
    // to themselves, categorical ones to the continuous interval [0, L).
    Eigen::VectorXd encode(const Point& x) const;
    Point decode(const Eigen::VectorXd& v) const;
    Eigen::VectorXd encoded_lower() const;
    Eigen::VectorXd encoded_upper() const;

    std::vector<Point> sample_uniform(int n, Rng& rng) const;
    std::vector<Point> sample_lhs(int n, Rng& rng) const;

private:
    std::vector<Dimension> dims_;
    std::vector<ActivityRule> rules_;
    std::vector<int> rule_index_;  // per dimension, -1 when always active
};

// The two-dimensional benchmark space on [0,1]^2: x2 is active iff x1 > c.
SearchSpace make_benchmark_space(double c);

}  // namespace hiker
