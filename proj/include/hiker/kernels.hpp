#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "hiker/space.hpp"

namespace hiker {

// The six correlation-function variants. IcoCorrected shares Ico's distance
// and parameters and differs only by the spectrum-flip repair of the
// training matrix.
enum class KernelKind { Stan, Arc, Ico, IcoCorrected, Imp, ImpArc };

const char* kernel_name(KernelKind kind);
KernelKind kernel_from_name(const std::string& name);  // throws on unknown names
std::vector<KernelKind> all_kernel_kinds();

// Per-dimension kernel parameters. Every vector has length d; entries that a
// kind does not use are ignored.
//   theta    — scale of the per-dimension distance (all kinds; fixed to 1 in
//              ImpArc, where the beta weights carry the scale)
//   rho_arc  — Arc correlation-length fraction in [0,1]
//   rho_ico  — Ico mismatch distance in R+
//   rho_imp  — Imp imputed value; for categorical dimensions an integer level
//              code where level_count() codes the synthetic extra level
//   beta1/2  — ImpArc combination weights in R+
//   eta      — nugget added to the matrix diagonal
struct KernelParams {
    Eigen::VectorXd theta;
    Eigen::VectorXd rho_arc;
    Eigen::VectorXd rho_ico;
    Eigen::VectorXd rho_imp;
    Eigen::VectorXd beta1;
    Eigen::VectorXd beta2;
    double eta = 1e-6;

    static KernelParams defaults(int d);
};

// One coordinate of the MLE search box. Log-tagged coordinates are searched
// as log10(value); integer-tagged ones are rounded to the nearest integer
// after decoding (Imp's categorical level code).
struct ParamBound {
    std::string label;
    double lower = 0.0;
    double upper = 1.0;
    bool log10_scale = false;
    bool integer = false;
};

std::vector<ParamBound> param_bounds(KernelKind kind, const SearchSpace& space);

// Decodes an MLE search vector (one entry per param_bounds coordinate, in
// order, already inside the bounds) into a full parameter set.
KernelParams params_from_vector(KernelKind kind, const SearchSpace& space,
                                const Eigen::VectorXd& v);

// Per-dimension distance d_i(x_i, x_i') for the given kind. Activity vectors
// are the ones computed by SearchSpace::activity for x and x'.
double dim_distance(KernelKind kind, const KernelParams& params, int i, const Point& x,
                    const Point& xp, const std::vector<char>& act, const std::vector<char>& actp,
                    const Dimension& dim);

// k(x,x') = exp(-sum_i d_i(x_i, x_i')), in (0, 1].
double kernel_eval(KernelKind kind, const KernelParams& params, const SearchSpace& space,
                   const Point& x, const Point& xp);

struct CorrelationMatrix {
    Eigen::MatrixXd values;
    bool nugget_added = false;
    bool flipped = false;
};

// Pairwise training correlations. For IcoCorrected the spectrum flip is
// applied first, then the nugget goes on the diagonal.
CorrelationMatrix kernel_matrix(KernelKind kind, const KernelParams& params,
                                const SearchSpace& space, const std::vector<Point>& X);

// Correlations between the training set and one new point. Never repaired.
Eigen::VectorXd cross_kernel(KernelKind kind, const KernelParams& params,
                             const SearchSpace& space, const std::vector<Point>& X,
                             const Point& x);

// Replaces every eigenvalue by its absolute value: K = U |L| U^T.
Eigen::MatrixXd spectrum_flip(const Eigen::MatrixXd& K);

}  // namespace hiker
