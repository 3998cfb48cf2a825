#include "hiker/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace hiker {
namespace {

constexpr double kPi = 3.14159265358979323846;

double default_distance(const Dimension& dim, const Value& a, const Value& b) {
    if (dim.is_numeric()) {
        const double diff = std::get<double>(a) - std::get<double>(b);
        return diff * diff;
    }
    return std::get<int>(a) == std::get<int>(b) ? 0.0 : 1.0;
}

// Arc distance, squared embedding: theta * |g(x) - g(x')|^2 with g mapping
// active values onto the unit circle and inactive ones to the origin.
double arc_distance(const KernelParams& p, int i, const Point& x, const Point& xp, bool a,
                    bool ap, const Dimension& dim) {
    if (!dim.is_numeric())
        throw std::domain_error("Arc kernel does not support categorical dimensions");
    if (!a && !ap) return 0.0;
    if (a != ap) return p.theta[i];
    const auto& r = dim.range();
    const double frac = (x.num(i) - xp.num(i)) / (r.upper - r.lower);
    return p.theta[i] * (2.0 - 2.0 * std::cos(kPi * p.rho_arc[i] * frac));
}

double ico_distance(const KernelParams& p, int i, const Point& x, const Point& xp, bool a,
                    bool ap, const Dimension& dim) {
    if (!a && !ap) return 0.0;
    if (a != ap) return p.rho_ico[i];
    return p.theta[i] * default_distance(dim, x.values[i], xp.values[i]);
}

Value imputed_value(const KernelParams& p, int i, const Dimension& dim) {
    if (dim.is_numeric()) return p.rho_imp[i];
    // Level code; level_count() is the synthetic level matching nothing.
    return static_cast<int>(std::lround(p.rho_imp[i]));
}

double imp_distance(const KernelParams& p, int i, const Point& x, const Point& xp, bool a,
                    bool ap, const Dimension& dim) {
    if (!a && !ap) return 0.0;
    if (a == ap) return p.theta[i] * default_distance(dim, x.values[i], xp.values[i]);
    const Value rho = imputed_value(p, i, dim);
    const Value& active = a ? x.values[i] : xp.values[i];
    return p.theta[i] * default_distance(dim, active, rho);
}

}  // namespace

const char* kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::Stan: return "stan";
        case KernelKind::Arc: return "arc";
        case KernelKind::Ico: return "ico";
        case KernelKind::IcoCorrected: return "icocor";
        case KernelKind::Imp: return "imp";
        case KernelKind::ImpArc: return "imparc";
    }
    return "?";
}

KernelKind kernel_from_name(const std::string& name) {
    for (KernelKind k : all_kernel_kinds())
        if (name == kernel_name(k)) return k;
    throw std::invalid_argument("unknown kernel name: " + name);
}

std::vector<KernelKind> all_kernel_kinds() {
    return {KernelKind::Stan,         KernelKind::Arc, KernelKind::Ico,
            KernelKind::IcoCorrected, KernelKind::Imp, KernelKind::ImpArc};
}

KernelParams KernelParams::defaults(int d) {
    KernelParams p;
    p.theta = Eigen::VectorXd::Ones(d);
    p.rho_arc = Eigen::VectorXd::Constant(d, 0.5);
    p.rho_ico = Eigen::VectorXd::Ones(d);
    p.rho_imp = Eigen::VectorXd::Zero(d);
    p.beta1 = Eigen::VectorXd::Ones(d);
    p.beta2 = Eigen::VectorXd::Ones(d);
    p.eta = 1e-6;
    return p;
}

double dim_distance(KernelKind kind, const KernelParams& params, int i, const Point& x,
                    const Point& xp, const std::vector<char>& act, const std::vector<char>& actp,
                    const Dimension& dim) {
    const bool a = act[i] != 0;
    const bool ap = actp[i] != 0;
    switch (kind) {
        case KernelKind::Stan:
            return params.theta[i] * default_distance(dim, x.values[i], xp.values[i]);
        case KernelKind::Arc:
            return arc_distance(params, i, x, xp, a, ap, dim);
        case KernelKind::Ico:
        case KernelKind::IcoCorrected:
            return ico_distance(params, i, x, xp, a, ap, dim);
        case KernelKind::Imp:
            return imp_distance(params, i, x, xp, a, ap, dim);
        case KernelKind::ImpArc:
            return params.beta1[i] * arc_distance(params, i, x, xp, a, ap, dim) +
                   params.beta2[i] * imp_distance(params, i, x, xp, a, ap, dim);
    }
    return 0.0;
}

double kernel_eval(KernelKind kind, const KernelParams& params, const SearchSpace& space,
                   const Point& x, const Point& xp) {
    const auto act = space.activity(x);
    const auto actp = space.activity(xp);
    double total = 0.0;
    for (int i = 0; i < space.size(); ++i)
        total += dim_distance(kind, params, i, x, xp, act, actp, space.dim(i));
    return std::exp(-total);
}

CorrelationMatrix kernel_matrix(KernelKind kind, const KernelParams& params,
                                const SearchSpace& space, const std::vector<Point>& X) {
    const int n = static_cast<int>(X.size());
    if (n < 1) throw std::invalid_argument("kernel_matrix needs at least one point");

    std::vector<std::vector<char>> act(n);
    for (int a = 0; a < n; ++a) act[a] = space.activity(X[a]);

    CorrelationMatrix out;
    out.values.setOnes(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            double total = 0.0;
            for (int i = 0; i < space.size(); ++i)
                total += dim_distance(kind, params, i, X[a], X[b], act[a], act[b], space.dim(i));
            const double k = std::exp(-total);
            out.values(a, b) = k;
            out.values(b, a) = k;
        }
    }

    if (kind == KernelKind::IcoCorrected) {
        out.values = spectrum_flip(out.values);
        out.flipped = true;
    }
    out.values.diagonal().array() += params.eta;
    out.nugget_added = true;
    return out;
}

Eigen::VectorXd cross_kernel(KernelKind kind, const KernelParams& params,
                             const SearchSpace& space, const std::vector<Point>& X,
                             const Point& x) {
    const int n = static_cast<int>(X.size());
    Eigen::VectorXd k(n);
    const auto actx = space.activity(x);
    for (int a = 0; a < n; ++a) {
        const auto acta = space.activity(X[a]);
        double total = 0.0;
        for (int i = 0; i < space.size(); ++i)
            total += dim_distance(kind, params, i, X[a], x, acta, actx, space.dim(i));
        k[a] = std::exp(-total);
    }
    return k;
}

Eigen::MatrixXd spectrum_flip(const Eigen::MatrixXd& K) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("spectrum_flip: eigendecomposition failed");
    return eig.eigenvectors() * eig.eigenvalues().cwiseAbs().asDiagonal() *
           eig.eigenvectors().transpose();
}

std::vector<ParamBound> param_bounds(KernelKind kind, const SearchSpace& space) {
    const int d = space.size();
    std::vector<ParamBound> bounds;

    auto theta = [&](int i) {
        bounds.push_back({"theta_" + space.dim(i).name, 1e-4, 1e2, true, false});
    };
    auto arc_rho = [&](int i) {
        bounds.push_back({"rho_arc_" + space.dim(i).name, 0.0, 1.0, false, false});
    };
    auto ico_rho = [&](int i) {
        bounds.push_back({"rho_ico_" + space.dim(i).name, 1e-4, 1e2, true, false});
    };
    auto imp_rho = [&](int i) {
        const auto& dim = space.dim(i);
        if (dim.is_numeric()) {
            const double width = dim.range().upper - dim.range().lower;
            const double a = 2.0 * width;
            bounds.push_back(
                {"rho_imp_" + dim.name, dim.range().lower - a, dim.range().upper + a, false, false});
        } else {
            // Integer level code; level_count() is the synthetic extra level.
            bounds.push_back(
                {"rho_imp_" + dim.name, 0.0, static_cast<double>(dim.level_count()), false, true});
        }
    };

    switch (kind) {
        case KernelKind::Stan:
            for (int i = 0; i < d; ++i) theta(i);
            break;
        case KernelKind::Arc:
            for (int i = 0; i < d; ++i) theta(i);
            for (int i = 0; i < d; ++i) arc_rho(i);
            break;
        case KernelKind::Ico:
        case KernelKind::IcoCorrected:
            for (int i = 0; i < d; ++i) theta(i);
            // The mismatch distance only exists for dimensions that can be
            // inactive.
            for (int i = 0; i < d; ++i)
                if (space.has_rule(i)) ico_rho(i);
            break;
        case KernelKind::Imp:
            for (int i = 0; i < d; ++i) theta(i);
            for (int i = 0; i < d; ++i)
                if (space.has_rule(i)) imp_rho(i);
            break;
        case KernelKind::ImpArc:
            // theta is fixed to 1; the beta weights carry the scales.
            for (int i = 0; i < d; ++i) arc_rho(i);
            for (int i = 0; i < d; ++i)
                if (space.has_rule(i)) imp_rho(i);
            for (int i = 0; i < d; ++i)
                bounds.push_back({"beta1_" + space.dim(i).name, 1e-4, 1e2, true, false});
            for (int i = 0; i < d; ++i)
                bounds.push_back({"beta2_" + space.dim(i).name, 1e-4, 1e2, true, false});
            break;
    }
    bounds.push_back({"eta", 1e-8, 1e-2, true, false});
    return bounds;
}

KernelParams params_from_vector(KernelKind kind, const SearchSpace& space,
                                const Eigen::VectorXd& v) {
    const int d = space.size();
    KernelParams p = KernelParams::defaults(d);
    int at = 0;
    auto next = [&]() { return v[at++]; };

    switch (kind) {
        case KernelKind::Stan:
            for (int i = 0; i < d; ++i) p.theta[i] = next();
            break;
        case KernelKind::Arc:
            for (int i = 0; i < d; ++i) p.theta[i] = next();
            for (int i = 0; i < d; ++i) p.rho_arc[i] = next();
            break;
        case KernelKind::Ico:
        case KernelKind::IcoCorrected:
            for (int i = 0; i < d; ++i) p.theta[i] = next();
            for (int i = 0; i < d; ++i)
                if (space.has_rule(i)) p.rho_ico[i] = next();
            break;
        case KernelKind::Imp:
            for (int i = 0; i < d; ++i) p.theta[i] = next();
            for (int i = 0; i < d; ++i)
                if (space.has_rule(i)) p.rho_imp[i] = next();
            break;
        case KernelKind::ImpArc:
            p.theta.setOnes();
            for (int i = 0; i < d; ++i) p.rho_arc[i] = next();
            for (int i = 0; i < d; ++i)
                if (space.has_rule(i)) p.rho_imp[i] = next();
            for (int i = 0; i < d; ++i) p.beta1[i] = next();
            for (int i = 0; i < d; ++i) p.beta2[i] = next();
            break;
    }
    p.eta = next();
    if (at != v.size())
        throw std::invalid_argument("parameter vector length does not match param_bounds");
    return p;
}

}  // namespace hiker
