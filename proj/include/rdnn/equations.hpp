#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rdnn/autodiff.hpp"
#include "rdnn/common.hpp"

namespace rdnn {

using Eigen::RowVectorXd;

// Reaction-diffusion system dU^i/dt = D^i d2U^i/dx2 + F^i(U, t) with
// homogeneous Neumann walls on the components flagged in neumann_components.
struct EquationSpec {
    std::string name;
    int d_out = 1;
    VectorXd diffusion;  // D^i per component

    // F evaluated columnwise: U is d_out x N, t the matching time row.
    std::function<MatrixXd(const MatrixXd& U, const RowVectorXd& t)> reaction;
    // Vector-Jacobian product: returns (dF/dU)^T bar, columnwise.
    std::function<MatrixXd(const MatrixXd& U, const RowVectorXd& t, const MatrixXd& bar)>
        reaction_vjp;

    // Initial profile per component, batched over x.
    std::function<MatrixXd(const RowVectorXd& xs)> initial;
    // Closed-form solution if one exists (empty otherwise).
    std::function<MatrixXd(const RowVectorXd& xs, double t)> exact;

    // Stable spatially uniform rest states, used for far-field closures.
    std::vector<VectorXd> stable_steady_states;
    // Component i carries boundary-loss terms iff neumann_components[i].
    std::vector<char> neumann_components;
};

struct DomainSpec {
    double x_min = 0.0;
    double x_max = 1.0;
    double t_end = 1.0;

    double width() const { return x_max - x_min; }
    void validate() const {
        if (!(x_min < x_max)) throw Error("DomainSpec: x_min must be < x_max");
        if (!(t_end > 0.0)) throw Error("DomainSpec: t_end must be positive");
    }
};

// r^i = dU^i/dt - D^i d2U^i/dx2 - F^i(U, t), columnwise over the batch.
inline MatrixXd pde_residual(const EquationSpec& eq, const MatrixXd& u, const MatrixXd& ut,
                             const MatrixXd& uxx, const RowVectorXd& t) {
    MatrixXd r = ut - eq.diffusion.asDiagonal() * uxx;
    if (eq.reaction) r -= eq.reaction(u, t);
    return r;
}

inline VectorXd pde_residual(const EquationSpec& eq, const Jet& jet, double t) {
    RowVectorXd tv(1);
    tv << t;
    return pde_residual(eq, jet.value, jet.dt, jet.dxx, tv).col(0);
}

inline EquationSpec make_diffusion(double d_coeff = 1.0) {
    EquationSpec eq;
    eq.name = "diffusion";
    eq.d_out = 1;
    eq.diffusion = VectorXd::Constant(1, d_coeff);
    eq.reaction = [](const MatrixXd& u, const RowVectorXd&) {
        return MatrixXd::Zero(u.rows(), u.cols()).eval();
    };
    eq.reaction_vjp = [](const MatrixXd& u, const RowVectorXd&, const MatrixXd&) {
        return MatrixXd::Zero(u.rows(), u.cols()).eval();
    };
    const double k = M_PI / 3.0;
    eq.initial = [k](const RowVectorXd& xs) {
        return (1.0 + (k * xs.array()).cos()).matrix().eval();
    };
    eq.exact = [k, d_coeff](const RowVectorXd& xs, double t) {
        return (1.0 + (k * xs.array()).cos() * std::exp(-d_coeff * k * k * t)).matrix().eval();
    };
    eq.stable_steady_states = {VectorXd::Constant(1, 1.0)};
    eq.neumann_components = {1};
    return eq;
}

inline EquationSpec make_bistable(double a = 0.2, double d_coeff = 1.0) {
    EquationSpec eq;
    eq.name = "bistable";
    eq.d_out = 1;
    eq.diffusion = VectorXd::Constant(1, d_coeff);
    eq.reaction = [a](const MatrixXd& u, const RowVectorXd&) {
        auto uu = u.array();
        return (uu * (uu - a) * (1.0 - uu)).matrix().eval();
    };
    eq.reaction_vjp = [a](const MatrixXd& u, const RowVectorXd&, const MatrixXd& bar) {
        auto uu = u.array();
        auto df = -3.0 * uu.square() + 2.0 * (1.0 + a) * uu - a;
        return (df * bar.array()).matrix().eval();
    };
    eq.initial = [](const RowVectorXd& xs) {
        return (-0.01 * xs.array().square()).exp().matrix().eval();
    };
    eq.stable_steady_states = {VectorXd::Constant(1, 0.0), VectorXd::Constant(1, 1.0)};
    eq.neumann_components = {1};
    return eq;
}

inline EquationSpec make_barkley(double a = 0.3, double b = 0.01, double eps = 0.009) {
    EquationSpec eq;
    eq.name = "barkley";
    eq.d_out = 2;
    eq.diffusion = VectorXd::Zero(2);
    eq.diffusion(0) = 1.0;
    eq.reaction = [a, b, eps](const MatrixXd& uv, const RowVectorXd&) {
        auto u = uv.row(0).array();
        auto v = uv.row(1).array();
        MatrixXd f(2, uv.cols());
        f.row(0) = ((1.0 / eps) * u * (1.0 - u) * (u - (v + b) / a)).matrix();
        f.row(1) = (u - v).matrix();
        return f;
    };
    eq.reaction_vjp = [a, b, eps](const MatrixXd& uv, const RowVectorXd&, const MatrixXd& bar) {
        auto u = uv.row(0).array();
        auto v = uv.row(1).array();
        auto th = (v + b) / a;
        auto dfu_du = (1.0 / eps) * ((1.0 - 2.0 * u) * (u - th) + u * (1.0 - u));
        auto dfu_dv = (1.0 / eps) * u * (1.0 - u) * (-1.0 / a);
        MatrixXd out(2, uv.cols());
        out.row(0) = (dfu_du * bar.row(0).array() + bar.row(1).array()).matrix();
        out.row(1) = (dfu_dv * bar.row(0).array() - bar.row(1).array()).matrix();
        return out;
    };
    eq.initial = [](const RowVectorXd& xs) {
        MatrixXd ic(2, xs.cols());
        ic.row(0) = (-(xs.array() - 2.0).square()).exp().matrix();
        ic.row(1) = (0.2 * (-(xs.array() - 1.0).square()).exp()).matrix();
        return ic;
    };
    eq.stable_steady_states = {VectorXd::Zero(2)};
    eq.neumann_components = {1, 0};
    return eq;
}

inline EquationSpec make_equation(const std::string& name,
                                  const std::vector<double>& params = {}) {
    auto arg = [&params](std::size_t i, double fallback) {
        return i < params.size() ? params[i] : fallback;
    };
    if (name == "diffusion") return make_diffusion(arg(0, 1.0));
    if (name == "bistable") return make_bistable(arg(0, 0.2), arg(1, 1.0));
    if (name == "barkley") return make_barkley(arg(0, 0.3), arg(1, 0.01), arg(2, 0.009));
    throw ConfigError("unknown equation: " + name);
}

// Stable rest state nearest (Euclidean) to the given component values.
inline VectorXd nearest_steady_state(const EquationSpec& eq, const VectorXd& value) {
    if (eq.stable_steady_states.empty())
        throw Error("nearest_steady_state: equation has no catalogued rest states");
    const VectorXd* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& s : eq.stable_steady_states) {
        const double d = (s - value).norm();
        if (d < best_d) {
            best_d = d;
            best = &s;
        }
    }
    return *best;
}

}  // namespace rdnn
