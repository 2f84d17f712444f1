#pragma once

#include <vector>

#include "rdnn/autodiff.hpp"
#include "rdnn/common.hpp"
#include "rdnn/equations.hpp"
#include "rdnn/sampling.hpp"

namespace rdnn {

enum class BCKind { Vanilla, FiniteDifference, PhaseField, Mirror };

inline std::string to_string(BCKind k) {
    switch (k) {
        case BCKind::Vanilla: return "vanilla";
        case BCKind::FiniteDifference: return "finite_difference";
        case BCKind::PhaseField: return "phase_field";
        case BCKind::Mirror: return "mirror";
    }
    return "?";
}

struct BCStrategy {
    BCKind kind = BCKind::Vanilla;
    int fd_order = 3;        // one-sided stencil order (2, 3 or 4)
    double fd_dx = 0.05;     // station spacing
    int pf_variant = 1;      // 1: weighted residual, 2: physical residual + edge flux
    double pf_xi = 0.5;      // interface width of the smoothed indicator
    double pf_margin = 2.0;  // extension beyond each wall
};

struct LossWeights {
    double interior = 1.0;
    double boundary = 1.0;
    double initial = 1.0;
};

struct LossBreakdown {
    double interior = 0.0;
    double boundary = 0.0;
    double initial = 0.0;

    double total(const LossWeights& w = {}) const {
        return w.interior * interior + w.boundary * boundary + w.initial * initial;
    }
};

// Where each sample family lives for a strategy, given the physical walls
// of the current subdomain.
struct StrategyGeometry {
    double interior_lo, interior_hi;  // residual samples
    double initial_lo, initial_hi;    // initial-condition samples
    double edge_lo, edge_hi;          // where boundary terms are anchored
};

inline StrategyGeometry strategy_geometry(const BCStrategy& s, double x_min, double x_max) {
    if (!(x_min < x_max)) throw Error("strategy_geometry: x_min must be < x_max");
    switch (s.kind) {
        case BCKind::Vanilla:
        case BCKind::FiniteDifference:
            return {x_min, x_max, x_min, x_max, x_min, x_max};
        case BCKind::PhaseField: {
            const double lo = x_min - s.pf_margin, hi = x_max + s.pf_margin;
            if (s.pf_variant == 1) return {lo, hi, x_min, x_max, lo, hi};
            return {x_min, x_max, x_min, x_max, lo, hi};
        }
        case BCKind::Mirror: {
            const double width = x_max - x_min;
            return {x_min - width, x_max + width, x_min - width, x_max + width,
                    x_min - width, x_max + width};
        }
    }
    throw Error("strategy_geometry: unknown kind");
}

// Even reflection of an extended-domain coordinate back into the physical
// interval.  Valid for |offset| <= one domain width.
inline double mirror_reflect(double x, double x_min, double x_max) {
    if (x < x_min) return 2.0 * x_min - x;
    if (x > x_max) return 2.0 * x_max - x;
    return x;
}

// Smoothed indicator of [x_min, x_max]: 1 well inside, 0 well outside,
// 1/2 at each wall for widths >> xi.
inline double phase_field_profile(double x, double xi, double x_min, double x_max) {
    return 0.25 * (std::tanh((x - x_min) / xi) + 1.0) * (std::tanh((x_max - x) / xi) + 1.0);
}

inline double phase_field_profile_dx(double x, double xi, double x_min, double x_max) {
    const double tl = std::tanh((x - x_min) / xi);
    const double tr = std::tanh((x_max - x) / xi);
    return 0.25 / xi * ((1.0 - tl * tl) * (tr + 1.0) - (tl + 1.0) * (1.0 - tr * tr));
}

// Weights of the one-sided first-derivative stencil on the nodes
// (wall, wall+dx, ..., wall+order*dx) at a left wall; a right wall uses the
// same weights negated on mirrored nodes.  Exact for polynomials up to the
// stencil order.
inline VectorXd fd_stencil_weights(int order, double dx) {
    VectorXd w;
    switch (order) {
        case 2:
            w.resize(3);
            w << -3.0, 4.0, -1.0;
            w /= 2.0;
            break;
        case 3:
            w.resize(4);
            w << -11.0, 18.0, -9.0, 2.0;
            w /= 6.0;
            break;
        case 4:
            w.resize(5);
            w << -25.0, 48.0, -36.0, 16.0, -3.0;
            w /= 12.0;
            break;
        default:
            throw Error("fd_stencil_weights: order must be 2, 3 or 4");
    }
    return w / dx;
}

// Composite training loss of one subdomain under one boundary strategy.
// All sample points are fixed at construction; evaluate() and
// evaluate_with_gradient() are pure functions of the network parameters.
class StrategyLoss {
  public:
    StrategyLoss(const EquationSpec& eq, const BCStrategy& strategy, double x_min, double x_max,
                 const SampleBatch& batch, MatrixXd ic_targets, VectorXd dirichlet_value,
                 LossWeights weights = {})
        : eq_(&eq),
          strategy_(strategy),
          x_min_(x_min),
          x_max_(x_max),
          weights_(weights),
          ic_targets_(std::move(ic_targets)),
          dirichlet_(std::move(dirichlet_value)) {
        const long n_bc = batch.boundary_t.size();
        const long n_ic = batch.initial_x.size();
        if (ic_targets_.cols() != n_ic || ic_targets_.rows() != eq.d_out)
            throw Error("StrategyLoss: ic_targets shape mismatch");

        neumann_ = VectorXd::Zero(eq.d_out);
        for (int i = 0; i < eq.d_out; ++i)
            if (eq.neumann_components[i]) neumann_(i) = 1.0;

        interior_pts_ = batch.interior;
        interior_t_ = batch.interior.row(1);

        initial_pts_.resize(2, n_ic);
        initial_pts_.row(0) = batch.initial_x;
        initial_pts_.row(1).setConstant(batch.t0);

        const StrategyGeometry g = strategy_geometry(strategy, x_min, x_max);
        switch (strategy.kind) {
            case BCKind::Vanilla:
            case BCKind::PhaseField:
            case BCKind::Mirror: {
                // Two edge blocks sharing the boundary times: [left | right].
                edge_pts_.resize(2, 2 * n_bc);
                edge_pts_.row(0).head(n_bc).setConstant(g.edge_lo);
                edge_pts_.row(0).tail(n_bc).setConstant(g.edge_hi);
                edge_pts_.row(1).head(n_bc) = batch.boundary_t;
                edge_pts_.row(1).tail(n_bc) = batch.boundary_t;
                break;
            }
            case BCKind::FiniteDifference: {
                const int m = strategy.fd_order;
                // Station blocks: left k=1..m then right k=1..m, each n_bc wide.
                station_pts_.resize(2, 2 * m * n_bc);
                for (int k = 1; k <= m; ++k) {
                    station_pts_.row(0).segment((k - 1) * n_bc, n_bc)
                        .setConstant(x_min + k * strategy.fd_dx);
                    station_pts_.row(0).segment((m + k - 1) * n_bc, n_bc)
                        .setConstant(x_max - k * strategy.fd_dx);
                    station_pts_.row(1).segment((k - 1) * n_bc, n_bc) = batch.boundary_t;
                    station_pts_.row(1).segment((m + k - 1) * n_bc, n_bc) = batch.boundary_t;
                }
                edge_pts_.resize(2, 2 * n_bc);
                edge_pts_.row(0).head(n_bc).setConstant(x_min);
                edge_pts_.row(0).tail(n_bc).setConstant(x_max);
                edge_pts_.row(1).head(n_bc) = batch.boundary_t;
                edge_pts_.row(1).tail(n_bc) = batch.boundary_t;
                stencil_ = fd_stencil_weights(m, strategy.fd_dx);
                break;
            }
        }

        if (strategy.kind == BCKind::PhaseField && strategy.pf_variant == 1) {
            const long n = interior_pts_.cols();
            phi_.resize(n);
            phi_dx_.resize(n);
            for (long i = 0; i < n; ++i) {
                phi_(i) = phase_field_profile(interior_pts_(0, i), strategy.pf_xi, x_min, x_max);
                phi_dx_(i) =
                    phase_field_profile_dx(interior_pts_(0, i), strategy.pf_xi, x_min, x_max);
            }
        }
    }

    LossBreakdown evaluate(const NetworkParams& net) const {
        return run(net, nullptr);
    }

    LossBreakdown evaluate_with_gradient(const NetworkParams& net, GradAccum& grad) const {
        return run(net, &grad);
    }

    const LossWeights& weights() const { return weights_; }

  private:
    LossBreakdown run(const NetworkParams& net, GradAccum* grad) const {
        LossBreakdown out;
        out.interior = interior_term(net, grad);
        out.boundary = boundary_term(net, grad);
        out.initial = initial_term(net, grad);
        return out;
    }

    // Mean squared PDE residual; phase-field variant 1 weights the residual
    // terms by phi and adds the -D phi' U_x transport part.
    double interior_term(const NetworkParams& net, GradAccum* grad) const {
        const long n = interior_pts_.cols();
        if (n == 0) return 0.0;
        const bool weighted = strategy_.kind == BCKind::PhaseField && strategy_.pf_variant == 1;
        BatchTrace trace(net, interior_pts_, ChannelMask::full());
        const MatrixXd& u = trace.value();
        const RowVectorXd t = interior_t_;

        MatrixXd r;
        if (weighted) {
            auto phi = phi_.transpose().array();
            auto dphi = phi_dx_.transpose().array();
            r = (trace.dt().array().rowwise() * phi).matrix();
            r -= eq_->diffusion.asDiagonal() *
                 (trace.dx().array().rowwise() * dphi +
                  trace.dxx().array().rowwise() * phi).matrix();
            r -= (eq_->reaction(u, t).array().rowwise() * phi).matrix();
        } else {
            r = pde_residual(*eq_, u, trace.dt(), trace.dxx(), t);
        }
        const double term = r.squaredNorm() / static_cast<double>(n);

        if (grad) {
            const double c = 2.0 * weights_.interior / static_cast<double>(n);
            if (weighted) {
                auto phi = phi_.transpose().array();
                auto dphi = phi_dx_.transpose().array();
                MatrixXd phir = (r.array().rowwise() * phi).matrix();
                trace.adj_dt() = c * phir;
                trace.adj_dxx() = -c * (eq_->diffusion.asDiagonal() * phir);
                trace.adj_dx() =
                    -c * (eq_->diffusion.asDiagonal() *
                          (r.array().rowwise() * dphi).matrix());
                trace.adj_value() = -c * eq_->reaction_vjp(u, t, phir);
            } else {
                trace.adj_dt() = c * r;
                trace.adj_dxx() = -c * (eq_->diffusion.asDiagonal() * r);
                trace.adj_value() = -c * eq_->reaction_vjp(u, t, r);
            }
            trace.backward(*grad);
        }
        return term;
    }

    double boundary_term(const NetworkParams& net, GradAccum* grad) const {
        switch (strategy_.kind) {
            case BCKind::Vanilla: return flux_term(net, grad);
            case BCKind::FiniteDifference: return fd_term(net, grad);
            case BCKind::Mirror: return dirichlet_term(net, grad);
            case BCKind::PhaseField:
                return strategy_.pf_variant == 1 ? dirichlet_term(net, grad)
                                                 : flux_term(net, grad);
        }
        throw Error("boundary_term: unknown kind");
    }

    // Mean of (U_x)^2 over both edges, flux-carrying components only.
    double flux_term(const NetworkParams& net, GradAccum* grad) const {
        const long n = edge_pts_.cols() / 2;
        if (n == 0) return 0.0;
        BatchTrace trace(net, edge_pts_, ChannelMask::value_dx());
        MatrixXd ux = neumann_.asDiagonal() * trace.dx();
        const double term = ux.squaredNorm() / static_cast<double>(n);
        if (grad) {
            trace.adj_dx() = (2.0 * weights_.boundary / static_cast<double>(n)) * ux;
            trace.backward(*grad);
        }
        return term;
    }

    // Mean of (U - U_inf)^2 over both extended edges, flux components only.
    double dirichlet_term(const NetworkParams& net, GradAccum* grad) const {
        const long n = edge_pts_.cols() / 2;
        if (n == 0) return 0.0;
        BatchTrace trace(net, edge_pts_, ChannelMask::value_only());
        MatrixXd dev = neumann_.asDiagonal() * (trace.value().colwise() - dirichlet_);
        const double term = dev.squaredNorm() / static_cast<double>(n);
        if (grad) {
            trace.adj_value() = (2.0 * weights_.boundary / static_cast<double>(n)) * dev;
            trace.backward(*grad);
        }
        return term;
    }

    // Offset stations satisfy the full PDE; a one-sided stencil through wall
    // and stations penalises the normal derivative at each wall.
    double fd_term(const NetworkParams& net, GradAccum* grad) const {
        const long n = edge_pts_.cols() / 2;
        if (n == 0) return 0.0;
        const int m = strategy_.fd_order;

        BatchTrace stations(net, station_pts_, ChannelMask::full());
        BatchTrace walls(net, edge_pts_, ChannelMask::value_only());

        const RowVectorXd st = station_pts_.row(1);
        MatrixXd r = pde_residual(*eq_, stations.value(), stations.dt(), stations.dxx(), st);
        double term = r.squaredNorm() / static_cast<double>(n);

        // Left stencil: w0 U(wall) + sum_k wk U(wall + k dx); right negated.
        const int d = eq_->d_out;
        MatrixXd s_left = MatrixXd::Zero(d, n), s_right = MatrixXd::Zero(d, n);
        s_left = stencil_(0) * walls.value().leftCols(n);
        s_right = -stencil_(0) * walls.value().rightCols(n);
        for (int k = 1; k <= m; ++k) {
            s_left += stencil_(k) * stations.value().middleCols((k - 1) * n, n);
            s_right -= stencil_(k) * stations.value().middleCols((m + k - 1) * n, n);
        }
        s_left = neumann_.asDiagonal() * s_left;
        s_right = neumann_.asDiagonal() * s_right;
        term += (s_left.squaredNorm() + s_right.squaredNorm()) / static_cast<double>(n);

        if (grad) {
            const double c = 2.0 * weights_.boundary / static_cast<double>(n);
            stations.adj_dt() = c * r;
            stations.adj_dxx() = -c * (eq_->diffusion.asDiagonal() * r);
            stations.adj_value() = -c * eq_->reaction_vjp(stations.value(), st, r);
            for (int k = 1; k <= m; ++k) {
                stations.adj_value().middleCols((k - 1) * n, n) += (c * stencil_(k)) * s_left;
                stations.adj_value().middleCols((m + k - 1) * n, n) -=
                    (c * stencil_(k)) * s_right;
            }
            walls.adj_value().leftCols(n) = (c * stencil_(0)) * s_left;
            walls.adj_value().rightCols(n) = (-c * stencil_(0)) * s_right;
            stations.backward(*grad);
            walls.backward(*grad);
        }
        return term;
    }

    // Mean of (U - target)^2 at the subdomain start time, all components.
    double initial_term(const NetworkParams& net, GradAccum* grad) const {
        const long n = initial_pts_.cols();
        if (n == 0) return 0.0;
        BatchTrace trace(net, initial_pts_, ChannelMask::value_only());
        MatrixXd dev = trace.value() - ic_targets_;
        const double term = dev.squaredNorm() / static_cast<double>(n);
        if (grad) {
            trace.adj_value() = (2.0 * weights_.initial / static_cast<double>(n)) * dev;
            trace.backward(*grad);
        }
        return term;
    }

    const EquationSpec* eq_;
    BCStrategy strategy_;
    double x_min_, x_max_;
    LossWeights weights_;
    MatrixXd interior_pts_;
    RowVectorXd interior_t_;
    MatrixXd initial_pts_;
    MatrixXd edge_pts_;     // walls (vanilla/fd) or extended edges (pf/mirror)
    MatrixXd station_pts_;  // fd offset stations, left blocks then right
    MatrixXd ic_targets_;
    VectorXd dirichlet_;
    VectorXd neumann_;
    VectorXd stencil_;
    VectorXd phi_, phi_dx_;
};

}  // namespace rdnn
