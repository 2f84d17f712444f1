#pragma once

#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include "rdnn/bc_losses.hpp"
#include "rdnn/common.hpp"
#include "rdnn/equations.hpp"
#include "rdnn/network.hpp"
#include "rdnn/optimizer.hpp"
#include "rdnn/sampling.hpp"

namespace rdnn {

// Time breakpoints t_0 = 0 < t_1 < ... < t_N = t_end; subdomain k spans
// [t_{k-1}, t_k].
struct SubdomainPlan {
    std::vector<double> breakpoints;

    int count() const { return static_cast<int>(breakpoints.size()) - 1; }

    void validate(double t_end) const {
        if (breakpoints.size() < 2) throw Error("SubdomainPlan: need at least two breakpoints");
        if (breakpoints.front() != 0.0) throw Error("SubdomainPlan: must start at t = 0");
        for (std::size_t i = 1; i < breakpoints.size(); ++i)
            if (!(breakpoints[i] > breakpoints[i - 1]))
                throw Error("SubdomainPlan: breakpoints must increase");
        if (std::abs(breakpoints.back() - t_end) > 1e-12)
            throw Error("SubdomainPlan: must end at the domain t_end");
    }

    static SubdomainPlan single(double t_end) { return {{0.0, t_end}}; }

    static SubdomainPlan uniform(double t_end, int n) {
        if (n < 1) throw Error("SubdomainPlan: need at least one subdomain");
        SubdomainPlan p;
        for (int i = 0; i <= n; ++i) p.breakpoints.push_back(t_end * i / n);
        p.breakpoints.back() = t_end;
        return p;
    }
};

enum class StopKind {
    TrailingMean,  // mean of the last `window` losses below epsilon
    LogRatio,      // |log10 L(s) - log10 L(s-p)| below epsilon, checked at multiples of p
    MinLogRatio,   // |log10 Lmin(s) - log10 Lmin(s-p)| below epsilon, checked every epoch
};

inline std::string to_string(StopKind k) {
    switch (k) {
        case StopKind::TrailingMean: return "trailing_mean";
        case StopKind::LogRatio: return "log_ratio";
        case StopKind::MinLogRatio: return "min_log_ratio";
    }
    return "?";
}

struct StopCriterion {
    StopKind kind = StopKind::LogRatio;
    double epsilon = 1e-7;
    long period = 1000;  // p, for LogRatio / MinLogRatio
    long window = 100;   // trailing-mean length

    void validate() const {
        if (!(epsilon > 0.0)) throw Error("StopCriterion: epsilon must be positive");
        if (period < 1) throw Error("StopCriterion: period must be >= 1");
        if (window < 1) throw Error("StopCriterion: window must be >= 1");
    }
};

// Streaming evaluator.  feed() takes the 1-based epoch index local to the
// current training phase; state never crosses phases.
class StopMonitor {
  public:
    explicit StopMonitor(const StopCriterion& c) : c_(c) { c_.validate(); }

    bool feed(long local_epoch, double loss) {
        const double safe = std::max(loss, 1e-300);
        switch (c_.kind) {
            case StopKind::TrailingMean: {
                window_.push_back(loss);
                sum_ += loss;
                if (static_cast<long>(window_.size()) > c_.window) {
                    sum_ -= window_.front();
                    window_.pop_front();
                }
                if (++feeds_ % 4096 == 0) {  // refresh the running sum
                    sum_ = 0.0;
                    for (double v : window_) sum_ += v;
                }
                return static_cast<long>(window_.size()) == c_.window &&
                       sum_ / static_cast<double>(c_.window) < c_.epsilon;
            }
            case StopKind::LogRatio: {
                if (local_epoch % c_.period != 0) return false;
                bool fire = false;
                if (have_ref_)
                    fire = std::abs(std::log10(safe) - std::log10(ref_)) < c_.epsilon;
                ref_ = safe;
                have_ref_ = true;
                return fire;
            }
            case StopKind::MinLogRatio: {
                min_ = have_min_ ? std::min(min_, safe) : safe;
                have_min_ = true;
                mins_.push_back(min_);
                if (static_cast<long>(mins_.size()) > c_.period + 1) mins_.pop_front();
                return static_cast<long>(mins_.size()) == c_.period + 1 &&
                       std::abs(std::log10(mins_.back()) - std::log10(mins_.front())) <
                           c_.epsilon;
            }
        }
        throw Error("StopMonitor: unknown kind");
    }

  private:
    StopCriterion c_;
    std::deque<double> window_, mins_;
    double sum_ = 0.0, ref_ = 0.0, min_ = 0.0;
    long feeds_ = 0;
    bool have_ref_ = false, have_min_ = false;
};

// First 1-based epoch at which the criterion fires on a recorded loss
// sequence, or -1.  Replays exactly what StopMonitor would have decided.
inline long first_firing_epoch(const StopCriterion& c, const std::vector<double>& losses) {
    StopMonitor m(c);
    for (std::size_t i = 0; i < losses.size(); ++i)
        if (m.feed(static_cast<long>(i) + 1, losses[i])) return static_cast<long>(i) + 1;
    return -1;
}

struct EpochRow {
    long epoch = 0;  // 1-based within the phase
    double l_interior = 0.0, l_boundary = 0.0, l_initial = 0.0;
    double total = 0.0;
    double lr = 0.0;
};

struct TrainRecord {
    int subdomain_index = 0;
    bool ic_fit = false;
    double t0 = 0.0, t1 = 0.0;
    std::vector<EpochRow> rows;
    std::string stop_reason;  // "criterion" | "max_epochs" | "diverged"
    long stopped_epoch = 0;

    std::vector<double> totals() const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.total);
        return out;
    }
};

struct TrainOptions {
    StopCriterion stop;
    long max_epochs = 100000;
    LRSchedule schedule = LRSchedule::standard();
    LossWeights weights;
};

struct PhaseInfo {
    int subdomain = 0;
    bool ic_fit = false;
    double t0 = 0.0, t1 = 0.0;
};

using EpochObserver =
    std::function<void(const PhaseInfo&, const EpochRow&, const NetworkParams&)>;

// Anything the trainer can minimise.
struct DifferentiableLoss {
    virtual ~DifferentiableLoss() = default;
    virtual LossBreakdown evaluate(const NetworkParams&) const = 0;
    virtual LossBreakdown evaluate_with_gradient(const NetworkParams&, GradAccum&) const = 0;
};

struct StrategyLossAdapter : DifferentiableLoss {
    const StrategyLoss* loss;
    explicit StrategyLossAdapter(const StrategyLoss& l) : loss(&l) {}
    LossBreakdown evaluate(const NetworkParams& n) const override { return loss->evaluate(n); }
    LossBreakdown evaluate_with_gradient(const NetworkParams& n, GradAccum& g) const override {
        return loss->evaluate_with_gradient(n, g);
    }
};

// Supervised fit of fixed targets at one time slice, value channel only.
class FitLoss : public DifferentiableLoss {
  public:
    FitLoss(const RowVectorXd& xs, double t, MatrixXd targets)
        : targets_(std::move(targets)) {
        pts_.resize(2, xs.size());
        pts_.row(0) = xs;
        pts_.row(1).setConstant(t);
    }

    LossBreakdown evaluate(const NetworkParams& net) const override { return run(net, nullptr); }
    LossBreakdown evaluate_with_gradient(const NetworkParams& net,
                                         GradAccum& g) const override {
        return run(net, &g);
    }

  private:
    LossBreakdown run(const NetworkParams& net, GradAccum* grad) const {
        LossBreakdown out;
        const long n = pts_.cols();
        if (n == 0) return out;
        BatchTrace trace(net, pts_, ChannelMask::value_only());
        MatrixXd dev = trace.value() - targets_;
        out.initial = dev.squaredNorm() / static_cast<double>(n);
        if (grad) {
            trace.adj_value() = (2.0 / static_cast<double>(n)) * dev;
            trace.backward(*grad);
        }
        return out;
    }

    MatrixXd pts_;
    MatrixXd targets_;
};

// Full-batch Adam loop.  The loss recorded for epoch e is the one evaluated
// before the step of epoch e: the rate latch and the stopping criterion both
// see that raw value.  On a non-finite loss the record is marked diverged.
// On every exit the parameters are restored to the lowest-loss state seen
// during the phase, so a stop that fires while the optimizer is passing
// through a transient spike still yields the best fit the phase produced.
inline TrainRecord train_loop(NetworkParams& net, const DifferentiableLoss& loss,
                              const TrainOptions& options, const PhaseInfo& info = {},
                              const EpochObserver& observer = {}) {
    TrainRecord rec;
    rec.subdomain_index = info.subdomain;
    rec.ic_fit = info.ic_fit;
    rec.t0 = info.t0;
    rec.t1 = info.t1;
    rec.rows.reserve(static_cast<std::size_t>(std::min(options.max_epochs, 1000000L)));

    VectorXd flat = to_flat(net);
    VectorXd best_flat = flat;
    double best_total = std::numeric_limits<double>::infinity();
    AdamState adam(flat.size());
    LRSchedule schedule = options.schedule.fresh();
    schedule.validate();
    StopMonitor monitor(options.stop);
    GradAccum grad(net);

    rec.stop_reason = "max_epochs";
    for (long epoch = 1; epoch <= options.max_epochs; ++epoch) {
        grad.reset();
        const LossBreakdown bd = loss.evaluate_with_gradient(net, grad);
        const double total = bd.total(options.weights);
        if (!std::isfinite(total)) {
            from_flat(net, best_flat);
            rec.stop_reason = "diverged";
            rec.stopped_epoch = epoch;
            return rec;
        }
        if (total < best_total) {
            best_total = total;
            best_flat = flat;
        }
        const double lr = schedule.observe(total);

        adam_step(flat, grad.to_flat(), adam, lr);
        from_flat(net, flat);

        EpochRow row{epoch, bd.interior, bd.boundary, bd.initial, total, lr};
        rec.rows.push_back(row);
        if (observer) observer(info, row, net);

        if (monitor.feed(epoch, total)) {
            rec.stop_reason = "criterion";
            rec.stopped_epoch = epoch;
            from_flat(net, best_flat);
            return rec;
        }
    }
    rec.stopped_epoch = options.max_epochs;
    from_flat(net, best_flat);
    return rec;
}

inline MatrixXd evaluate_at_time(const NetworkParams& net, const RowVectorXd& xs, double t) {
    MatrixXd in(2, xs.size());
    in.row(0) = xs;
    in.row(1).setConstant(t);
    return evaluate(net, in);
}

struct MarchSettings {
    std::vector<int> layer_sizes = {2, 60, 60, 60, 60, 1};
    SampleCounts counts;
    long n_ic_fit = 0;  // 0: reuse counts.n_initial
    double eps_ic = 5e-6;
    long ic_max_epochs = 100000;
    StopCriterion stop;
    long max_epochs = 100000;
    // Optional per-subdomain training budgets; entry k-1 (when present and
    // positive) replaces max_epochs for subdomain k.  Windows often deserve
    // uneven budgets: early ones march the state, a late one may need to be
    // trained out much further.
    std::vector<long> max_epochs_by_window;
    LRSchedule schedule = LRSchedule::standard();
    LossWeights weights;
    std::uint64_t seed = 0;
};

struct MarchResult {
    std::vector<TrainRecord> records;
    // Parameter state after every phase, labelled "ic_fit_k" / "subdomain_k".
    std::vector<std::pair<std::string, NetworkParams>> phase_nets;
    std::vector<VectorXd> dirichlet_values;  // per subdomain (empty if unused)
    NetworkParams final_net;
    std::string status = "ok";  // "ok" | "diverged"
};

// Fits a fresh or warm-started net to target values at one time slice until
// the trailing-mean criterion drops below eps_ic.
inline TrainRecord fit_initial_condition(NetworkParams& net, const RowVectorXd& xs, double t,
                                         const MatrixXd& targets, double eps_ic,
                                         long max_epochs, const LRSchedule& schedule,
                                         const PhaseInfo& info = {},
                                         const EpochObserver& observer = {}) {
    FitLoss loss(xs, t, targets);
    TrainOptions opts;
    opts.stop = StopCriterion{StopKind::TrailingMean, eps_ic, 1000, 100};
    opts.max_epochs = max_epochs;
    opts.schedule = schedule;
    return train_loop(net, loss, opts, info, observer);
}

// Trains the whole plan: per subdomain, resolve the initial-condition target
// (exact profile for k = 1, previous net afterwards; mirrored through the
// walls under the mirror strategy), refit the auxiliary net where required,
// re-anchor far-field values, then minimise the strategy loss, warm-starting
// the main net across subdomains.
inline MarchResult march(const EquationSpec& eq, const DomainSpec& domain,
                         const BCStrategy& strategy, const SubdomainPlan& plan,
                         const MarchSettings& settings, const EpochObserver& observer = {}) {
    domain.validate();
    plan.validate(domain.t_end);
    const StrategyGeometry geom = strategy_geometry(strategy, domain.x_min, domain.x_max);
    const bool is_mirror = strategy.kind == BCKind::Mirror;
    const bool needs_dirichlet =
        is_mirror || (strategy.kind == BCKind::PhaseField && strategy.pf_variant == 1);
    const long n_ic_fit = settings.n_ic_fit > 0 ? settings.n_ic_fit : settings.counts.n_initial;

    MarchResult result;
    NetworkParams cur;  // main net
    NetworkParams icn;  // auxiliary initial-condition net

    for (int k = 1; k <= plan.count(); ++k) {
        const double t0 = plan.breakpoints[static_cast<std::size_t>(k - 1)];
        const double t1 = plan.breakpoints[static_cast<std::size_t>(k)];

        // Target profile over the initial extent, as a function of x.
        auto target_at = [&](const RowVectorXd& xs) -> MatrixXd {
            RowVectorXd phys = xs;
            if (is_mirror)
                for (long i = 0; i < phys.size(); ++i)
                    phys(i) = mirror_reflect(phys(i), domain.x_min, domain.x_max);
            if (k == 1) return eq.initial(phys);
            return evaluate_at_time(cur, phys, t0);
        };

        VectorXd dirichlet = VectorXd::Zero(eq.d_out);
        if (needs_dirichlet) {
            RowVectorXd walls(2);
            walls << domain.x_min, domain.x_max;
            MatrixXd wv = (k == 1) ? eq.initial(walls) : evaluate_at_time(cur, walls, t0);
            dirichlet = nearest_steady_state(eq, 0.5 * (wv.col(0) + wv.col(1)));
            result.dirichlet_values.push_back(dirichlet);
        }

        const bool fit_needed = (k == 1) || is_mirror;
        if (fit_needed) {
            icn = (k == 1)
                      ? init_network(settings.layer_sizes,
                                     derive_seed(settings.seed, k, SeedRole::IcNetInit))
                      : cur;  // warm start the refit from the marching net
            RowVectorXd fit_xs =
                sample_uniform_row(derive_seed(settings.seed, k, SeedRole::IcFit), n_ic_fit,
                                   geom.initial_lo, geom.initial_hi);
            MatrixXd fit_targets = target_at(fit_xs);
            PhaseInfo info{k, true, t0, t1};
            TrainRecord rec =
                fit_initial_condition(icn, fit_xs, t0, fit_targets, settings.eps_ic,
                                      settings.ic_max_epochs, settings.schedule, info, observer);
            result.records.push_back(std::move(rec));
            result.phase_nets.emplace_back("ic_fit_" + std::to_string(k), icn);
            if (result.records.back().stop_reason == "diverged") {
                result.status = "diverged";
                result.final_net = icn;
                return result;
            }
        }

        SampleBatch batch;
        batch.x_lo = geom.interior_lo;
        batch.x_hi = geom.interior_hi;
        batch.t0 = t0;
        batch.t1 = t1;
        batch.interior = sample_rect(derive_seed(settings.seed, k, SeedRole::Interior),
                                     settings.counts.n_interior, geom.interior_lo,
                                     geom.interior_hi, t0, t1);
        batch.boundary_t = sample_uniform_row(derive_seed(settings.seed, k, SeedRole::Boundary),
                                              settings.counts.n_boundary, t0, t1);
        batch.initial_x = sample_uniform_row(derive_seed(settings.seed, k, SeedRole::Initial),
                                             settings.counts.n_initial, geom.initial_lo,
                                             geom.initial_hi);

        MatrixXd ic_targets = fit_needed ? evaluate_at_time(icn, batch.initial_x, t0)
                                         : evaluate_at_time(cur, batch.initial_x, t0);

        if (k == 1)
            cur = init_network(settings.layer_sizes,
                               derive_seed(settings.seed, k, SeedRole::NetInit));

        StrategyLoss sloss(eq, strategy, domain.x_min, domain.x_max, batch, ic_targets,
                           dirichlet, settings.weights);
        TrainOptions opts;
        opts.stop = settings.stop;
        opts.max_epochs = settings.max_epochs;
        const auto& budgets = settings.max_epochs_by_window;
        if (static_cast<std::size_t>(k) <= budgets.size() && budgets[k - 1] > 0)
            opts.max_epochs = budgets[k - 1];
        opts.schedule = settings.schedule;
        opts.weights = settings.weights;
        PhaseInfo info{k, false, t0, t1};
        TrainRecord rec =
            train_loop(cur, StrategyLossAdapter(sloss), opts, info, observer);
        const bool diverged = rec.stop_reason == "diverged";
        result.records.push_back(std::move(rec));
        result.phase_nets.emplace_back("subdomain_" + std::to_string(k), cur);
        if (diverged) {
            result.status = "diverged";
            break;
        }
    }
    result.final_net = cur;
    return result;
}

}  // namespace rdnn
