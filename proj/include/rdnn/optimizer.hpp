#pragma once

#include <utility>
#include <vector>

#include "rdnn/common.hpp"

namespace rdnn {

// Loss-latched learning-rate ladder.  The rate starts at initial_rate and
// drops to stages[k].rate once the observed loss first falls below
// stages[k].threshold.  The latch only moves forward: later loss increases
// never restore an earlier rate.
struct LRSchedule {
    double initial_rate = 0.01;
    std::vector<std::pair<double, double>> stages;  // (threshold, rate)
    int latched = -1;

    void validate() const {
        if (!(initial_rate > 0.0)) throw Error("LRSchedule: initial rate must be positive");
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& [threshold, rate] : stages) {
            if (!(threshold < prev))
                throw Error("LRSchedule: thresholds must be strictly decreasing");
            if (!(rate > 0.0)) throw Error("LRSchedule: rates must be positive");
            prev = threshold;
        }
    }

    double rate() const { return latched < 0 ? initial_rate : stages[latched].second; }

    // Advances the latch for the given loss value and returns the new rate.
    double observe(double loss) {
        while (latched + 1 < static_cast<int>(stages.size()) &&
               loss < stages[latched + 1].first)
            ++latched;
        return rate();
    }

    LRSchedule fresh() const {
        LRSchedule s = *this;
        s.latched = -1;
        return s;
    }

    static LRSchedule standard() {
        LRSchedule s;
        s.initial_rate = 0.01;
        s.stages = {{0.01, 0.001},
                    {0.005, 0.0005},
                    {0.001, 0.0001},
                    {0.0001, 0.00005},
                    {0.00001, 0.00001}};
        return s;
    }

    static LRSchedule fixed(double rate) {
        LRSchedule s;
        s.initial_rate = rate;
        return s;
    }
};

struct AdamState {
    VectorXd m, v;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(long n = 0) : m(VectorXd::Zero(n)), v(VectorXd::Zero(n)) {}
};

// One bias-corrected Adam update, in place on the flat parameter vector.
inline void adam_step(VectorXd& params, const VectorXd& grad, AdamState& state, double lr) {
    if (params.size() != grad.size() || params.size() != state.m.size())
        throw Error("adam_step: size mismatch");
    state.step += 1;
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    params.array() -=
        lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

}  // namespace rdnn
