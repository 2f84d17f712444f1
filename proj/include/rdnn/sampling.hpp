#pragma once

#include "rdnn/common.hpp"
#include "rdnn/equations.hpp"
#include "rdnn/rng.hpp"

namespace rdnn {

struct SampleCounts {
    long n_interior = 0;
    long n_boundary = 0;
    long n_initial = 0;
};

// Training points for one subdomain.  Drawn once, never resampled between
// epochs.  Boundary times are shared by both walls; the strategies place
// their own x offsets (walls, stations, extended edges).
struct SampleBatch {
    MatrixXd interior;       // 2 x n_interior, uniform over [x_lo,x_hi] x [t0,t1]
    RowVectorXd boundary_t;  // n_boundary times, uniform over [t0,t1]
    RowVectorXd initial_x;   // n_initial positions, uniform over [x_lo,x_hi]
    double x_lo = 0, x_hi = 0;
    double t0 = 0, t1 = 0;
};

inline RowVectorXd sample_uniform_row(std::uint64_t seed, long n, double lo, double hi) {
    if (n < 0) throw Error("sample_uniform_row: negative count");
    if (!(lo <= hi)) throw Error("sample_uniform_row: empty interval");
    SplitMix64 rng(seed);
    RowVectorXd row(n);
    for (long i = 0; i < n; ++i) row(i) = rng.next_uniform(lo, hi);
    return row;
}

// Uniform draw over a space-time rectangle; per point x is drawn before t so
// the batch is a pure function of the seed.
inline MatrixXd sample_rect(std::uint64_t seed, long n, double x_lo, double x_hi, double t0,
                            double t1) {
    if (n < 0) throw Error("sample_rect: negative count");
    if (!(x_lo <= x_hi) || !(t0 <= t1)) throw Error("sample_rect: empty rectangle");
    SplitMix64 rng(seed);
    MatrixXd pts(2, n);
    for (long i = 0; i < n; ++i) {
        pts(0, i) = rng.next_uniform(x_lo, x_hi);
        pts(1, i) = rng.next_uniform(t0, t1);
    }
    return pts;
}

inline SampleBatch sample_batch(double x_lo, double x_hi, double t0, double t1,
                                const SampleCounts& counts, std::uint64_t base_seed,
                                int subdomain_index) {
    if (!(x_lo < x_hi)) throw Error("sample_batch: x_lo must be < x_hi");
    if (!(t0 < t1)) throw Error("sample_batch: t0 must be < t1");
    SampleBatch b;
    b.x_lo = x_lo;
    b.x_hi = x_hi;
    b.t0 = t0;
    b.t1 = t1;
    b.interior = sample_rect(derive_seed(base_seed, subdomain_index, SeedRole::Interior),
                             counts.n_interior, x_lo, x_hi, t0, t1);
    b.boundary_t = sample_uniform_row(derive_seed(base_seed, subdomain_index, SeedRole::Boundary),
                                      counts.n_boundary, t0, t1);
    b.initial_x = sample_uniform_row(derive_seed(base_seed, subdomain_index, SeedRole::Initial),
                                     counts.n_initial, x_lo, x_hi);
    return b;
}

inline bool batch_in_bounds(const SampleBatch& b) {
    auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
    for (long i = 0; i < b.interior.cols(); ++i)
        if (!in(b.interior(0, i), b.x_lo, b.x_hi) || !in(b.interior(1, i), b.t0, b.t1))
            return false;
    for (long i = 0; i < b.boundary_t.size(); ++i)
        if (!in(b.boundary_t(i), b.t0, b.t1)) return false;
    for (long i = 0; i < b.initial_x.size(); ++i)
        if (!in(b.initial_x(i), b.x_lo, b.x_hi)) return false;
    return true;
}

}  // namespace rdnn
