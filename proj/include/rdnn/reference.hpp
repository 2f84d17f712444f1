#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "rdnn/common.hpp"
#include "rdnn/equations.hpp"
#include "rdnn/network.hpp"

namespace rdnn {

// Solution samples on a tensor grid: values[c](i, j) = U^c(xs[i], ts[j]).
struct GridSolution {
    std::vector<double> xs;
    std::vector<double> ts;
    std::vector<MatrixXd> values;

    long nx() const { return static_cast<long>(xs.size()); }
    long nt() const { return static_cast<long>(ts.size()); }
    int components() const { return static_cast<int>(values.size()); }

    void validate() const {
        for (const auto& v : values)
            if (v.rows() != nx() || v.cols() != nt())
                throw Error("GridSolution: value block shape mismatch");
        for (std::size_t j = 1; j < ts.size(); ++j)
            if (!(ts[j] > ts[j - 1])) throw Error("GridSolution: times must increase");
    }
};

// Method-of-lines reference: second-order central Laplacian with reflected
// ghost cells (no-flux walls), classical RK4 in time, linear interpolation
// onto the snapshot times.  Diffusion-free components join through F only.
inline GridSolution mol_solve(const EquationSpec& eq, const DomainSpec& domain, int nx,
                              double dt, const std::vector<double>& snapshot_times) {
    domain.validate();
    if (nx < 3) throw Error("mol_solve: nx must be >= 3");
    if (!(dt > 0.0)) throw Error("mol_solve: dt must be positive");
    std::vector<double> snaps = snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    if (!snaps.empty() && (snaps.front() < 0.0 || snaps.back() > domain.t_end + 1e-12))
        throw Error("mol_solve: snapshot outside [0, t_end]");

    const double h = domain.width() / (nx - 1);
    GridSolution out;
    out.xs.resize(nx);
    for (int i = 0; i < nx; ++i) out.xs[i] = domain.x_min + i * h;
    out.ts = snaps;
    for (int c = 0; c < eq.d_out; ++c)
        out.values.emplace_back(MatrixXd::Zero(nx, static_cast<long>(snaps.size())));

    RowVectorXd xs_row(nx);
    for (int i = 0; i < nx; ++i) xs_row(i) = out.xs[i];
    MatrixXd u = eq.initial(xs_row);

    const double inv_h2 = 1.0 / (h * h);
    MatrixXd lap(eq.d_out, nx);
    auto rhs = [&](const MatrixXd& state, double t) {
        // Ghost reflection U_{-1} = U_1 and U_{nx} = U_{nx-2}.
        lap.middleCols(1, nx - 2) = state.leftCols(nx - 2) - 2.0 * state.middleCols(1, nx - 2) +
                                    state.rightCols(nx - 2);
        lap.col(0) = 2.0 * (state.col(1) - state.col(0));
        lap.col(nx - 1) = 2.0 * (state.col(nx - 2) - state.col(nx - 1));
        RowVectorXd t_row = RowVectorXd::Constant(nx, t);
        return ((eq.diffusion * inv_h2).asDiagonal() * lap + eq.reaction(state, t_row)).eval();
    };

    std::size_t next_snap = 0;
    auto record = [&](double t_prev, const MatrixXd& u_prev, double t_cur,
                      const MatrixXd& u_cur) {
        while (next_snap < snaps.size() && snaps[next_snap] <= t_cur + 1e-12) {
            const double ts = snaps[next_snap];
            const double span = t_cur - t_prev;
            const double w = span > 0.0 ? std::clamp((ts - t_prev) / span, 0.0, 1.0) : 1.0;
            MatrixXd u_s = (1.0 - w) * u_prev + w * u_cur;
            for (int c = 0; c < eq.d_out; ++c)
                out.values[c].col(static_cast<long>(next_snap)) = u_s.row(c).transpose();
            ++next_snap;
        }
    };

    record(0.0, u, 0.0, u);
    const double t_end = snaps.empty() ? 0.0 : snaps.back();
    double t = 0.0;
    long step_index = 0;
    MatrixXd k1, k2, k3, k4, u_next;
    while (t < t_end - 1e-12 && next_snap < snaps.size()) {
        const double step = std::min(dt, t_end - t);
        k1 = rhs(u, t);
        k2 = rhs(u + 0.5 * step * k1, t + 0.5 * step);
        k3 = rhs(u + 0.5 * step * k2, t + 0.5 * step);
        k4 = rhs(u + step * k3, t + step);
        u_next = u + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ++step_index;
        if (!u_next.allFinite())
            throw DivergedError("mol_solve: non-finite state at step " +
                                std::to_string(step_index) + " (t = " + std::to_string(t + step) +
                                "); reduce dt for this mesh");
        record(t, u, t + step, u_next);
        u = std::move(u_next);
        t += step;
    }
    // Accumulated-roundoff guard: anything left is within one ulp of t_end.
    for (; next_snap < snaps.size(); ++next_snap)
        for (int c = 0; c < eq.d_out; ++c)
            out.values[c].col(static_cast<long>(next_snap)) = u.row(c).transpose();
    return out;
}

// Network values on the same kind of grid, for direct comparison.
inline GridSolution network_grid(const NetworkParams& net, const std::vector<double>& xs,
                                 const std::vector<double>& ts) {
    GridSolution g;
    g.xs = xs;
    g.ts = ts;
    g.values = evaluate_grid(net, xs, ts);
    return g;
}

// Max absolute difference at one snapshot column, across all components.
inline double linf_at(const GridSolution& a, const GridSolution& b, long j) {
    if (a.nx() != b.nx() || a.components() != b.components())
        throw Error("linf_at: grid shape mismatch");
    double m = 0.0;
    for (int c = 0; c < a.components(); ++c)
        m = std::max(m, (a.values[c].col(j) - b.values[c].col(j)).cwiseAbs().maxCoeff());
    return m;
}

inline double linf_error(const GridSolution& a, const GridSolution& b) {
    if (a.nt() != b.nt()) throw Error("linf_error: snapshot count mismatch");
    double m = 0.0;
    for (long j = 0; j < a.nt(); ++j) m = std::max(m, linf_at(a, b, j));
    return m;
}

// Rightmost downward level crossing of a profile, linearly interpolated.
// NaN when the profile never crosses the level from above.
inline double front_position(const std::vector<double>& xs, const VectorXd& profile,
                             double level = 0.5) {
    for (long i = static_cast<long>(xs.size()) - 2; i >= 0; --i) {
        const double a = profile(i), b = profile(i + 1);
        if (a >= level && b < level) {
            const double w = (a - level) / (a - b);
            return xs[static_cast<std::size_t>(i)] +
                   w * (xs[static_cast<std::size_t>(i + 1)] - xs[static_cast<std::size_t>(i)]);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Columnar text grid format, %.17g throughout, round-trips to the bit.
inline void save_grid(const GridSolution& g, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IOError("save_grid: cannot open " + path);
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "# rdnn-grid 1\n";
    os << "# components " << g.components() << "\n";
    os << "# nx " << g.nx() << " nt " << g.nt() << "\n";
    os << "# ts";
    for (double t : g.ts) os << ' ' << num(t);
    os << "\n";
    for (long i = 0; i < g.nx(); ++i) {
        os << num(g.xs[static_cast<std::size_t>(i)]);
        for (int c = 0; c < g.components(); ++c)
            for (long j = 0; j < g.nt(); ++j) os << ' ' << num(g.values[c](i, j));
        os << "\n";
    }
    if (!os) throw IOError("save_grid: write failed for " + path);
}

inline GridSolution load_grid(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IOError("load_grid: cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line != "# rdnn-grid 1")
        throw IOError("load_grid: bad magic in " + path);
    int components = 0;
    long nx = 0, nt = 0;
    GridSolution g;
    {
        std::getline(is, line);
        std::istringstream ss(line);
        std::string hash, key;
        ss >> hash >> key >> components;
        if (key != "components") throw IOError("load_grid: bad header in " + path);
    }
    {
        std::getline(is, line);
        std::istringstream ss(line);
        std::string hash, k1, k2;
        ss >> hash >> k1 >> nx >> k2 >> nt;
        if (k1 != "nx" || k2 != "nt") throw IOError("load_grid: bad header in " + path);
    }
    {
        std::getline(is, line);
        std::istringstream ss(line);
        std::string hash, key;
        ss >> hash >> key;
        if (key != "ts") throw IOError("load_grid: bad header in " + path);
        double t;
        while (ss >> t) g.ts.push_back(t);
        if (static_cast<long>(g.ts.size()) != nt)
            throw IOError("load_grid: snapshot count mismatch in " + path);
    }
    g.xs.resize(static_cast<std::size_t>(nx));
    for (int c = 0; c < components; ++c) g.values.emplace_back(MatrixXd::Zero(nx, nt));
    for (long i = 0; i < nx; ++i) {
        if (!std::getline(is, line)) throw IOError("load_grid: truncated data in " + path);
        std::istringstream ss(line);
        if (!(ss >> g.xs[static_cast<std::size_t>(i)]))
            throw IOError("load_grid: bad row in " + path);
        for (int c = 0; c < components; ++c)
            for (long j = 0; j < nt; ++j)
                if (!(ss >> g.values[c](i, j))) throw IOError("load_grid: bad row in " + path);
    }
    return g;
}

}  // namespace rdnn
