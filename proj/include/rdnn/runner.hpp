#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rdnn/config.hpp"
#include "rdnn/marching.hpp"
#include "rdnn/reference.hpp"

namespace rdnn {

inline constexpr const char* kLibraryVersion = "1.0.0";

inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 2) throw Error("linspace: need n >= 2");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    out.back() = b;
    return out;
}

// Subdomain index (1-based) whose time window contains t.
inline int subdomain_for_time(const std::vector<double>& breakpoints, double t) {
    const int n = static_cast<int>(breakpoints.size()) - 1;
    for (int k = 1; k <= n; ++k)
        if (t <= breakpoints[static_cast<std::size_t>(k)] + 1e-9) return k;
    return n;
}

inline std::vector<double> resolve_error_times(const ExperimentConfig& c) {
    if (!c.output.error_times.empty()) return c.output.error_times;
    return linspace(0.0, c.domain.t_end, c.output.error_nt);
}

inline std::string reference_cache_key(const ExperimentConfig& c,
                                       const std::vector<double>& times) {
    std::string s = c.equation_name;
    for (const auto& [k, v] : c.equation_params) s += "," + k + "=" + std::to_string(v);
    char buf[256];
    std::snprintf(buf, sizeof buf, "|%.17g,%.17g,%.17g|%d|%.17g|", c.domain.x_min,
                  c.domain.x_max, c.domain.t_end, c.reference.nx, c.reference.dt);
    s += buf;
    for (double t : times) {
        std::snprintf(buf, sizeof buf, "%.17g;", t);
        s += buf;
    }
    return hex64(fnv1a64(s));
}

// Reference solution sampled at the comparison times.  "exact" evaluates the
// closed form on a fresh mesh, "mol" integrates (with optional disk cache),
// "file" loads a stored grid whose times take precedence.
inline GridSolution build_reference(const ExperimentConfig& c,
                                    const std::vector<double>& times,
                                    const std::string& cache_dir = "") {
    const EquationSpec eq = make_equation(c);
    if (c.reference.source == "exact") {
        if (!eq.exact) throw ConfigError("reference.source: no closed form for " + eq.name);
        GridSolution g;
        g.xs = linspace(c.domain.x_min, c.domain.x_max, c.output.error_nx);
        g.ts = times;
        RowVectorXd xs_row(g.nx());
        for (long i = 0; i < g.nx(); ++i) xs_row(i) = g.xs[static_cast<std::size_t>(i)];
        for (int comp = 0; comp < eq.d_out; ++comp)
            g.values.emplace_back(MatrixXd::Zero(g.nx(), g.nt()));
        for (long j = 0; j < g.nt(); ++j) {
            MatrixXd u = eq.exact(xs_row, g.ts[static_cast<std::size_t>(j)]);
            for (int comp = 0; comp < eq.d_out; ++comp)
                g.values[comp].col(j) = u.row(comp).transpose();
        }
        return g;
    }
    if (c.reference.source == "file") return load_grid(c.reference.path);

    std::string cache_path;
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        cache_path = cache_dir + "/" + reference_cache_key(c, times) + ".grid";
        if (std::filesystem::exists(cache_path)) return load_grid(cache_path);
    }
    GridSolution g = mol_solve(eq, c.domain, c.reference.nx, c.reference.dt, times);
    if (!cache_path.empty()) save_grid(g, cache_path);
    return g;
}

struct RunPaths {
    std::string dir, config, loss_trace, error_trace, snapshots, manifest, reference;
    std::vector<std::string> checkpoints;
};

struct RunResult {
    RunPaths paths;
    std::string status;
    MarchResult march;
    GridSolution reference;
};

namespace detail {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

}  // namespace detail

// Executes a configured experiment and writes the run directory:
// config.json (resolved), loss_trace.csv (every epoch), error_trace.csv
// (cadenced l-inf against the reference), reference.grid, snapshots.grid
// (composite solution at the snapshot times), checkpoints/*.ckpt and
// manifest.json.  Loss and error traces are deterministic for a fixed
// config+seed; the manifest carries wall-clock times and is not.
inline RunResult run_experiment(const ExperimentConfig& c, const std::string& out_dir,
                                const std::string& cache_dir = "",
                                std::ostream* log = nullptr) {
    namespace fs = std::filesystem;
    const auto t_start = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/checkpoints");

    RunResult result;
    result.paths.dir = out_dir;
    result.paths.config = out_dir + "/config.json";
    result.paths.loss_trace = out_dir + "/loss_trace.csv";
    result.paths.error_trace = out_dir + "/error_trace.csv";
    result.paths.snapshots = out_dir + "/snapshots.grid";
    result.paths.manifest = out_dir + "/manifest.json";
    result.paths.reference = out_dir + "/reference.grid";

    {
        std::ofstream os(result.paths.config);
        os << to_json(c).dump(2) << "\n";
        if (!os) throw IOError("run: cannot write " + result.paths.config);
    }

    const EquationSpec eq = make_equation(c);
    const std::vector<double> error_times = resolve_error_times(c);
    result.reference = build_reference(c, error_times, cache_dir);
    result.reference.validate();
    save_grid(result.reference, result.paths.reference);

    std::ofstream loss_os(result.paths.loss_trace);
    std::ofstream err_os(result.paths.error_trace);
    if (!loss_os || !err_os) throw IOError("run: cannot open trace files in " + out_dir);
    loss_os << "global_epoch,phase,subdomain,local_epoch,l_interior,l_boundary,l_initial,"
               "total,lr\n";
    err_os << "global_epoch,subdomain,linf\n";

    // Reference columns grouped per subdomain window for cadenced errors.
    const int n_sub = static_cast<int>(c.breakpoints.size()) - 1;
    std::vector<std::vector<long>> window_cols(static_cast<std::size_t>(n_sub) + 1);
    for (long j = 0; j < result.reference.nt(); ++j) {
        const double t = result.reference.ts[static_cast<std::size_t>(j)];
        for (int k = 1; k <= n_sub; ++k)
            if (t >= c.breakpoints[static_cast<std::size_t>(k - 1)] - 1e-9 &&
                t <= c.breakpoints[static_cast<std::size_t>(k)] + 1e-9)
                window_cols[static_cast<std::size_t>(k)].push_back(j);
    }

    RowVectorXd ref_xs_row(result.reference.nx());
    for (long i = 0; i < result.reference.nx(); ++i)
        ref_xs_row(i) = result.reference.xs[static_cast<std::size_t>(i)];

    long global_epoch = 0;
    EpochObserver observer = [&](const PhaseInfo& info, const EpochRow& row,
                                 const NetworkParams& net) {
        ++global_epoch;
        loss_os << global_epoch << ',' << (info.ic_fit ? "ic_fit" : "train") << ','
                << info.subdomain << ',' << row.epoch << ',' << detail::fmt_g(row.l_interior)
                << ',' << detail::fmt_g(row.l_boundary) << ',' << detail::fmt_g(row.l_initial)
                << ',' << detail::fmt_g(row.total) << ',' << detail::fmt_g(row.lr) << '\n';
        if (info.ic_fit || c.output.error_every == 0) return;
        if (row.epoch % c.output.error_every != 0) return;
        const auto& cols = window_cols[static_cast<std::size_t>(info.subdomain)];
        if (cols.empty()) return;
        double err = 0.0;
        for (long j : cols) {
            MatrixXd u = evaluate_at_time(net, ref_xs_row,
                                          result.reference.ts[static_cast<std::size_t>(j)]);
            for (int comp = 0; comp < eq.d_out; ++comp)
                err = std::max(err, (u.row(comp).transpose() -
                                     result.reference.values[static_cast<std::size_t>(comp)]
                                         .col(j))
                                        .cwiseAbs()
                                        .maxCoeff());
        }
        err_os << global_epoch << ',' << info.subdomain << ',' << detail::fmt_g(err) << '\n';
    };

    result.march = march(eq, c.domain, c.strategy, c.plan(), c.march_settings(), observer);
    result.status = result.march.status;
    loss_os.flush();
    err_os.flush();

    for (const auto& [label, net] : result.march.phase_nets) {
        const std::string path = out_dir + "/checkpoints/" + label + ".ckpt";
        save_checkpoint(net, path);
        result.paths.checkpoints.push_back(path);
    }
    if (result.status == "ok") {
        const std::string path = out_dir + "/checkpoints/final.ckpt";
        save_checkpoint(result.march.final_net, path);
        result.paths.checkpoints.push_back(path);
    }

    // Composite solution: each snapshot time is answered by the net of the
    // subdomain that owns it.
    if (result.status == "ok" && !c.output.snapshot_times.empty()) {
        GridSolution snap;
        snap.xs = result.reference.xs;
        snap.ts = c.output.snapshot_times;
        std::sort(snap.ts.begin(), snap.ts.end());
        for (int comp = 0; comp < eq.d_out; ++comp)
            snap.values.emplace_back(MatrixXd::Zero(snap.nx(), snap.nt()));
        RowVectorXd xs_row(snap.nx());
        for (long i = 0; i < snap.nx(); ++i) xs_row(i) = snap.xs[static_cast<std::size_t>(i)];
        for (long j = 0; j < snap.nt(); ++j) {
            const double t = snap.ts[static_cast<std::size_t>(j)];
            const int k = subdomain_for_time(c.breakpoints, t);
            const NetworkParams* net = &result.march.final_net;
            for (const auto& [label, n] : result.march.phase_nets)
                if (label == "subdomain_" + std::to_string(k)) net = &n;
            MatrixXd u = evaluate_at_time(*net, xs_row, t);
            for (int comp = 0; comp < eq.d_out; ++comp)
                snap.values[static_cast<std::size_t>(comp)].col(j) = u.row(comp).transpose();
        }
        save_grid(snap, result.paths.snapshots);
    }

    const double wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    json manifest;
    manifest["name"] = c.name;
    manifest["library_version"] = kLibraryVersion;
    manifest["config_hash"] = config_hash(c);
    manifest["seed"] = c.seed;
    manifest["status"] = result.status;
    manifest["wall_time_s"] = wall_s;
    json phases = json::array();
    long cum = 0;
    for (const auto& rec : result.march.records) {
        cum += static_cast<long>(rec.rows.size());
        json p;
        p["phase"] = rec.ic_fit ? "ic_fit" : "train";
        p["subdomain"] = rec.subdomain_index;
        p["t0"] = rec.t0;
        p["t1"] = rec.t1;
        p["epochs"] = rec.rows.size();
        p["global_epoch_end"] = cum;
        p["stop_reason"] = rec.stop_reason;
        // The loss of the parameters the phase handed back: the training loop
        // restores the lowest-loss state seen, so that is the minimum row.
        double final_total = 0.0;
        if (!rec.rows.empty()) {
            final_total = rec.rows.front().total;
            for (const auto& row : rec.rows) final_total = std::min(final_total, row.total);
        }
        p["final_total"] = final_total;
        phases.push_back(p);
    }
    manifest["phases"] = phases;
    json dirichlet = json::array();
    for (const auto& v : result.march.dirichlet_values) {
        json vv = json::array();
        for (long i = 0; i < v.size(); ++i) vv.push_back(v(i));
        dirichlet.push_back(vv);
    }
    manifest["dirichlet_values"] = dirichlet;
    json artifacts;
    artifacts["config"] = "config.json";
    artifacts["loss_trace"] = "loss_trace.csv";
    artifacts["error_trace"] = "error_trace.csv";
    artifacts["reference"] = "reference.grid";
    artifacts["snapshots"] = "snapshots.grid";
    json ckpts = json::array();
    for (const auto& p : result.paths.checkpoints)
        ckpts.push_back(std::filesystem::path(p).filename().string());
    artifacts["checkpoints"] = ckpts;
    manifest["artifacts"] = artifacts;
    {
        std::ofstream os(result.paths.manifest);
        os << manifest.dump(2) << "\n";
        if (!os) throw IOError("run: cannot write " + result.paths.manifest);
    }

    if (log)
        *log << "run " << c.name << ": status=" << result.status << " epochs=" << global_epoch
             << " wall=" << wall_s << "s -> " << out_dir << "\n";
    return result;
}

// Recomputes per-checkpoint errors for a finished run directory.  Writes
// report.json and report_columns.csv (time, subdomain, linf) next to the
// other artifacts and returns the report document.
inline json compare_run(const std::string& run_dir, const std::string& cache_dir = "") {
    std::ifstream cfg_is(run_dir + "/config.json");
    if (!cfg_is) throw IOError("compare: missing " + run_dir + "/config.json");
    std::string cfg_text((std::istreambuf_iterator<char>(cfg_is)),
                         std::istreambuf_iterator<char>());
    const ExperimentConfig c = parse_config_string(cfg_text);
    const EquationSpec eq = make_equation(c);

    GridSolution ref;
    if (std::filesystem::exists(run_dir + "/reference.grid"))
        ref = load_grid(run_dir + "/reference.grid");
    else
        ref = build_reference(c, resolve_error_times(c), cache_dir);

    json manifest;
    {
        std::ifstream is(run_dir + "/manifest.json");
        if (!is) throw IOError("compare: missing " + run_dir + "/manifest.json");
        is >> manifest;
    }

    const int n_sub = static_cast<int>(c.breakpoints.size()) - 1;
    RowVectorXd xs_row(ref.nx());
    for (long i = 0; i < ref.nx(); ++i) xs_row(i) = ref.xs[static_cast<std::size_t>(i)];

    std::ofstream cols(run_dir + "/report_columns.csv");
    cols << "time,subdomain,linf\n";
    json per_sub = json::array();
    double overall = 0.0;
    for (int k = 1; k <= n_sub; ++k) {
        const std::string ckpt = run_dir + "/checkpoints/subdomain_" + std::to_string(k) +
                                 ".ckpt";
        if (!std::filesystem::exists(ckpt)) continue;
        NetworkParams net = load_checkpoint(ckpt);
        double best = std::numeric_limits<double>::infinity();
        double worst = 0.0, at_end = 0.0;
        bool any = false;
        for (long j = 0; j < ref.nt(); ++j) {
            const double t = ref.ts[static_cast<std::size_t>(j)];
            if (t < c.breakpoints[static_cast<std::size_t>(k - 1)] - 1e-9 ||
                t > c.breakpoints[static_cast<std::size_t>(k)] + 1e-9)
                continue;
            MatrixXd u = evaluate_at_time(net, xs_row, t);
            double e = 0.0;
            for (int comp = 0; comp < eq.d_out; ++comp)
                e = std::max(e, (u.row(comp).transpose() -
                                 ref.values[static_cast<std::size_t>(comp)].col(j))
                                    .cwiseAbs()
                                    .maxCoeff());
            cols << detail::fmt_g(t) << ',' << k << ',' << detail::fmt_g(e) << '\n';
            best = std::min(best, e);
            worst = std::max(worst, e);
            at_end = e;
            any = true;
        }
        if (!any) continue;
        overall = std::max(overall, worst);
        json s;
        s["subdomain"] = k;
        s["best_linf"] = best;
        s["worst_linf"] = worst;
        s["linf_at_window_end"] = at_end;
        per_sub.push_back(s);
    }

    json report;
    report["name"] = c.name;
    report["config_hash"] = config_hash(c);
    report["overall_linf"] = overall;
    report["subdomains"] = per_sub;
    report["switch_epochs"] = manifest.contains("phases") ? manifest["phases"] : json::array();
    {
        std::ofstream os(run_dir + "/report.json");
        os << report.dump(2) << "\n";
        if (!os) throw IOError("compare: cannot write " + run_dir + "/report.json");
    }
    return report;
}

}  // namespace rdnn
