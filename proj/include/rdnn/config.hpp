#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdnn/bc_losses.hpp"
#include "rdnn/common.hpp"
#include "rdnn/equations.hpp"
#include "rdnn/marching.hpp"

namespace rdnn {

using nlohmann::json;

struct ReferenceSettings {
    std::string source;  // "exact" | "mol" | "file"
    int nx = 0;
    double dt = 0.0;
    std::string path;
};

struct OutputSettings {
    long error_every = 200;  // epochs between error-trace rows; 0 disables
    int error_nx = 401;
    int error_nt = 26;                  // used when error_times is empty
    std::vector<double> error_times;    // explicit comparison times
    std::vector<double> snapshot_times; // profile dumps in the run directory
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::uint64_t seed = 1;
    std::string equation_name = "diffusion";
    std::map<std::string, double> equation_params;
    DomainSpec domain{-3.0, 3.0, 3.0};
    std::vector<double> breakpoints;  // resolved plan, starts 0 ends t_end
    std::vector<int> layer_sizes;
    BCStrategy strategy;
    SampleCounts counts{8000, 10000, 10000};
    long n_ic_fit = 0;
    double eps_ic = 5e-6;
    long ic_max_epochs = 100000;
    StopCriterion stop;
    long max_epochs = 100000;
    std::vector<long> max_epochs_by_window;  // optional per-subdomain budgets
    LossWeights weights;
    LRSchedule schedule = LRSchedule::standard();
    ReferenceSettings reference;
    OutputSettings output;

    SubdomainPlan plan() const { return SubdomainPlan{breakpoints}; }

    MarchSettings march_settings() const {
        MarchSettings s;
        s.layer_sizes = layer_sizes;
        s.counts = counts;
        s.n_ic_fit = n_ic_fit;
        s.eps_ic = eps_ic;
        s.ic_max_epochs = ic_max_epochs;
        s.stop = stop;
        s.max_epochs = max_epochs;
        s.max_epochs_by_window = max_epochs_by_window;
        s.schedule = schedule;
        s.weights = weights;
        s.seed = seed;
        return s;
    }
};

inline EquationSpec make_equation(const ExperimentConfig& c) {
    auto get = [&c](const char* key, double fallback) {
        auto it = c.equation_params.find(key);
        return it == c.equation_params.end() ? fallback : it->second;
    };
    if (c.equation_name == "diffusion") return make_diffusion(get("d", 1.0));
    if (c.equation_name == "bistable") return make_bistable(get("a", 0.2), get("d", 1.0));
    if (c.equation_name == "barkley")
        return make_barkley(get("a", 0.3), get("b", 0.01), get("eps", 0.009));
    throw ConfigError("equation.name: unknown equation '" + c.equation_name + "'");
}

namespace detail {

[[noreturn]] inline void cfg_fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

inline void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) cfg_fail(path, "expected an object");
}

inline void reject_unknown(const json& j, const std::string& path,
                           const std::set<std::string>& known) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            cfg_fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

inline double as_num(const json& j, const std::string& path) {
    if (!j.is_number()) cfg_fail(path, "expected a number");
    return j.get<double>();
}

inline long as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) cfg_fail(path, "expected an integer");
    return j.get<long>();
}

inline std::string as_str(const json& j, const std::string& path) {
    if (!j.is_string()) cfg_fail(path, "expected a string");
    return j.get<std::string>();
}

inline std::vector<double> as_num_list(const json& j, const std::string& path) {
    if (!j.is_array()) cfg_fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_num(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace detail

// Parses and fully validates a config document.  Every diagnostic names the
// offending field by its dotted path.
inline ExperimentConfig parse_config(const json& root) {
    using namespace detail;
    expect_object(root, "(root)");
    reject_unknown(root, "", {"name", "seed", "equation", "domain", "plan", "network",
                              "strategy", "samples", "training", "reference", "output"});
    ExperimentConfig c;

    if (root.contains("name")) c.name = as_str(root["name"], "name");
    if (root.contains("seed")) {
        const long s = as_int(root["seed"], "seed");
        if (s < 0) cfg_fail("seed", "must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }

    // equation
    if (root.contains("equation")) {
        const json& e = root["equation"];
        expect_object(e, "equation");
        reject_unknown(e, "equation", {"name", "params"});
        if (!e.contains("name")) cfg_fail("equation.name", "required");
        c.equation_name = as_str(e["name"], "equation.name");
        static const std::map<std::string, std::set<std::string>> allowed = {
            {"diffusion", {"d"}}, {"bistable", {"a", "d"}}, {"barkley", {"a", "b", "eps"}}};
        auto it = allowed.find(c.equation_name);
        if (it == allowed.end())
            cfg_fail("equation.name", "unknown equation '" + c.equation_name + "'");
        if (e.contains("params")) {
            const json& p = e["params"];
            expect_object(p, "equation.params");
            reject_unknown(p, "equation.params", it->second);
            for (auto pit = p.begin(); pit != p.end(); ++pit)
                c.equation_params[pit.key()] =
                    as_num(pit.value(), "equation.params." + pit.key());
        }
    }
    const int d_out = c.equation_name == "barkley" ? 2 : 1;

    // domain
    if (root.contains("domain")) {
        const json& d = root["domain"];
        expect_object(d, "domain");
        reject_unknown(d, "domain", {"x_min", "x_max", "t_end"});
        if (d.contains("x_min")) c.domain.x_min = as_num(d["x_min"], "domain.x_min");
        if (d.contains("x_max")) c.domain.x_max = as_num(d["x_max"], "domain.x_max");
        if (d.contains("t_end")) c.domain.t_end = as_num(d["t_end"], "domain.t_end");
        if (!(c.domain.x_min < c.domain.x_max)) cfg_fail("domain.x_min", "must be < domain.x_max");
        if (!(c.domain.t_end > 0.0)) cfg_fail("domain.t_end", "must be positive");
    }

    // plan
    c.breakpoints = {0.0, c.domain.t_end};
    if (root.contains("plan")) {
        const json& p = root["plan"];
        expect_object(p, "plan");
        reject_unknown(p, "plan", {"breakpoints", "uniform"});
        if (p.contains("breakpoints") && p.contains("uniform"))
            cfg_fail("plan", "give either breakpoints or uniform, not both");
        if (p.contains("breakpoints")) {
            c.breakpoints = as_num_list(p["breakpoints"], "plan.breakpoints");
            try {
                SubdomainPlan{c.breakpoints}.validate(c.domain.t_end);
            } catch (const Error& err) {
                cfg_fail("plan.breakpoints", err.what());
            }
        } else if (p.contains("uniform")) {
            const long n = as_int(p["uniform"], "plan.uniform");
            if (n < 1) cfg_fail("plan.uniform", "must be >= 1");
            c.breakpoints = SubdomainPlan::uniform(c.domain.t_end, static_cast<int>(n)).breakpoints;
        }
    }

    // network
    c.layer_sizes = {2, 60, 60, 60, 60, d_out};
    if (root.contains("network")) {
        const json& n = root["network"];
        expect_object(n, "network");
        reject_unknown(n, "network", {"hidden_layers", "hidden_units", "layer_sizes"});
        if (n.contains("layer_sizes")) {
            if (n.contains("hidden_layers") || n.contains("hidden_units"))
                cfg_fail("network", "give either layer_sizes or hidden_layers/hidden_units");
            c.layer_sizes.clear();
            for (double v : as_num_list(n["layer_sizes"], "network.layer_sizes"))
                c.layer_sizes.push_back(static_cast<int>(v));
            if (c.layer_sizes.size() < 2) cfg_fail("network.layer_sizes", "need >= 2 entries");
            if (c.layer_sizes.front() != 2)
                cfg_fail("network.layer_sizes", "input width must be 2 (x, t)");
            if (c.layer_sizes.back() != d_out)
                cfg_fail("network.layer_sizes", "output width must match the equation (" +
                                                    std::to_string(d_out) + ")");
            for (int v : c.layer_sizes)
                if (v <= 0) cfg_fail("network.layer_sizes", "entries must be positive");
        } else {
            long layers = 4, units = 60;
            if (n.contains("hidden_layers"))
                layers = as_int(n["hidden_layers"], "network.hidden_layers");
            if (n.contains("hidden_units"))
                units = as_int(n["hidden_units"], "network.hidden_units");
            if (layers < 1) cfg_fail("network.hidden_layers", "must be >= 1");
            if (units < 1) cfg_fail("network.hidden_units", "must be >= 1");
            c.layer_sizes.assign(1, 2);
            for (long i = 0; i < layers; ++i) c.layer_sizes.push_back(static_cast<int>(units));
            c.layer_sizes.push_back(d_out);
        }
    } else {
        c.layer_sizes.back() = d_out;
    }

    // strategy
    if (root.contains("strategy")) {
        const json& s = root["strategy"];
        expect_object(s, "strategy");
        reject_unknown(s, "strategy",
                       {"kind", "fd_order", "fd_dx", "pf_variant", "pf_xi", "pf_margin"});
        if (!s.contains("kind")) cfg_fail("strategy.kind", "required");
        const std::string kind = as_str(s["kind"], "strategy.kind");
        if (kind == "vanilla") c.strategy.kind = BCKind::Vanilla;
        else if (kind == "finite_difference") c.strategy.kind = BCKind::FiniteDifference;
        else if (kind == "phase_field") c.strategy.kind = BCKind::PhaseField;
        else if (kind == "mirror") c.strategy.kind = BCKind::Mirror;
        else cfg_fail("strategy.kind", "unknown value '" + kind + "'");
        if (s.contains("fd_order")) {
            const long o = as_int(s["fd_order"], "strategy.fd_order");
            if (o < 2 || o > 4) cfg_fail("strategy.fd_order", "must be 2, 3 or 4");
            c.strategy.fd_order = static_cast<int>(o);
        }
        if (s.contains("fd_dx")) {
            c.strategy.fd_dx = as_num(s["fd_dx"], "strategy.fd_dx");
            if (!(c.strategy.fd_dx > 0.0)) cfg_fail("strategy.fd_dx", "must be positive");
        }
        if (s.contains("pf_variant")) {
            const long v = as_int(s["pf_variant"], "strategy.pf_variant");
            if (v != 1 && v != 2) cfg_fail("strategy.pf_variant", "must be 1 or 2");
            c.strategy.pf_variant = static_cast<int>(v);
        }
        if (s.contains("pf_xi")) {
            c.strategy.pf_xi = as_num(s["pf_xi"], "strategy.pf_xi");
            if (!(c.strategy.pf_xi > 0.0)) cfg_fail("strategy.pf_xi", "must be positive");
        }
        if (s.contains("pf_margin")) {
            c.strategy.pf_margin = as_num(s["pf_margin"], "strategy.pf_margin");
            if (!(c.strategy.pf_margin > 0.0)) cfg_fail("strategy.pf_margin", "must be positive");
        }
        if (c.strategy.kind == BCKind::FiniteDifference &&
            c.strategy.fd_order * c.strategy.fd_dx >= c.domain.width())
            cfg_fail("strategy.fd_dx", "stations would leave the domain");
    }

    // samples
    if (root.contains("samples")) {
        const json& s = root["samples"];
        expect_object(s, "samples");
        reject_unknown(s, "samples", {"interior", "boundary", "initial", "ic_fit"});
        auto positive = [&s](const char* key, long fallback) {
            if (!s.contains(key)) return fallback;
            const long v = as_int(s[key], std::string("samples.") + key);
            if (v < 1) cfg_fail(std::string("samples.") + key, "must be >= 1");
            return v;
        };
        c.counts.n_interior = positive("interior", c.counts.n_interior);
        c.counts.n_boundary = positive("boundary", c.counts.n_boundary);
        c.counts.n_initial = positive("initial", c.counts.n_initial);
        if (s.contains("ic_fit")) {
            c.n_ic_fit = as_int(s["ic_fit"], "samples.ic_fit");
            if (c.n_ic_fit < 0) cfg_fail("samples.ic_fit", "must be >= 0 (0 reuses initial)");
        }
    }

    // training
    if (root.contains("training")) {
        const json& t = root["training"];
        expect_object(t, "training");
        reject_unknown(t, "training", {"eps_ic", "ic_max_epochs", "stop", "max_epochs",
                                       "max_epochs_by_window", "weights", "schedule"});
        if (t.contains("eps_ic")) {
            c.eps_ic = as_num(t["eps_ic"], "training.eps_ic");
            if (!(c.eps_ic > 0.0)) cfg_fail("training.eps_ic", "must be positive");
        }
        if (t.contains("ic_max_epochs")) {
            c.ic_max_epochs = as_int(t["ic_max_epochs"], "training.ic_max_epochs");
            if (c.ic_max_epochs < 1) cfg_fail("training.ic_max_epochs", "must be >= 1");
        }
        if (t.contains("max_epochs")) {
            c.max_epochs = as_int(t["max_epochs"], "training.max_epochs");
            if (c.max_epochs < 1) cfg_fail("training.max_epochs", "must be >= 1");
        }
        if (t.contains("max_epochs_by_window")) {
            const json& b = t["max_epochs_by_window"];
            if (!b.is_array()) cfg_fail("training.max_epochs_by_window", "must be an array");
            for (const auto& v : b) {
                const long n = as_int(v, "training.max_epochs_by_window[]");
                if (n < 1) cfg_fail("training.max_epochs_by_window", "entries must be >= 1");
                c.max_epochs_by_window.push_back(n);
            }
            const std::size_t windows = c.breakpoints.size() - 1;
            if (c.max_epochs_by_window.size() != windows)
                cfg_fail("training.max_epochs_by_window",
                         "needs one entry per subdomain (" + std::to_string(windows) + ")");
        }
        if (t.contains("stop")) {
            const json& s = t["stop"];
            expect_object(s, "training.stop");
            reject_unknown(s, "training.stop", {"kind", "epsilon", "period", "window"});
            if (s.contains("kind")) {
                const std::string kind = as_str(s["kind"], "training.stop.kind");
                if (kind == "trailing_mean") c.stop.kind = StopKind::TrailingMean;
                else if (kind == "log_ratio") c.stop.kind = StopKind::LogRatio;
                else if (kind == "min_log_ratio") c.stop.kind = StopKind::MinLogRatio;
                else cfg_fail("training.stop.kind", "unknown value '" + kind + "'");
            }
            if (s.contains("epsilon"))
                c.stop.epsilon = as_num(s["epsilon"], "training.stop.epsilon");
            if (s.contains("period")) c.stop.period = as_int(s["period"], "training.stop.period");
            if (s.contains("window")) c.stop.window = as_int(s["window"], "training.stop.window");
            try {
                c.stop.validate();
            } catch (const Error& err) {
                cfg_fail("training.stop", err.what());
            }
        }
        if (t.contains("weights")) {
            const json& w = t["weights"];
            expect_object(w, "training.weights");
            reject_unknown(w, "training.weights", {"interior", "boundary", "initial"});
            auto wnum = [&w](const char* key, double fallback) {
                if (!w.contains(key)) return fallback;
                const double v = as_num(w[key], std::string("training.weights.") + key);
                if (v < 0.0) cfg_fail(std::string("training.weights.") + key, "must be >= 0");
                return v;
            };
            c.weights.interior = wnum("interior", 1.0);
            c.weights.boundary = wnum("boundary", 1.0);
            c.weights.initial = wnum("initial", 1.0);
        }
        if (t.contains("schedule")) {
            const json& s = t["schedule"];
            expect_object(s, "training.schedule");
            reject_unknown(s, "training.schedule", {"initial_rate", "stages", "fixed", "latched"});
            if (s.contains("fixed")) {
                if (s.contains("initial_rate") || s.contains("stages"))
                    cfg_fail("training.schedule", "fixed excludes initial_rate/stages");
                const double r = as_num(s["fixed"], "training.schedule.fixed");
                if (!(r > 0.0)) cfg_fail("training.schedule.fixed", "must be positive");
                c.schedule = LRSchedule::fixed(r);
            } else {
                if (s.contains("initial_rate"))
                    c.schedule.initial_rate =
                        as_num(s["initial_rate"], "training.schedule.initial_rate");
                if (s.contains("stages")) {
                    c.schedule.stages.clear();
                    const json& st = s["stages"];
                    if (!st.is_array()) cfg_fail("training.schedule.stages", "expected an array");
                    for (std::size_t i = 0; i < st.size(); ++i) {
                        const std::string p =
                            "training.schedule.stages[" + std::to_string(i) + "]";
                        auto pair = as_num_list(st[i], p);
                        if (pair.size() != 2) cfg_fail(p, "expected [threshold, rate]");
                        c.schedule.stages.emplace_back(pair[0], pair[1]);
                    }
                }
            }
            if (s.contains("latched")) {
                const long l = as_int(s["latched"], "training.schedule.latched");
                if (l < -1 || l >= static_cast<long>(c.schedule.stages.size()))
                    cfg_fail("training.schedule.latched", "out of range");
                c.schedule.latched = static_cast<int>(l);
            }
            try {
                c.schedule.validate();
            } catch (const Error& err) {
                cfg_fail("training.schedule", err.what());
            }
        }
    }

    // reference defaults depend on the equation
    if (c.equation_name == "diffusion") c.reference = {"exact", 601, 1e-5, ""};
    else if (c.equation_name == "bistable") c.reference = {"mol", 2001, 1e-4, ""};
    else c.reference = {"mol", 2001, 5e-5, ""};
    if (root.contains("reference")) {
        const json& r = root["reference"];
        expect_object(r, "reference");
        reject_unknown(r, "reference", {"source", "nx", "dt", "path"});
        if (r.contains("source")) c.reference.source = as_str(r["source"], "reference.source");
        if (c.reference.source != "exact" && c.reference.source != "mol" &&
            c.reference.source != "file")
            cfg_fail("reference.source", "unknown value '" + c.reference.source + "'");
        if (c.reference.source == "exact" && c.equation_name != "diffusion")
            cfg_fail("reference.source", "no closed-form solution for " + c.equation_name);
        if (r.contains("nx")) {
            c.reference.nx = static_cast<int>(as_int(r["nx"], "reference.nx"));
            if (c.reference.nx < 3) cfg_fail("reference.nx", "must be >= 3");
        }
        if (r.contains("dt")) {
            c.reference.dt = as_num(r["dt"], "reference.dt");
            if (!(c.reference.dt > 0.0)) cfg_fail("reference.dt", "must be positive");
        }
        if (r.contains("path")) c.reference.path = as_str(r["path"], "reference.path");
        if (c.reference.source == "file" && c.reference.path.empty())
            cfg_fail("reference.path", "required when source is 'file'");
    }

    // output
    if (root.contains("output")) {
        const json& o = root["output"];
        expect_object(o, "output");
        reject_unknown(o, "output",
                       {"error_every", "error_nx", "error_nt", "error_times", "snapshot_times"});
        if (o.contains("error_every")) {
            c.output.error_every = as_int(o["error_every"], "output.error_every");
            if (c.output.error_every < 0) cfg_fail("output.error_every", "must be >= 0");
        }
        if (o.contains("error_nx")) {
            c.output.error_nx = static_cast<int>(as_int(o["error_nx"], "output.error_nx"));
            if (c.output.error_nx < 2) cfg_fail("output.error_nx", "must be >= 2");
        }
        if (o.contains("error_nt")) {
            c.output.error_nt = static_cast<int>(as_int(o["error_nt"], "output.error_nt"));
            if (c.output.error_nt < 2) cfg_fail("output.error_nt", "must be >= 2");
        }
        auto times_in_domain = [&c](std::vector<double> v, const std::string& path) {
            for (double t : v)
                if (t < -1e-12 || t > c.domain.t_end + 1e-9)
                    cfg_fail(path, "time outside [0, t_end]");
            return v;
        };
        if (o.contains("error_times"))
            c.output.error_times =
                times_in_domain(as_num_list(o["error_times"], "output.error_times"),
                                "output.error_times");
        if (o.contains("snapshot_times"))
            c.output.snapshot_times =
                times_in_domain(as_num_list(o["snapshot_times"], "output.snapshot_times"),
                                "output.snapshot_times");
    }
    if (c.output.snapshot_times.empty()) c.output.snapshot_times = {0.0, c.domain.t_end};

    return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

// Full round-trippable dump with every field resolved.
inline json to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["seed"] = c.seed;
    j["equation"]["name"] = c.equation_name;
    if (!c.equation_params.empty()) {
        for (const auto& [k, v] : c.equation_params) j["equation"]["params"][k] = v;
    }
    j["domain"] = {{"x_min", c.domain.x_min}, {"x_max", c.domain.x_max},
                   {"t_end", c.domain.t_end}};
    j["plan"]["breakpoints"] = c.breakpoints;
    j["network"]["layer_sizes"] = c.layer_sizes;
    json s;
    s["kind"] = to_string(c.strategy.kind);
    if (c.strategy.kind == BCKind::FiniteDifference) {
        s["fd_order"] = c.strategy.fd_order;
        s["fd_dx"] = c.strategy.fd_dx;
    }
    if (c.strategy.kind == BCKind::PhaseField) {
        s["pf_variant"] = c.strategy.pf_variant;
        s["pf_xi"] = c.strategy.pf_xi;
        s["pf_margin"] = c.strategy.pf_margin;
    }
    j["strategy"] = s;
    j["samples"] = {{"interior", c.counts.n_interior}, {"boundary", c.counts.n_boundary},
                    {"initial", c.counts.n_initial}, {"ic_fit", c.n_ic_fit}};
    j["training"]["eps_ic"] = c.eps_ic;
    j["training"]["ic_max_epochs"] = c.ic_max_epochs;
    j["training"]["max_epochs"] = c.max_epochs;
    j["training"]["stop"] = {{"kind", to_string(c.stop.kind)}, {"epsilon", c.stop.epsilon},
                             {"period", c.stop.period}, {"window", c.stop.window}};
    j["training"]["weights"] = {{"interior", c.weights.interior},
                                {"boundary", c.weights.boundary},
                                {"initial", c.weights.initial}};
    json sched;
    sched["initial_rate"] = c.schedule.initial_rate;
    json stages = json::array();
    for (const auto& [thr, rate] : c.schedule.stages) stages.push_back({thr, rate});
    sched["stages"] = stages;
    sched["latched"] = c.schedule.latched;
    j["training"]["schedule"] = sched;
    j["reference"] = {{"source", c.reference.source}, {"nx", c.reference.nx},
                      {"dt", c.reference.dt}};
    if (!c.reference.path.empty()) j["reference"]["path"] = c.reference.path;
    j["output"] = {{"error_every", c.output.error_every}, {"error_nx", c.output.error_nx},
                   {"error_nt", c.output.error_nt}, {"error_times", c.output.error_times},
                   {"snapshot_times", c.output.snapshot_times}};
    return j;
}

// Applies one "dotted.path=value" override to a raw config document.  The
// value is parsed as JSON when possible, else taken as a string.
inline void apply_override(json& root, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + spec + "': expected key.path=value");
    const std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);

    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // bare string
    }

    json* node = &root;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ConfigError("override '" + spec + "': empty path segment");
        if (dot == std::string::npos) {
            (*node)[key] = parsed;
            return;
        }
        if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = json::object();
        node = &(*node)[key];
        start = dot + 1;
    }
}

inline std::string config_hash(const ExperimentConfig& c) {
    return hex64(fnv1a64(to_json(c).dump()));
}

}  // namespace rdnn
