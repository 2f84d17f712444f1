// Command-line front end: run experiments, rebuild references, compare runs
// against them, and inspect stored artifacts.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rdnn/runner.hpp"

namespace {

std::string output_root(const std::string& cli_value) {
    if (!cli_value.empty()) return cli_value;
    if (const char* env = std::getenv("RDNN_OUT_ROOT"); env && *env) return env;
    return "runs";
}

rdnn::ExperimentConfig load_config(const std::string& path,
                                   const std::vector<std::string>& overrides) {
    std::ifstream is(path);
    if (!is) throw rdnn::IOError("cannot open config " + path);
    nlohmann::json doc;
    try {
        is >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw rdnn::ConfigError(path + " is not valid JSON: " + e.what());
    }
    for (const auto& o : overrides) rdnn::apply_override(doc, o);
    return rdnn::parse_config(doc);
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out, bool quiet) {
    const rdnn::ExperimentConfig cfg = load_config(config_path, overrides);
    const std::string root = output_root(out);
    const std::string run_dir = root + "/" + cfg.name;
    const std::string cache = root + "/.mol_cache";
    rdnn::RunResult res =
        rdnn::run_experiment(cfg, run_dir, cache, quiet ? nullptr : &std::cout);
    if (res.status != "ok") {
        std::cerr << "run " << cfg.name << " did not finish cleanly: " << res.status << "\n";
        return 1;
    }
    return 0;
}

int cmd_reference(const std::string& config_path, const std::vector<std::string>& overrides,
                  const std::string& out_file) {
    const rdnn::ExperimentConfig cfg = load_config(config_path, overrides);
    rdnn::GridSolution g = rdnn::build_reference(cfg, rdnn::resolve_error_times(cfg));
    rdnn::save_grid(g, out_file);
    std::cout << "reference " << cfg.equation_name << ": nx=" << g.nx() << " nt=" << g.nt()
              << " -> " << out_file << "\n";
    return 0;
}

int cmd_compare(const std::string& run_dir) {
    nlohmann::json report = rdnn::compare_run(run_dir);
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_inspect(const std::string& path) {
    const auto ends_with = [&path](const char* suffix) {
        const std::string s(suffix);
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".ckpt")) {
        rdnn::NetworkParams net = rdnn::load_checkpoint(path);
        std::cout << "checkpoint " << path << "\n  layers:";
        for (int n : net.layer_sizes) std::cout << ' ' << n;
        std::cout << "\n  parameters: " << net.parameter_count() << "\n  seed: " << net.seed
                  << "\n  weight norm: " << rdnn::to_flat(net).norm() << "\n";
        return 0;
    }
    if (ends_with(".grid")) {
        rdnn::GridSolution g = rdnn::load_grid(path);
        std::cout << "grid " << path << "\n  components: " << g.components()
                  << "\n  nx: " << g.nx() << " over [" << g.xs.front() << ", " << g.xs.back()
                  << "]\n  times:";
        for (double t : g.ts) std::cout << ' ' << t;
        std::cout << "\n";
        return 0;
    }
    if (ends_with(".json")) {
        std::ifstream is(path);
        if (!is) throw rdnn::IOError("cannot open " + path);
        nlohmann::json j;
        is >> j;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    throw rdnn::Error("inspect: unsupported file type (expect .ckpt, .grid or .json)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reaction-diffusion neural solver"};
    app.require_subcommand(1);

    std::string config_path, out, run_dir, path;
    std::vector<std::string> overrides;
    bool quiet = false;

    CLI::App* run = app.add_subcommand("run", "train an experiment from a config file");
    run->add_option("--config", config_path, "config JSON path")->required();
    run->add_option("--set", overrides, "override config fields, key.path=value");
    run->add_option("--out", out, "output root (default $RDNN_OUT_ROOT or ./runs)");
    run->add_flag("--quiet", quiet, "suppress progress output");

    CLI::App* ref = app.add_subcommand("reference", "write the reference solution grid");
    ref->add_option("--config", config_path, "config JSON path")->required();
    ref->add_option("--set", overrides, "override config fields, key.path=value");
    ref->add_option("--out", out, "output grid file")->required();

    CLI::App* cmp = app.add_subcommand("compare", "recompute errors for a finished run");
    cmp->add_option("--run", run_dir, "run directory")->required();

    CLI::App* ins = app.add_subcommand("inspect", "describe a checkpoint, grid or JSON file");
    ins->add_option("path", path, "file to inspect")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, overrides, out, quiet);
        if (ref->parsed()) return cmd_reference(config_path, overrides, out);
        if (cmp->parsed()) return cmd_compare(run_dir);
        if (ins->parsed()) return cmd_inspect(path);
    } catch (const rdnn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
