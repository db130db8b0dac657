// SPDX-License-Identifier: Apache-2.0
//
// sortmc: sorting sweeps, the transport mini-app and report plotting behind
// one executable. JSON run configurations, flag overrides, exit code 0 on
// success, 1 on validation errors, 2 on runtime failures.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "sortmc/bench.hpp"
#include "sortmc/mc/transport.hpp"
#include "sortmc/svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sortmc;

namespace {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_config_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ValidationError(path.string() + ": malformed JSON at line " +
                              std::to_string(line) + " column " + std::to_string(col) + ": " +
                              e.what());
    }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError("unknown key '" + it.key() + "' in " + where + " config");
}

void expect_mode(const json& j, const std::string& mode) {
    if (j.contains("mode") && j.at("mode").get<std::string>() != mode)
        throw ValidationError("config mode '" + j.at("mode").get<std::string>() +
                              "' does not match subcommand '" + mode + "'");
}

AlgorithmId algorithm_from_name(const std::string& name) {
    for (AlgorithmId id : {AlgorithmId::AdaptiveSingleThread, AlgorithmId::PartitionMultiThread,
                           AlgorithmId::BitonicNetwork})
        if (name == algorithm_name(id))
            return id;
    throw ValidationError("unknown algorithm '" + name + "' (expected adaptive|parallel|bitonic)");
}

mc::SortMode sort_mode_from_name(const std::string& name) {
    if (name == "none") return mc::SortMode::None;
    if (name == "adaptive_each_generation") return mc::SortMode::AdaptiveEachGeneration;
    if (name == "bitonic_each_generation") return mc::SortMode::BitonicEachGeneration;
    if (name == "adaptive_every_k_events") return mc::SortMode::AdaptiveEveryKEvents;
    if (name == "bitonic_every_k_events") return mc::SortMode::BitonicEveryKEvents;
    throw ValidationError("unknown strategy mode '" + name + "'");
}

std::string sort_mode_name(mc::SortMode mode) {
    switch (mode) {
        case mc::SortMode::None: return "none";
        case mc::SortMode::AdaptiveEachGeneration: return "adaptive_each_generation";
        case mc::SortMode::BitonicEachGeneration: return "bitonic_each_generation";
        case mc::SortMode::AdaptiveEveryKEvents: return "adaptive_every_k_events";
        case mc::SortMode::BitonicEveryKEvents: return "bitonic_every_k_events";
    }
    return "none";
}

mc::KeyScheme key_scheme_from_name(const std::string& name) {
    if (name == "group") return mc::KeyScheme::Group;
    if (name == "cell") return mc::KeyScheme::Cell;
    if (name == "cell_then_group") return mc::KeyScheme::CellThenGroup;
    throw ValidationError("unknown key scheme '" + name + "'");
}

std::string key_scheme_name(mc::KeyScheme scheme) {
    switch (scheme) {
        case mc::KeyScheme::Group: return "group";
        case mc::KeyScheme::Cell: return "cell";
        case mc::KeyScheme::CellThenGroup: return "cell_then_group";
    }
    return "cell_then_group";
}

// ---------------------------------------------------------------------------
// sortbench

struct BenchCli {
    std::string config_path;
    std::string out_dir = "results";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<unsigned> repetitions;
    std::optional<unsigned> warmup;
    std::optional<std::size_t> fixed_n;
    std::optional<std::size_t> max_bytes;
    std::vector<std::string> algorithms;
    std::vector<std::size_t> sizes;
    std::vector<double> ratios;
    bool out_set = false;
    bool dump_config = false;
};

void apply_bench_config(const json& j, bool ratio_mode, SweepConfig& cfg, std::string& out_dir) {
    const std::set<std::string> allowed = {"mode",   "algorithms",  "sizes",  "ratios",
                                           "fixed_n", "repetitions", "warmup", "workers",
                                           "seed",   "max_bytes",   "output_dir"};
    reject_unknown_keys(j, allowed, ratio_mode ? "sortbench-ratio" : "sortbench-size");
    expect_mode(j, ratio_mode ? "sortbench-ratio" : "sortbench-size");
    if (j.contains("algorithms")) {
        cfg.algorithms.clear();
        for (const auto& name : j.at("algorithms"))
            cfg.algorithms.push_back(algorithm_from_name(name.get<std::string>()));
    }
    if (j.contains("sizes"))
        cfg.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    if (j.contains("ratios"))
        cfg.ratios = j.at("ratios").get<std::vector<double>>();
    if (j.contains("fixed_n"))
        cfg.fixed_n = j.at("fixed_n").get<std::size_t>();
    if (j.contains("repetitions"))
        cfg.repetitions = j.at("repetitions").get<unsigned>();
    if (j.contains("warmup"))
        cfg.warmup = j.at("warmup").get<unsigned>();
    if (j.contains("workers"))
        cfg.workers = j.at("workers").get<unsigned>();
    if (j.contains("seed"))
        cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("max_bytes"))
        cfg.max_bytes = j.at("max_bytes").get<std::size_t>();
    if (j.contains("output_dir"))
        out_dir = j.at("output_dir").get<std::string>();
}

json bench_config_to_json(const SweepConfig& cfg, bool ratio_mode, const std::string& out_dir) {
    json j;
    j["mode"] = ratio_mode ? "sortbench-ratio" : "sortbench-size";
    json algos = json::array();
    for (AlgorithmId id : cfg.algorithms)
        algos.push_back(std::string(algorithm_name(id)));
    j["algorithms"] = algos;
    if (ratio_mode) {
        j["ratios"] = cfg.ratios;
        j["fixed_n"] = cfg.fixed_n;
    } else {
        j["sizes"] = cfg.sizes;
    }
    j["repetitions"] = cfg.repetitions;
    j["warmup"] = cfg.warmup;
    j["workers"] = cfg.workers;
    j["seed"] = cfg.seed;
    j["max_bytes"] = cfg.max_bytes;
    j["output_dir"] = out_dir;
    return j;
}

int run_sortbench(const BenchCli& cli, bool ratio_mode) {
    SweepConfig cfg;
    std::string out_dir = "results";
    if (!cli.config_path.empty())
        apply_bench_config(load_config_json(cli.config_path), ratio_mode, cfg, out_dir);

    if (!cli.algorithms.empty()) {
        cfg.algorithms.clear();
        for (const std::string& name : cli.algorithms)
            cfg.algorithms.push_back(algorithm_from_name(name));
    }
    if (!cli.sizes.empty())
        cfg.sizes = cli.sizes;
    if (!cli.ratios.empty())
        cfg.ratios = cli.ratios;
    if (cli.fixed_n)
        cfg.fixed_n = *cli.fixed_n;
    if (cli.repetitions)
        cfg.repetitions = *cli.repetitions;
    if (cli.warmup)
        cfg.warmup = *cli.warmup;
    if (cli.workers)
        cfg.workers = *cli.workers;
    if (cli.seed)
        cfg.seed = *cli.seed;
    if (cli.max_bytes)
        cfg.max_bytes = *cli.max_bytes;
    if (cli.out_set || out_dir.empty())
        out_dir = cli.out_dir;

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }

    if (cli.dump_config) {
        std::cout << bench_config_to_json(cfg, ratio_mode, out_dir).dump(2) << "\n";
        return 0;
    }

    fs::create_directories(out_dir);
    const std::vector<BenchRecord> records =
        ratio_mode ? run_ratio_sweep(cfg) : run_size_sweep(cfg);
    for (const BenchRecord& rec : records)
        if (!rec.skip_reason.empty())
            std::cerr << "skipped " << algorithm_name(rec.algorithm) << " n=" << rec.n << ": "
                      << rec.skip_reason << "\n";

    const std::string stem = ratio_mode ? "ratio_sweep" : "size_sweep";
    const fs::path csv = fs::path(out_dir) / (stem + ".csv");
    const fs::path svg = fs::path(out_dir) / (stem + ".svg");
    write_csv(records, csv);
    PlotOptions plot;
    plot.x = ratio_mode ? PlotX::Ratio : PlotX::Size;
    plot.title = ratio_mode ? "Sort time vs swap ratio" : "Sort time vs array size";
    render_loglog_svg(records, plot, svg);
    std::cout << "wrote " << csv.string() << " and " << svg.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// mc run

struct McConfig {
    std::string geometry = "pebble"; // pebble | infinite
    std::vector<double> radii = {2.5, 3.0};
    std::string boundary = "reflective"; // reflective | vacuum
    std::string materials_file;
    std::string micro_lib;
    std::vector<std::string> material_map;
    mc::CycleConfig cycles;
    mc::SortStrategy strategy;
    unsigned workers = 1;
    bool trace = true;
    std::string output_dir = "results";
};

void apply_mc_config(const json& j, McConfig& cfg) {
    const std::set<std::string> allowed = {
        "mode",     "geometry",    "radii",          "boundary",
        "materials_file", "micro_lib", "material_map", "particles_per_cycle",
        "inactive_cycles", "total_cycles", "seed",    "strategy",
        "workers",  "trace",       "output_dir"};
    reject_unknown_keys(j, allowed, "mc-run");
    expect_mode(j, "mc-run");
    if (j.contains("geometry"))
        cfg.geometry = j.at("geometry").get<std::string>();
    if (j.contains("radii"))
        cfg.radii = j.at("radii").get<std::vector<double>>();
    if (j.contains("boundary"))
        cfg.boundary = j.at("boundary").get<std::string>();
    if (j.contains("materials_file"))
        cfg.materials_file = j.at("materials_file").get<std::string>();
    if (j.contains("micro_lib"))
        cfg.micro_lib = j.at("micro_lib").get<std::string>();
    if (j.contains("material_map"))
        cfg.material_map = j.at("material_map").get<std::vector<std::string>>();
    if (j.contains("particles_per_cycle"))
        cfg.cycles.particles_per_cycle = j.at("particles_per_cycle").get<std::size_t>();
    if (j.contains("inactive_cycles"))
        cfg.cycles.inactive_cycles = j.at("inactive_cycles").get<unsigned>();
    if (j.contains("total_cycles"))
        cfg.cycles.total_cycles = j.at("total_cycles").get<unsigned>();
    if (j.contains("seed"))
        cfg.cycles.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("workers"))
        cfg.workers = j.at("workers").get<unsigned>();
    if (j.contains("trace"))
        cfg.trace = j.at("trace").get<bool>();
    if (j.contains("output_dir"))
        cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("strategy")) {
        const json& s = j.at("strategy");
        reject_unknown_keys(s, {"mode", "k_events", "key_scheme"}, "strategy");
        if (s.contains("mode"))
            cfg.strategy.mode = sort_mode_from_name(s.at("mode").get<std::string>());
        if (s.contains("k_events"))
            cfg.strategy.k_events = s.at("k_events").get<std::uint64_t>();
        if (s.contains("key_scheme"))
            cfg.strategy.key_scheme = key_scheme_from_name(s.at("key_scheme").get<std::string>());
    }
}

json mc_config_to_json(const McConfig& cfg) {
    json j;
    j["mode"] = "mc-run";
    j["geometry"] = cfg.geometry;
    if (cfg.geometry == "pebble")
        j["radii"] = cfg.radii;
    j["boundary"] = cfg.boundary;
    j["materials_file"] = cfg.materials_file;
    j["micro_lib"] = cfg.micro_lib;
    j["material_map"] = cfg.material_map;
    j["particles_per_cycle"] = cfg.cycles.particles_per_cycle;
    j["inactive_cycles"] = cfg.cycles.inactive_cycles;
    j["total_cycles"] = cfg.cycles.total_cycles;
    j["seed"] = cfg.cycles.seed;
    j["strategy"] = {{"mode", sort_mode_name(cfg.strategy.mode)},
                     {"k_events", cfg.strategy.k_events},
                     {"key_scheme", key_scheme_name(cfg.strategy.key_scheme)}};
    j["workers"] = cfg.workers;
    j["trace"] = cfg.trace;
    j["output_dir"] = cfg.output_dir;
    return j;
}

int run_mc(const McConfig& cfg, bool dump_config) {
    try {
        cfg.cycles.validate();
        cfg.strategy.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    if (cfg.geometry != "pebble" && cfg.geometry != "infinite")
        throw ValidationError("geometry must be 'pebble' or 'infinite'");
    if (cfg.boundary != "reflective" && cfg.boundary != "vacuum")
        throw ValidationError("boundary must be 'reflective' or 'vacuum'");
    if (cfg.materials_file.empty() || cfg.micro_lib.empty())
        throw ValidationError("materials_file and micro_lib are required");
    if (cfg.material_map.empty())
        throw ValidationError("material_map must name one material per cell");
    if (cfg.workers < 1)
        throw ValidationError("workers must be >= 1");

    if (dump_config) {
        std::cout << mc_config_to_json(cfg).dump(2) << "\n";
        return 0;
    }

    const auto definitions = mc::load_materials(cfg.materials_file);
    const mc::MicroLibrary lib = mc::load_micro_library(cfg.micro_lib);

    std::vector<mc::MaterialMG> materials;
    for (const std::string& name : cfg.material_map) {
        auto it = std::find_if(definitions.begin(), definitions.end(),
                               [&](const auto& d) { return d.first == name; });
        if (it == definitions.end())
            throw ValidationError("material '" + name + "' not found in " + cfg.materials_file);
        materials.push_back(mc::macro_xs_build(it->second, lib));
    }

    const mc::BoundaryCondition bc = cfg.boundary == "reflective"
                                         ? mc::BoundaryCondition::Reflective
                                         : mc::BoundaryCondition::Vacuum;
    mc::Geometry geom = cfg.geometry == "infinite"
                            ? mc::Geometry::infinite_medium()
                            : mc::Geometry::concentric_spheres(cfg.radii, bc);
    if (cfg.geometry == "infinite" && materials.size() != 1)
        throw ValidationError("infinite geometry takes exactly one material");
    if (static_cast<int>(materials.size()) != geom.cell_count())
        throw ValidationError("material_map must name one material per cell (" +
                              std::to_string(geom.cell_count()) + " cells)");

    mc::RunResult result =
        mc::run_eigenvalue(geom, materials, cfg.cycles, cfg.strategy, cfg.workers, cfg.trace);

    fs::create_directories(cfg.output_dir);
    const fs::path out(cfg.output_dir);
    mc::write_keff_csv(result.tallies, cfg.cycles.inactive_cycles, out / "keff.csv");
    mc::write_flux_csv(result.tallies, out / "flux.csv");
    mc::write_presort_trace_csv(result.trace, out / "presort_trace.csv");

    std::cout << "k-effective: "
              << mc::format_keff(result.tallies.keff_mean, result.tallies.keff_std) << "\n"
              << "cycles: " << cfg.cycles.total_cycles << " (" << cfg.cycles.inactive_cycles
              << " inactive), particles/cycle: " << cfg.cycles.particles_per_cycle << "\n"
              << "lost particles: " << result.lost_particles << " of "
              << result.total_histories << " histories\n"
              << "wrote keff.csv, flux.csv, presort_trace.csv to " << cfg.output_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sortmc: particle-sorting performance lab "
                 "(sorting sweeps + event-based MC transport)"};
    app.require_subcommand(1);

    // sortbench
    auto* sortbench = app.add_subcommand("sortbench", "Sorting benchmark sweeps");
    sortbench->require_subcommand(1);
    BenchCli bench;
    auto add_bench_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", bench.config_path, "JSON run configuration");
        cmd->add_option("--algorithms", bench.algorithms,
                        "adaptive|parallel|bitonic (comma separated)")
            ->delimiter(',');
        cmd->add_option("--reps", bench.repetitions, "timed repetitions per point");
        cmd->add_option("--warmup", bench.warmup, "untimed warmup repetitions");
        cmd->add_option("--seed", bench.seed, "base RNG seed");
        cmd->add_option("--workers", bench.workers, "worker threads for parallel sorts")
            ->envname("SORTMC_WORKERS");
        cmd->add_option("--max-bytes", bench.max_bytes, "per-array memory cap");
        cmd->add_option_function<std::string>(
            "--out", [&](const std::string& v) { bench.out_dir = v; bench.out_set = true; },
            "output directory");
        cmd->add_flag("--dump-config", bench.dump_config,
                      "print the effective config JSON and exit");
    };
    auto* size_cmd = sortbench->add_subcommand("size", "random-array size sweep");
    size_cmd->add_option("--sizes", bench.sizes, "array sizes (comma separated)")->delimiter(',');
    add_bench_flags(size_cmd);
    auto* ratio_cmd = sortbench->add_subcommand("ratio", "partially-sorted swap-ratio sweep");
    ratio_cmd->add_option("--n", bench.fixed_n, "array length for the ratio sweep");
    ratio_cmd->add_option("--ratios", bench.ratios, "swap ratios (comma separated)")
        ->delimiter(',');
    add_bench_flags(ratio_cmd);

    // mc run
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo transport");
    mc_cmd->require_subcommand(1);
    auto* mc_run = mc_cmd->add_subcommand("run", "k-eigenvalue power iteration");
    std::string mc_config_path;
    std::optional<std::uint64_t> mc_seed;
    std::optional<unsigned> mc_workers;
    std::optional<std::string> mc_out;
    std::optional<std::string> mc_strategy_mode;
    std::optional<std::uint64_t> mc_k_events;
    std::optional<std::string> mc_key_scheme;
    bool mc_dump = false;
    mc_run->add_option("--config", mc_config_path, "JSON run configuration")->required();
    mc_run->add_option("--seed", mc_seed, "RNG seed");
    mc_run->add_option("--workers", mc_workers, "worker threads")->envname("SORTMC_WORKERS");
    mc_run->add_option("--out", mc_out, "output directory");
    mc_run->add_option("--strategy", mc_strategy_mode, "sorting strategy mode");
    mc_run->add_option("--k-events", mc_k_events, "sort every k event passes");
    mc_run->add_option("--key-scheme", mc_key_scheme, "group|cell|cell_then_group");
    mc_run->add_flag("--dump-config", mc_dump, "print the effective config JSON and exit");

    // report plot
    auto* report = app.add_subcommand("report", "Render reports from existing results");
    report->require_subcommand(1);
    auto* plot = report->add_subcommand("plot", "log-log SVG from a sweep CSV");
    std::string plot_csv, plot_x = "n", plot_out = "results", plot_title;
    std::uint64_t plot_seed = 0;
    unsigned plot_workers = 1;
    plot->add_option("--csv", plot_csv, "sweep CSV produced by sortbench")->required();
    plot->add_option("--x", plot_x, "x axis: n or r")
        ->check(CLI::IsMember({"n", "r"}));
    plot->add_option("--out", plot_out, "output directory");
    plot->add_option("--title", plot_title, "plot title");
    // accepted everywhere for a uniform surface; plotting has no use for them
    plot->add_option("--seed", plot_seed, "unused")->group("");
    plot->add_option("--workers", plot_workers, "unused")->envname("SORTMC_WORKERS")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints usage, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the error and usage hint
        return 1;
    }

    try {
        if (size_cmd->parsed())
            return run_sortbench(bench, false);
        if (ratio_cmd->parsed())
            return run_sortbench(bench, true);
        if (mc_run->parsed()) {
            McConfig cfg;
            apply_mc_config(load_config_json(mc_config_path), cfg);
            if (mc_seed)
                cfg.cycles.seed = *mc_seed;
            if (mc_workers)
                cfg.workers = *mc_workers;
            if (mc_out)
                cfg.output_dir = *mc_out;
            if (mc_strategy_mode)
                cfg.strategy.mode = sort_mode_from_name(*mc_strategy_mode);
            if (mc_k_events)
                cfg.strategy.k_events = *mc_k_events;
            if (mc_key_scheme)
                cfg.strategy.key_scheme = key_scheme_from_name(*mc_key_scheme);
            return run_mc(cfg, mc_dump);
        }
        if (plot->parsed()) {
            const auto records = read_csv(plot_csv);
            PlotOptions options;
            options.x = plot_x == "r" ? PlotX::Ratio : PlotX::Size;
            options.title = plot_title;
            fs::create_directories(plot_out);
            const fs::path svg =
                fs::path(plot_out) / (fs::path(plot_csv).stem().string() + ".svg");
            render_loglog_svg(records, options, svg);
            std::cout << "wrote " << svg.string() << "\n";
            return 0;
        }
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}
