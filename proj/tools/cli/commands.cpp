#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "jigsaw/bundle_io.hpp"
#include "jigsaw/compatibility.hpp"

namespace jigsaw::cli {

namespace {

using Clock = std::chrono::steady_clock;

PuzzleSpec checked(const PuzzleSpec& spec) {
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return spec;
}

GaConfig checked(const GaConfig& config) {
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return config;
}

nlohmann::json spec_to_json(const PuzzleSpec& spec) {
    return {{"rows", spec.rows},
            {"cols", spec.cols},
            {"tile_size", spec.tile_size},
            {"puzzle_type", static_cast<int>(spec.type)}};
}

CompatibilityTable table_for(const PuzzleBundle& bundle, const std::string& checksum,
                             const std::optional<fs::path>& cache, int workers) {
    if (cache && fs::exists(*cache)) {
        return CompatibilityTable::load(*cache, checksum, bundle.spec);
    }
    auto table = CompatibilityTable::build(bundle.pieces, bundle.spec, workers);
    if (cache) {
        table.save(*cache, checksum);
    }
    return table;
}

std::string snapshot_name(int generation, const char* suffix) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "gen_%03d%s.png", generation, suffix);
    return buf;
}

struct Summary {
    double best = 0.0;
    double worst = 0.0;
    double average = 0.0;
    double std_dev = 0.0;
};

Summary summarize(const std::vector<double>& xs) {
    Summary s;
    s.best = *std::max_element(xs.begin(), xs.end());
    s.worst = *std::min_element(xs.begin(), xs.end());
    double sum = 0.0;
    for (const double x : xs) {
        sum += x;
    }
    s.average = sum / static_cast<double>(xs.size());
    double var = 0.0;
    for (const double x : xs) {
        var += (x - s.average) * (x - s.average);
    }
    s.std_dev = std::sqrt(var / static_cast<double>(xs.size()));
    return s;
}

nlohmann::json to_json(const Summary& s) {
    return {{"best", s.best}, {"worst", s.worst}, {"average", s.average}, {"std_dev", s.std_dev}};
}

void add_ga_flags(CLI::App& app, GaConfig& ga) {
    app.add_option("--seed", ga.master_seed, "Master seed");
    app.add_option("--population", ga.population_size, "Population size")->capture_default_str();
    app.add_option("--generations", ga.generations, "Generations")->capture_default_str();
    app.add_option("--elites", ga.elite_count, "Elite members copied unchanged")->capture_default_str();
    app.add_option("--mutation", ga.mutation_rate, "Mutation rate per greedy step")->capture_default_str();
    app.add_option("--workers", ga.workers, "Worker threads (results do not depend on it)")->capture_default_str();
}

void add_spec_flags(CLI::App& app, PuzzleSpec& spec, int& type) {
    app.add_option("--type", type, "Puzzle type")->check(CLI::IsMember({1, 2, 4}))->capture_default_str();
    app.add_option("--tile", spec.tile_size, "Tile size in pixels")->capture_default_str();
    app.add_option("--rows", spec.rows, "Rows")->required();
    app.add_option("--cols", spec.cols, "Columns")->required();
}

}  // namespace

void cmd_shred(const ShredOptions& options) {
    const PuzzleSpec spec = checked(options.spec);
    const bool two_sided = spec.type == PuzzleType::Type4;
    if (options.images.size() != (two_sided ? 2U : 1U)) {
        throw InputError(two_sided ? "two-sided puzzles need a front and a back image" : "expected one image");
    }
    const std::uint64_t id_seed = stream_seed(options.seed, 0, 1);
    PuzzleBundle bundle;
    if (two_sided) {
        bundle = shred_two_sided(read_image(options.images[0]), read_image(options.images[1]), spec, id_seed);
    } else {
        bundle = shred(read_image(options.images[0]), spec, id_seed);
    }
    save_bundle(scramble(bundle, options.seed).bundle, options.out);
}

SolveOutcome cmd_solve(const SolveOptions& options) {
    const GaConfig ga = checked(options.ga);
    const auto t0 = Clock::now();
    const PuzzleBundle bundle = load_bundle(options.bundle);
    const std::string checksum = bundle_checksum(bundle);
    const auto t_loaded = Clock::now();
    const CompatibilityTable table = table_for(bundle, checksum, options.table_cache, ga.workers);
    const auto t_table = Clock::now();

    fs::create_directories(options.out);
    GenerationObserver observer;
    if (options.snapshots) {
        const fs::path dir = options.out / "snapshots";
        fs::create_directories(dir);
        observer = [&bundle, dir](int generation, const Chromosome& best, double) {
            write_image(dir / snapshot_name(generation, ""), render(bundle, best));
            if (bundle.spec.type == PuzzleType::Type4) {
                write_image(dir / snapshot_name(generation, "_back"), render_other_side(bundle, best));
            }
        };
    }

    SolveOutcome outcome;
    outcome.result = evolve(bundle, table, ga, observer);
    write_json(options.out / "solution.json", chromosome_to_json(outcome.result.best, bundle.pieces));
    if (bundle.ground_truth) {
        outcome.score = score_solution(outcome.result.best, *bundle.ground_truth, bundle.spec);
    }
    const auto seconds = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };

    nlohmann::json m = run_report(ga, outcome.result, bundle.pieces);
    m["tool_version"] = kToolVersion;
    m["command"] = options.command;
    m["spec"] = spec_to_json(bundle.spec);
    m["inputs"] = {{"bundle", options.bundle.string()},
                   {"bundle_checksum", checksum},
                   {"manifest_sha256", sha256_file(options.bundle / kManifestFile)}};
    m["timing"] = {{"load_seconds", seconds(t0, t_loaded)},
                   {"table_seconds", seconds(t_loaded, t_table)},
                   {"evolve_seconds", outcome.result.seconds},
                   {"total_seconds", seconds(t0, Clock::now())}};
    if (outcome.score) {
        m["score"] = to_json(*outcome.score);
    }
    write_json(options.out / "manifest.json", m);
    outcome.manifest = std::move(m);
    return outcome;
}

ScoreReport cmd_eval(const fs::path& bundle_dir, const fs::path& solution, const std::optional<fs::path>& out) {
    const PuzzleBundle bundle = load_bundle(bundle_dir);
    if (!bundle.ground_truth) {
        throw InputError("bundle " + bundle_dir.string() + " has no ground truth");
    }
    const Chromosome chromosome = chromosome_from_json(read_json(solution), bundle.pieces);
    if (!chromosome.is_valid(bundle.spec)) {
        throw InputError("solution is not a valid assembly of the bundle's pieces");
    }
    const ScoreReport report = score_solution(chromosome, *bundle.ground_truth, bundle.spec);
    if (out) {
        write_json(*out, to_json(report));
    }
    return report;
}

nlohmann::json cmd_bench(const BenchOptions& options) {
    const GaConfig base = checked(options.ga);
    if (options.repeats < 1) {
        throw InputError("repeats must be positive");
    }
    std::vector<fs::path> bundles;
    if (fs::is_directory(options.set)) {
        for (const auto& entry : fs::directory_iterator(options.set)) {
            if (entry.is_directory() && fs::exists(entry.path() / kManifestFile)) {
                bundles.push_back(entry.path());
            }
        }
    }
    if (bundles.empty()) {
        throw InputError("no bundles found in " + options.set.string());
    }
    std::sort(bundles.begin(), bundles.end());

    const auto t0 = Clock::now();
    nlohmann::json images = nlohmann::json::array();
    std::vector<Summary> direct_all;
    std::vector<Summary> neighbor_all;
    int perfect_images = 0;
    for (const fs::path& dir : bundles) {
        const PuzzleBundle bundle = load_bundle(dir);
        if (!bundle.ground_truth) {
            throw InputError("bundle " + dir.string() + " has no ground truth");
        }
        const CompatibilityTable table = CompatibilityTable::build(bundle.pieces, bundle.spec, base.workers);
        std::vector<double> direct;
        std::vector<double> neighbor;
        std::vector<double> seconds;
        int perfect_runs = 0;
        for (int r = 0; r < options.repeats; ++r) {
            GaConfig ga = base;
            ga.master_seed = base.master_seed + static_cast<std::uint64_t>(r);
            const EvolveResult result = evolve(bundle, table, ga);
            const ScoreReport s = score_solution(result.best, *bundle.ground_truth, bundle.spec);
            direct.push_back(s.direct);
            neighbor.push_back(s.neighbor);
            seconds.push_back(result.seconds);
            perfect_runs += s.perfect ? 1 : 0;
        }
        const Summary d = summarize(direct);
        const Summary n = summarize(neighbor);
        direct_all.push_back(d);
        neighbor_all.push_back(n);
        perfect_images += perfect_runs > 0 ? 1 : 0;
        images.push_back({{"name", dir.filename().string()},
                          {"pieces", bundle.spec.piece_count()},
                          {"direct", to_json(d)},
                          {"neighbor", to_json(n)},
                          {"direct_runs", direct},
                          {"neighbor_runs", neighbor},
                          {"perfect_runs", perfect_runs},
                          {"seconds", seconds}});
        if (options.log) {
            *options.log << dir.filename().string() << ": neighbor best " << n.best << ", direct best " << d.best
                         << ", perfect runs " << perfect_runs << "/" << options.repeats << std::endl;
        }
    }

    const auto set_level = [](const std::vector<Summary>& xs) {
        Summary s;
        for (const auto& x : xs) {
            s.best += x.best;
            s.worst += x.worst;
            s.average += x.average;
            s.std_dev += x.std_dev;
        }
        const auto k = static_cast<double>(xs.size());
        return nlohmann::json{{"avg_best", s.best / k},
                              {"avg_worst", s.worst / k},
                              {"avg_average", s.average / k},
                              {"avg_std_dev", s.std_dev / k}};
    };
    nlohmann::json report = {
        {"tool_version", kToolVersion},
        {"set", options.set.string()},
        {"repeats", options.repeats},
        {"config", config_to_json(base)},
        {"images", images},
        {"summary",
         {{"images", bundles.size()},
          {"direct", set_level(direct_all)},
          {"neighbor", set_level(neighbor_all)},
          {"perfect_images", perfect_images},
          {"total_seconds", std::chrono::duration<double>(Clock::now() - t0).count()}}}};
    fs::create_directories(options.out);
    write_json(options.out / "bench.json", report);
    std::ofstream(options.out / "bench.txt") << format_bench(report);
    return report;
}

std::string format_bench(const nlohmann::json& report) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-24s %6s | %8s %8s %8s %7s | %8s %8s %8s %7s | %s\n", "image", "pieces",
                  "dir.best", "dir.wrst", "dir.avg", "dir.sd", "nbr.best", "nbr.wrst", "nbr.avg", "nbr.sd", "perfect");
    os << line;
    const auto pct = [](const nlohmann::json& v) { return 100.0 * v.get<double>(); };
    for (const auto& img : report.at("images")) {
        const auto& d = img.at("direct");
        const auto& n = img.at("neighbor");
        std::snprintf(line, sizeof line,
                      "%-24s %6d | %7.2f%% %7.2f%% %7.2f%% %6.2f%% | %7.2f%% %7.2f%% %7.2f%% %6.2f%% | %d/%d\n",
                      img.at("name").get<std::string>().c_str(), img.at("pieces").get<int>(), pct(d.at("best")),
                      pct(d.at("worst")), pct(d.at("average")), pct(d.at("std_dev")), pct(n.at("best")),
                      pct(n.at("worst")), pct(n.at("average")), pct(n.at("std_dev")), img.at("perfect_runs").get<int>(),
                      report.at("repeats").get<int>());
        os << line;
    }
    const auto& s = report.at("summary");
    const auto& d = s.at("direct");
    const auto& n = s.at("neighbor");
    std::snprintf(line, sizeof line, "%-24s %6s | %7.2f%% %7.2f%% %7.2f%% %6.2f%% | %7.2f%% %7.2f%% %7.2f%% %6.2f%% | %d images\n",
                  "set average", "", pct(d.at("avg_best")), pct(d.at("avg_worst")), pct(d.at("avg_average")),
                  pct(d.at("avg_std_dev")), pct(n.at("avg_best")), pct(n.at("avg_worst")), pct(n.at("avg_average")),
                  pct(n.at("avg_std_dev")), s.at("perfect_images").get<int>());
    os << line;
    std::snprintf(line, sizeof line, "total time %.1f s\n", s.at("total_seconds").get<double>());
    os << line;
    return os.str();
}

void cmd_oracle(const PuzzleSpec& spec, std::uint64_t seed, const fs::path& out) {
    save_bundle(make_oracle_puzzle(checked(spec), seed), out);
}

int run(int argc, char** argv) {
    CLI::App app{"Square-piece jigsaw puzzle generator, solver and scorer"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    ShredOptions shred_opts;
    int shred_type = 2;
    auto* shred_cmd = app.add_subcommand("shred", "Cut one image (two for Type 4) into a scrambled bundle");
    add_spec_flags(*shred_cmd, shred_opts.spec, shred_type);
    shred_opts.spec.tile_size = 28;
    shred_cmd->add_option("--seed", shred_opts.seed, "Scramble seed");
    shred_cmd->add_option("--out,-o", shred_opts.out, "Bundle directory")->required();
    shred_cmd->add_option("images", shred_opts.images, "Source image(s)")->required()->check(CLI::ExistingFile);

    SolveOptions solve_opts;
    solve_opts.ga.workers = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    std::string table_cache;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a bundle");
    solve_cmd->add_option("bundle", solve_opts.bundle, "Bundle directory")->required();
    solve_cmd->add_option("--out,-o", solve_opts.out, "Output directory")->required();
    add_ga_flags(*solve_cmd, solve_opts.ga);
    solve_cmd->add_flag("--snapshots", solve_opts.snapshots, "Render the best assembly of every generation");
    solve_cmd->add_option("--table-cache", table_cache, "Compatibility table cache file");

    fs::path eval_bundle;
    fs::path eval_solution;
    fs::path eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "Score a solution against the bundle's ground truth");
    eval_cmd->add_option("bundle", eval_bundle, "Bundle directory")->required();
    eval_cmd->add_option("solution", eval_solution, "solution.json")->required();
    eval_cmd->add_option("--out,-o", eval_out, "Write the score report here");

    BenchOptions bench_opts;
    bench_opts.ga.workers = solve_opts.ga.workers;
    auto* bench_cmd = app.add_subcommand("bench", "Solve every bundle in a directory several times");
    bench_cmd->add_option("set", bench_opts.set, "Directory of bundles")->required();
    bench_cmd->add_option("--out,-o", bench_opts.out, "Report directory")->required();
    bench_cmd->add_option("--repeats", bench_opts.repeats, "Solves per bundle")->capture_default_str();
    add_ga_flags(*bench_cmd, bench_opts.ga);

    PuzzleSpec oracle_spec;
    oracle_spec.tile_size = 8;
    int oracle_type = 2;
    std::uint64_t oracle_seed = 0;
    fs::path oracle_out;
    auto* oracle_cmd = app.add_subcommand("oracle", "Write a synthetic puzzle whose true seams score zero");
    add_spec_flags(*oracle_cmd, oracle_spec, oracle_type);
    oracle_cmd->add_option("--seed", oracle_seed, "Seed");
    oracle_cmd->add_option("--out,-o", oracle_out, "Bundle directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (*shred_cmd) {
            shred_opts.spec.type = puzzle_type_from_int(shred_type);
            cmd_shred(shred_opts);
        } else if (*solve_cmd) {
            solve_opts.command.assign(argv, argv + argc);
            if (!table_cache.empty()) {
                solve_opts.table_cache = table_cache;
            }
            const SolveOutcome outcome = cmd_solve(solve_opts);
            std::cout << "best cost " << outcome.result.best_cost << " after " << outcome.result.history.size() - 1
                      << " generations, " << outcome.result.seconds << " s\n";
            if (outcome.score) {
                std::cout << to_json(*outcome.score).dump() << "\n";
            }
        } else if (*eval_cmd) {
            std::optional<fs::path> out;
            if (!eval_out.empty()) {
                out = eval_out;
            }
            std::cout << to_json(cmd_eval(eval_bundle, eval_solution, out)).dump(2) << "\n";
        } else if (*bench_cmd) {
            bench_opts.log = &std::cerr;
            std::cout << format_bench(cmd_bench(bench_opts));
        } else if (*oracle_cmd) {
            oracle_spec.type = puzzle_type_from_int(oracle_type);
            cmd_oracle(oracle_spec, oracle_seed, oracle_out);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    }
    return kExitOk;
}

}  // namespace jigsaw::cli
