#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jigsaw/evaluation.hpp"
#include "jigsaw/ga_engine.hpp"

namespace jigsaw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitInternalError = 3;
inline constexpr const char* kToolVersion = "1.0.0";

namespace fs = std::filesystem;

struct ShredOptions {
    std::vector<fs::path> images;  // one, or front and back for Type 4
    PuzzleSpec spec;
    std::uint64_t seed = 0;
    fs::path out;
};

/// Writes a scrambled bundle with its ground truth in a separate file.
void cmd_shred(const ShredOptions& options);

struct SolveOptions {
    fs::path bundle;
    GaConfig ga;
    fs::path out;
    bool snapshots = false;
    std::optional<fs::path> table_cache;
    std::vector<std::string> command;  // echoed into the manifest
};

struct SolveOutcome {
    EvolveResult result;
    std::optional<ScoreReport> score;  // when the bundle carries ground truth
    nlohmann::json manifest;
};

/// Writes solution.json, manifest.json and, with snapshots, one PNG per
/// generation (two per generation for two-sided puzzles).
SolveOutcome cmd_solve(const SolveOptions& options);

/// Scores a solution file against the bundle's ground truth and writes the
/// report to `out` when given. Throws InputError without ground truth.
ScoreReport cmd_eval(const fs::path& bundle, const fs::path& solution, const std::optional<fs::path>& out);

struct BenchOptions {
    fs::path set;  // directory of bundles
    int repeats = 5;
    GaConfig ga;
    fs::path out;
    std::ostream* log = nullptr;  // progress lines
};

/// Per-bundle best/worst/average/std-dev over `repeats` solves and set-level
/// averages. Writes bench.json and bench.txt to `out`.
nlohmann::json cmd_bench(const BenchOptions& options);

/// Human-readable table for a bench report.
[[nodiscard]] std::string format_bench(const nlohmann::json& report);

/// Writes a synthetic oracle bundle.
void cmd_oracle(const PuzzleSpec& spec, std::uint64_t seed, const fs::path& out);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv);

}  // namespace jigsaw::cli
