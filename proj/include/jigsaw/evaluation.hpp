#pragma once

#include <cstdint>

#include <json.hpp>

#include "jigsaw/puzzle_factory.hpp"
#include "jigsaw/puzzle_model.hpp"

namespace jigsaw {

struct DirectScore {
    double fraction = 0.0;
    DihedralTransform transform;
};

struct ScoreReport {
    double direct = 0.0;
    double neighbor = 0.0;
    bool perfect = false;
    DihedralTransform best_transform;
};

/// Largest fraction of pieces with matching cell, rotation and face over the
/// transforms legal for the puzzle type, and the first transform reaching it.
/// Throws std::invalid_argument unless both chromosomes are valid for `spec`.
[[nodiscard]] DirectScore direct_comparison(const Chromosome& solution, const Chromosome& truth, const PuzzleSpec& spec);

/// Fraction of the truth's seams that also occur in the solution. A two-sided
/// seam matches only when both of its faces do.
[[nodiscard]] double neighbor_comparison(const Chromosome& solution, const Chromosome& truth, const PuzzleSpec& spec);

[[nodiscard]] ScoreReport score_solution(const Chromosome& solution, const Chromosome& truth, const PuzzleSpec& spec);
[[nodiscard]] nlohmann::json to_json(const ScoreReport& report);

/// Synthetic scrambled bundle cut from random color fields with one pixel of
/// overlap between neighboring tiles, so every true seam scores exactly 0.
/// Regenerates until the zero-score relations and the best-buddy relations
/// are exactly the true seams. Requires tile_size >= 2.
[[nodiscard]] PuzzleBundle make_oracle_puzzle(const PuzzleSpec& spec, std::uint64_t seed);

}  // namespace jigsaw
