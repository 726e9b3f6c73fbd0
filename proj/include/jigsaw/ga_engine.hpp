#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "jigsaw/compatibility.hpp"
#include "jigsaw/crossover.hpp"
#include "jigsaw/puzzle_factory.hpp"

namespace jigsaw {

struct GaConfig {
    int population_size = 1000;
    int generations = 30;
    int elite_count = 4;
    double mutation_rate = 0.05;
    std::uint64_t master_seed = 0;
    int workers = 1;               // wall-clock only, never changes results
    bool stop_on_zero_cost = false;  // end early once a generation holds a zero-cost member

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Sum of table scores over every grid seam; two-sided puzzles add the score
/// of each seam's other face. Throws std::invalid_argument for a chromosome
/// that is not valid for `spec`.
[[nodiscard]] double fitness_cost(const Chromosome& chromosome, const CompatibilityTable& table, const PuzzleSpec& spec);

/// Uniform bijection of pieces to an N x M grid with uniform legal poses.
[[nodiscard]] Chromosome random_chromosome(const PuzzleSpec& spec, Rng& rng);
[[nodiscard]] inline Chromosome random_chromosome(const PuzzleBundle& bundle, Rng& rng) {
    return random_chromosome(bundle.spec, rng);
}

/// Roulette weights for a minimization objective: max_cost - cost + eps with
/// eps = 1e-6 * max_cost. All zero when every cost is zero.
[[nodiscard]] std::vector<double> selection_weights(std::span<const double> costs);

struct EvaluatedMember {
    Chromosome chromosome;
    double cost = 0.0;
    double weight = 0.0;
};

class EvaluatedPopulation {
public:
    EvaluatedPopulation() = default;
    /// Weights derived from costs with selection_weights.
    EvaluatedPopulation(std::vector<Chromosome> chromosomes, std::vector<double> costs);
    /// Explicit weights, for fixtures. Weights must be finite and nonnegative.
    static EvaluatedPopulation with_weights(std::vector<Chromosome> chromosomes, std::vector<double> costs,
                                            std::vector<double> weights);

    [[nodiscard]] std::size_t size() const { return members_.size(); }
    [[nodiscard]] const EvaluatedMember& operator[](std::size_t i) const { return members_[i]; }
    [[nodiscard]] std::span<const EvaluatedMember> members() const { return members_; }

    /// Roulette draw; uniform when the total weight is zero.
    [[nodiscard]] std::size_t select_index(Rng& rng) const;

private:
    void index_weights();

    std::vector<EvaluatedMember> members_;
    std::vector<double> cumulative_;
};

[[nodiscard]] inline const Chromosome& select_parent(const EvaluatedPopulation& population, Rng& rng) {
    return population[population.select_index(rng)].chromosome;
}

/// Seed of the RNG stream owned by one child of one generation.
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t generation, std::uint64_t child);

struct GenerationStats {
    int generation = 0;
    double best_cost = 0.0;
    double mean_cost = 0.0;
    double seconds = 0.0;
};

struct EvolveResult {
    Chromosome best;
    double best_cost = 0.0;
    int best_generation = 0;
    std::vector<GenerationStats> history;  // generation 0 is the random population
    double seconds = 0.0;
};

/// Called after each generation is evaluated with that generation's best member.
using GenerationObserver = std::function<void(int generation, const Chromosome& best, double cost)>;

[[nodiscard]] EvolveResult evolve(const PuzzleBundle& bundle, const CompatibilityTable& table, const GaConfig& config,
                                  const GenerationObserver& observer = {});

[[nodiscard]] nlohmann::json config_to_json(const GaConfig& config);
/// Config echo, per-generation costs and timings, final chromosome.
[[nodiscard]] nlohmann::json run_report(const GaConfig& config, const EvolveResult& result,
                                        std::span<const Piece> pieces);

}  // namespace jigsaw
