#include "jigsaw/ga_engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "jigsaw/bundle_io.hpp"

namespace jigsaw {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs fn(i, worker) for every i in [0, count). Each index is handled once,
// so results written to slot i do not depend on scheduling.
template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
    workers = std::clamp(workers, 1, std::max(count, 1));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            fn(i, 0);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                fn(i, w);
            }
        });
    }
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

void GaConfig::validate() const {
    if (population_size < 2) {
        throw std::invalid_argument("population size must be at least 2");
    }
    if (generations < 0) {
        throw std::invalid_argument("generation count must be nonnegative");
    }
    if (elite_count < 0 || elite_count >= population_size) {
        throw std::invalid_argument("elite count must be in [0, population size)");
    }
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
        throw std::invalid_argument("mutation rate must be in [0, 1]");
    }
    if (workers < 1) {
        throw std::invalid_argument("worker count must be positive");
    }
}

double fitness_cost(const Chromosome& chromosome, const CompatibilityTable& table, const PuzzleSpec& spec) {
    if (!chromosome.is_valid(spec)) {
        throw std::invalid_argument("fitness of an invalid chromosome");
    }
    const bool two_sided = spec.type == PuzzleType::Type4;
    double cost = 0.0;
    for (const Relation& r : adjacency_relations(chromosome)) {
        cost += table.score(r);
        if (two_sided) {
            cost += table.score(r.other_side());
        }
    }
    return cost;
}

Chromosome random_chromosome(const PuzzleSpec& spec, Rng& rng) {
    const int n = spec.piece_count();
    std::vector<Placement> cells(static_cast<std::size_t>(n));
    std::vector<PieceIndex> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_int_distribution<int> rotation(0, 3);
    std::uniform_int_distribution<int> face(0, 1);
    for (int i = 0; i < n; ++i) {
        Placement& p = cells[static_cast<std::size_t>(i)];
        p.piece = order[static_cast<std::size_t>(i)];
        if (spec.type != PuzzleType::Type1) {
            p.rotation = static_cast<std::uint8_t>(rotation(rng));
        }
        if (spec.type == PuzzleType::Type4) {
            p.face = static_cast<Face>(face(rng));
        }
    }
    return Chromosome(spec.rows, spec.cols, std::move(cells));
}

std::vector<double> selection_weights(std::span<const double> costs) {
    std::vector<double> out(costs.size(), 0.0);
    if (costs.empty()) {
        return out;
    }
    const double max_cost = *std::max_element(costs.begin(), costs.end());
    const double eps = 1e-6 * max_cost;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        out[i] = max_cost - costs[i] + eps;
    }
    return out;
}

EvaluatedPopulation::EvaluatedPopulation(std::vector<Chromosome> chromosomes, std::vector<double> costs) {
    const auto weights = selection_weights(costs);
    *this = with_weights(std::move(chromosomes), std::move(costs), weights);
}

EvaluatedPopulation EvaluatedPopulation::with_weights(std::vector<Chromosome> chromosomes, std::vector<double> costs,
                                                      std::vector<double> weights) {
    if (chromosomes.size() != costs.size() || costs.size() != weights.size()) {
        throw std::invalid_argument("population, cost and weight counts differ");
    }
    EvaluatedPopulation pop;
    pop.members_.reserve(chromosomes.size());
    for (std::size_t i = 0; i < chromosomes.size(); ++i) {
        if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
            throw std::invalid_argument("selection weights must be finite and nonnegative");
        }
        pop.members_.push_back({std::move(chromosomes[i]), costs[i], weights[i]});
    }
    pop.index_weights();
    return pop;
}

void EvaluatedPopulation::index_weights() {
    cumulative_.resize(members_.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        sum += members_[i].weight;
        cumulative_[i] = sum;
    }
}

std::size_t EvaluatedPopulation::select_index(Rng& rng) const {
    if (members_.empty()) {
        throw std::logic_error("selection from an empty population");
    }
    const double total = cumulative_.back();
    if (!(total > 0.0) || !std::isfinite(total)) {
        return std::uniform_int_distribution<std::size_t>(0, members_.size() - 1)(rng);
    }
    const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative_.begin()), members_.size() - 1);
}

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t generation, std::uint64_t child) {
    return splitmix(splitmix(splitmix(master_seed) ^ generation) ^ child);
}

EvolveResult evolve(const PuzzleBundle& bundle, const CompatibilityTable& table, const GaConfig& config,
                    const GenerationObserver& observer) {
    config.validate();
    const PuzzleSpec& spec = bundle.spec;
    if (table.indexer().piece_count() != spec.piece_count() || table.type() != spec.type) {
        throw std::invalid_argument("compatibility table does not match the bundle");
    }
    const auto started = Clock::now();
    const int pop_size = config.population_size;
    const int workers = config.workers;
    const EdgeIndexer& ix = table.indexer();

    const CandidateIndex candidates(table);
    const KernelCrossover crossover(spec, candidates, config.mutation_rate);
    std::vector<CrossoverWorkspace> workspaces;
    for (int w = 0; w < std::clamp(workers, 1, pop_size); ++w) {
        workspaces.emplace_back(spec);
    }

    std::vector<Chromosome> current;
    current.reserve(static_cast<std::size_t>(pop_size));
    for (int i = 0; i < pop_size; ++i) {
        Rng rng(stream_seed(config.master_seed, 0, static_cast<std::uint64_t>(i)));
        current.push_back(random_chromosome(spec, rng));
    }

    EvolveResult result;
    std::vector<double> costs(static_cast<std::size_t>(pop_size));
    std::vector<ParentRelations> relations(static_cast<std::size_t>(pop_size));
    auto gen_start = started;

    for (int gen = 0;; ++gen) {
        parallel_for(pop_size, workers, [&](int i, int) {
            const auto k = static_cast<std::size_t>(i);
            costs[k] = fitness_cost(current[k], table, spec);
            relations[k] = ParentRelations(current[k], ix);
        });

        std::vector<int> rank(static_cast<std::size_t>(pop_size));
        std::iota(rank.begin(), rank.end(), 0);
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) {
            return costs[static_cast<std::size_t>(a)] < costs[static_cast<std::size_t>(b)];
        });
        const auto top = static_cast<std::size_t>(rank.front());
        const double mean = std::accumulate(costs.begin(), costs.end(), 0.0) / pop_size;
        if (gen == 0 || costs[top] < result.best_cost) {
            result.best = current[top];
            result.best_cost = costs[top];
            result.best_generation = gen;
        }
        result.history.push_back({gen, costs[top], mean, seconds_since(gen_start)});
        if (observer) {
            observer(gen, current[top], costs[top]);
        }
        if (gen == config.generations || (config.stop_on_zero_cost && costs[top] == 0.0)) {
            break;
        }

        gen_start = Clock::now();
        const EvaluatedPopulation population(current, costs);
        std::vector<Chromosome> next(static_cast<std::size_t>(pop_size));
        for (int e = 0; e < config.elite_count; ++e) {
            next[static_cast<std::size_t>(e)] = current[static_cast<std::size_t>(rank[static_cast<std::size_t>(e)])];
        }
        const int children = pop_size - config.elite_count;
        parallel_for(children, workers, [&](int c, int w) {
            const int slot = config.elite_count + c;
            Rng rng(stream_seed(config.master_seed, static_cast<std::uint64_t>(gen + 1), static_cast<std::uint64_t>(slot)));
            const std::size_t a = population.select_index(rng);
            const std::size_t b = population.select_index(rng);
            next[static_cast<std::size_t>(slot)] =
                crossover(relations[a], relations[b], rng, workspaces[static_cast<std::size_t>(w)]);
        });
        current = std::move(next);
    }
    result.seconds = seconds_since(started);
    return result;
}

nlohmann::json config_to_json(const GaConfig& config) {
    return {{"population_size", config.population_size},
            {"generations", config.generations},
            {"elite_count", config.elite_count},
            {"mutation_rate", config.mutation_rate},
            {"master_seed", config.master_seed},
            {"workers", config.workers},
            {"stop_on_zero_cost", config.stop_on_zero_cost}};
}

nlohmann::json run_report(const GaConfig& config, const EvolveResult& result, std::span<const Piece> pieces) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& g : result.history) {
        history.push_back({{"generation", g.generation},
                           {"best_cost", g.best_cost},
                           {"mean_cost", g.mean_cost},
                           {"seconds", g.seconds}});
    }
    return {{"config", config_to_json(config)},
            {"history", history},
            {"best_cost", result.best_cost},
            {"best_generation", result.best_generation},
            {"seconds", result.seconds},
            {"solution", chromosome_to_json(result.best, pieces)}};
}

}  // namespace jigsaw
