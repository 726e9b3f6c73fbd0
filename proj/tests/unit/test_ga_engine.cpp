#include <doctest.h>

#include <algorithm>
#include <map>

#include "jigsaw/evaluation.hpp"
#include "jigsaw/ga_engine.hpp"
#include "support.hpp"

using namespace jigsaw;
using namespace testsupport;

namespace {

GaConfig small_config(std::uint64_t seed) {
    GaConfig c;
    c.population_size = 60;
    c.generations = 15;
    c.master_seed = seed;
    return c;
}

}  // namespace

TEST_SUITE("ga_engine") {
    TEST_CASE("fitness of a 1x2 assembly is its single seam") {
        std::mt19937_64 rng(1);
        const auto one = random_pieces(2, 4, false, rng);
        const PuzzleSpec s2 = make_spec(1, 2, PuzzleType::Type2);
        const auto t2 = CompatibilityTable::build(one, s2);
        const Chromosome c(1, 2, {{0, 1, Face::Front}, {1, 3, Face::Front}});
        const Relation r = relation_of_adjacency(c.at(0, 0), c.at(0, 1), Direction::Horizontal);
        CHECK(fitness_cost(c, t2, s2) == t2.score(r));
        CHECK(fitness_cost(c, t2, s2) == doctest::Approx(dissimilarity(one[0], r.first.edge, one[1], r.second.edge)));

        const auto two = random_pieces(2, 4, true, rng);
        const PuzzleSpec s4 = make_spec(1, 2, PuzzleType::Type4);
        const auto t4 = CompatibilityTable::build(two, s4);
        const Chromosome d(1, 2, {{0, 0, Face::Back}, {1, 2, Face::Front}});
        const Relation front = relation_of_adjacency(d.at(0, 0), d.at(0, 1), Direction::Horizontal);
        CHECK(fitness_cost(d, t4, s4) == doctest::Approx(t4.score(front) + t4.score(front.other_side())));
    }

    TEST_CASE("2x2 fitness adds the four seams") {
        std::mt19937_64 rng(2);
        const auto pieces = random_pieces(4, 5, false, rng);
        const PuzzleSpec s = make_spec(2, 2, PuzzleType::Type2, 5);
        const auto table = CompatibilityTable::build(pieces, s);
        for (int i = 0; i < 20; ++i) {
            const Chromosome c = random_chromosome(s, rng);
            double want = 0.0;
            for (const Relation& r : adjacency_relations(c)) {
                want += brute_force_dissimilarity(pieces[static_cast<std::size_t>(r.first.piece)], r.first.edge,
                                                  pieces[static_cast<std::size_t>(r.second.piece)], r.second.edge);
            }
            CHECK(fitness_cost(c, table, s) == doctest::Approx(want).epsilon(1e-12));
        }
    }

    TEST_CASE("fitness rejects invalid chromosomes") {
        std::mt19937_64 rng(3);
        const auto pieces = random_pieces(2, 4, false, rng);
        const PuzzleSpec s = make_spec(1, 2, PuzzleType::Type2);
        const auto table = CompatibilityTable::build(pieces, s);
        const Chromosome dup(1, 2, {{0, 0, Face::Front}, {0, 1, Face::Front}});
        CHECK_THROWS_AS((void)fitness_cost(dup, table, s), std::invalid_argument);
    }

    TEST_CASE("random chromosomes are valid") {
        std::mt19937_64 rng(4);
        for (const auto type : {PuzzleType::Type1, PuzzleType::Type2, PuzzleType::Type4}) {
            const PuzzleSpec s = make_spec(3, 5, type);
            bool saw_turn = false;
            bool saw_back = false;
            for (int i = 0; i < 50; ++i) {
                const Chromosome c = random_chromosome(s, rng);
                CHECK(c.is_valid(s));
                CHECK(c.rows() == 3);
                for (const Placement& p : c.cells()) {
                    saw_turn = saw_turn || p.rotation != 0;
                    saw_back = saw_back || p.face == Face::Back;
                }
            }
            CHECK(saw_turn == (type != PuzzleType::Type1));
            CHECK(saw_back == (type == PuzzleType::Type4));
        }
    }

    TEST_CASE("random chromosome golden fixture") {
        // Tied to libstdc++'s std::shuffle and uniform_int_distribution.
        Rng rng(42);
        const Chromosome c = random_chromosome(make_spec(2, 3, PuzzleType::Type2), rng);
        const std::vector<std::pair<int, int>> want = {{0, 0}, {2, 3}, {1, 0}, {4, 2}, {5, 1}, {3, 1}};
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(c.cells()[i].piece == want[i].first);
            CHECK(c.cells()[i].rotation == want[i].second);
        }
    }

    TEST_CASE("selection weights") {
        const std::vector<double> costs = {1.0, 3.0, 2.0};
        const auto w = selection_weights(costs);
        CHECK(w[0] > w[2]);
        CHECK(w[2] > w[1]);
        CHECK(w[1] > 0.0);
        CHECK(w[1] == doctest::Approx(3e-6));
        const std::vector<double> zeros = {0.0, 0.0};
        CHECK(selection_weights(zeros) == std::vector<double>{0.0, 0.0});
    }

    TEST_CASE("roulette draws follow the weights") {
        const Chromosome c(1, 1, {{0, 0, Face::Front}});
        SUBCASE("single member") {
            const auto pop = EvaluatedPopulation::with_weights({c}, {0.0}, {5.0});
            Rng rng(1);
            for (int i = 0; i < 10; ++i) {
                CHECK(pop.select_index(rng) == 0);
            }
        }
        SUBCASE("three to one") {
            const auto pop = EvaluatedPopulation::with_weights({c, c}, {0.0, 0.0}, {3.0, 1.0});
            Rng rng(2);
            int first = 0;
            const int draws = 40000;
            for (int i = 0; i < draws; ++i) {
                first += pop.select_index(rng) == 0 ? 1 : 0;
            }
            CHECK(static_cast<double>(first) / draws == doctest::Approx(0.75).epsilon(0.02));
        }
        SUBCASE("equal costs select uniformly") {
            const EvaluatedPopulation pop({c, c, c, c}, {2.0, 2.0, 2.0, 2.0});
            Rng rng(3);
            std::map<std::size_t, int> seen;
            for (int i = 0; i < 40000; ++i) {
                ++seen[pop.select_index(rng)];
            }
            for (std::size_t k = 0; k < 4; ++k) {
                CHECK(seen[k] / 40000.0 == doctest::Approx(0.25).epsilon(0.04));
            }
        }
        SUBCASE("all-zero weights fall back to uniform") {
            const auto pop = EvaluatedPopulation::with_weights({c, c}, {0.0, 0.0}, {0.0, 0.0});
            Rng rng(4);
            int first = 0;
            for (int i = 0; i < 20000; ++i) {
                first += pop.select_index(rng) == 0 ? 1 : 0;
            }
            CHECK(first / 20000.0 == doctest::Approx(0.5).epsilon(0.04));
        }
        SUBCASE("zero-weight members are never drawn") {
            const auto pop = EvaluatedPopulation::with_weights({c, c, c}, {0.0, 0.0, 0.0}, {1.0, 0.0, 1.0});
            Rng rng(5);
            for (int i = 0; i < 5000; ++i) {
                CHECK(pop.select_index(rng) != 1);
            }
        }
    }

    TEST_CASE("stream seeds differ by generation and child") {
        CHECK(stream_seed(1, 0, 0) != stream_seed(1, 0, 1));
        CHECK(stream_seed(1, 0, 0) != stream_seed(1, 1, 0));
        CHECK(stream_seed(1, 2, 3) != stream_seed(2, 2, 3));
        CHECK(stream_seed(7, 2, 3) == stream_seed(7, 2, 3));
    }

    TEST_CASE("config validation") {
        GaConfig c;
        CHECK_NOTHROW(c.validate());
        auto bad = [](auto edit) {
            GaConfig g;
            edit(g);
            CHECK_THROWS_AS(g.validate(), std::invalid_argument);
        };
        bad([](GaConfig& g) { g.population_size = 1; });
        bad([](GaConfig& g) { g.generations = -1; });
        bad([](GaConfig& g) { g.elite_count = -1; });
        bad([](GaConfig& g) { g.elite_count = 1000; });
        bad([](GaConfig& g) { g.mutation_rate = 1.5; });
        bad([](GaConfig& g) { g.workers = 0; });
    }

    TEST_CASE("evolve solves a small oracle puzzle") {
        for (const auto type : {PuzzleType::Type2, PuzzleType::Type4}) {
            const PuzzleBundle b = make_oracle_puzzle(make_spec(4, 6, type, 6), 11);
            const auto table = CompatibilityTable::build(b.pieces, b.spec);
            const GaConfig config = small_config(5);
            int observed = 0;
            const EvolveResult r = evolve(b, table, config, [&](int, const Chromosome&, double) { ++observed; });
            CHECK(r.best_cost == 0.0);
            CHECK(neighbor_comparison(r.best, *b.ground_truth, b.spec) == 1.0);
            CHECK(r.history.size() == static_cast<std::size_t>(config.generations + 1));
            CHECK(observed == config.generations + 1);
            for (std::size_t g = 1; g < r.history.size(); ++g) {
                CHECK(r.history[g].best_cost <= r.history[g - 1].best_cost);
            }
            CHECK(r.history[static_cast<std::size_t>(r.best_generation)].best_cost == r.best_cost);
        }
    }

    TEST_CASE("stop on zero cost ends the run early") {
        const PuzzleBundle b = make_oracle_puzzle(make_spec(3, 3, PuzzleType::Type2, 6), 12);
        const auto table = CompatibilityTable::build(b.pieces, b.spec);
        GaConfig config = small_config(6);
        config.generations = 50;
        config.stop_on_zero_cost = true;
        const EvolveResult r = evolve(b, table, config);
        CHECK(r.best_cost == 0.0);
        CHECK(r.history.size() < 51U);
        CHECK(r.history.back().best_cost == 0.0);
    }

    TEST_CASE("results do not depend on the worker count") {
        std::mt19937_64 rng(7);
        PuzzleBundle b;
        b.spec = make_spec(4, 5, PuzzleType::Type4);
        b.pieces = random_pieces(20, 4, true, rng);
        const auto table = CompatibilityTable::build(b.pieces, b.spec);
        GaConfig config = small_config(9);
        config.generations = 6;
        const EvolveResult one = evolve(b, table, config);
        config.workers = 4;
        const EvolveResult four = evolve(b, table, config);
        CHECK(one.best == four.best);
        CHECK(one.best_cost == four.best_cost);
        for (std::size_t g = 0; g < one.history.size(); ++g) {
            CHECK(one.history[g].best_cost == four.history[g].best_cost);
            CHECK(one.history[g].mean_cost == four.history[g].mean_cost);
        }
    }

    TEST_CASE("zero generations returns the best random member") {
        std::mt19937_64 rng(8);
        PuzzleBundle b;
        b.spec = make_spec(2, 3, PuzzleType::Type2);
        b.pieces = random_pieces(6, 4, false, rng);
        const auto table = CompatibilityTable::build(b.pieces, b.spec);
        GaConfig config = small_config(3);
        config.generations = 0;
        const EvolveResult r = evolve(b, table, config);
        CHECK(r.history.size() == 1U);
        CHECK(r.best.is_valid(b.spec));
        CHECK(fitness_cost(r.best, table, b.spec) == r.best_cost);
    }

    TEST_CASE("run report echoes the config and history") {
        const PuzzleBundle b = make_oracle_puzzle(make_spec(2, 3, PuzzleType::Type2, 4), 13);
        const auto table = CompatibilityTable::build(b.pieces, b.spec);
        GaConfig config = small_config(2);
        config.generations = 3;
        const EvolveResult r = evolve(b, table, config);
        const auto j = run_report(config, r, b.pieces);
        CHECK(j.dump().find("population_size") != std::string::npos);
        CHECK(config_to_json(config)["generations"] == 3);
    }
}
