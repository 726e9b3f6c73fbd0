#include <doctest.h>

#include <algorithm>

#include "jigsaw/crossover.hpp"
#include "jigsaw/evaluation.hpp"
#include "jigsaw/ga_engine.hpp"
#include "support.hpp"

using namespace jigsaw;
using namespace testsupport;

namespace {

struct Fixture {
    PuzzleSpec spec;
    std::vector<Piece> pieces;
    CompatibilityTable table;
    CandidateIndex candidates;

    Fixture(const PuzzleSpec& s, std::uint64_t seed)
        : spec(s), pieces(make(s, seed)), table(CompatibilityTable::build(pieces, s)), candidates(table) {}

    static std::vector<Piece> make(const PuzzleSpec& s, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return random_pieces(s.piece_count(), s.tile_size, s.type == PuzzleType::Type4, rng);
    }
};

std::vector<Relation> relation_set(const Chromosome& c, const EdgeIndexer& ix) { return parent_relation_set(c, ix); }

}  // namespace

TEST_SUITE("crossover") {
    TEST_CASE("parent relation sets") {
        const PuzzleSpec s = make_spec(1, 2, PuzzleType::Type2);
        const EdgeIndexer ix(2, 4);
        const Chromosome one(1, 2, {{0, 0, Face::Front}, {1, 0, Face::Front}});
        CHECK(parent_relation_set(one, ix).size() == 1);

        std::mt19937_64 rng(1);
        const PuzzleSpec s4 = make_spec(3, 4, PuzzleType::Type4);
        const EdgeIndexer ix4(12, 8);
        const Chromosome c = random_chromosome(s4, rng);
        for (const auto t : legal_transforms(PuzzleType::Type4)) {
            CHECK(parent_relation_set(apply_dihedral(c, t, s4.type), ix4) == parent_relation_set(c, ix4));
        }
        (void)s;
    }

    TEST_CASE("2x2 relation set by hand") {
        // 0 1      piece 1 half-turned, piece 3 turned once
        // 2 3
        const EdgeIndexer ix(4, 4);
        const Chromosome c(2, 2, {{0, 0, Face::Front}, {1, 2, Face::Front}, {2, 0, Face::Front}, {3, 1, Face::Front}});
        std::vector<Relation> want = {
            Relation::make({0, EdgeLabel::B}, {1, EdgeLabel::B}),
            Relation::make({2, EdgeLabel::B}, {3, EdgeLabel::A}),
            Relation::make({0, EdgeLabel::C}, {2, EdgeLabel::A}),
            Relation::make({1, EdgeLabel::A}, {3, EdgeLabel::B}),
        };
        std::sort(want.begin(), want.end());
        CHECK(parent_relation_set(c, ix) == want);
    }

    TEST_CASE("parent partner lookup") {
        const EdgeIndexer ix(2, 8);
        const Chromosome c(1, 2, {{0, 0, Face::Front}, {1, 0, Face::Back}});
        const ParentRelations rel(c, ix);
        const int b0 = ix.index({0, EdgeLabel::B});
        const int b1 = ix.index({1, EdgeLabel::BPrime});
        CHECK(rel.contains(b0, b1));
        CHECK(rel.contains(b0 ^ 4, b1 ^ 4));
        CHECK(rel.partner(ix.index({0, EdgeLabel::A})) == -1);
    }

    TEST_CASE("frame rule on a 3x4 puzzle") {
        Kernel k(make_spec(3, 4, PuzzleType::Type2));
        k.place({0, 0}, {0, 0, Face::Front});
        k.place({1, 0}, {1, 0, Face::Front});
        k.place({2, 0}, {2, 0, Face::Front});
        CHECK(k.row_lock() == FrameLock::Free);
        CHECK(k.frame_allows({3, 0}));
        CHECK(k.frame_allows({0, 1}));
        k.place({3, 0}, {3, 0, Face::Front});
        CHECK(k.row_lock() == FrameLock::LockedToLong);
        CHECK(k.col_lock() == FrameLock::LockedToShort);
        CHECK_FALSE(k.frame_allows({4, 0}));
        CHECK_FALSE(k.frame_allows({-1, 0}));
        k.place({0, 1}, {4, 0, Face::Front});
        k.place({0, 2}, {5, 0, Face::Front});
        CHECK_FALSE(k.frame_allows({0, 3}));
        CHECK_FALSE(k.frame_allows({0, -1}));
    }

    TEST_CASE("frame rule before locking") {
        Kernel k(make_spec(3, 4, PuzzleType::Type2));
        k.place({0, 0}, {0, 0, Face::Front});
        k.place({0, 1}, {1, 0, Face::Front});
        k.place({0, 2}, {2, 0, Face::Front});
        k.place({1, 0}, {3, 0, Face::Front});
        k.place({2, 0}, {4, 0, Face::Front});
        // 3x3 box: either axis may still take the long side, not both.
        CHECK(k.frame_allows({0, 3}));
        CHECK(k.frame_allows({3, 0}));
        k.place({0, 3}, {5, 0, Face::Front});
        CHECK(k.col_lock() == FrameLock::LockedToLong);
        CHECK_FALSE(k.frame_allows({3, 0}));
    }

    TEST_CASE("square puzzles cap both axes") {
        Kernel k(make_spec(2, 2, PuzzleType::Type2));
        k.place({0, 0}, {0, 0, Face::Front});
        k.place({0, 1}, {1, 0, Face::Front});
        CHECK_FALSE(k.frame_allows({0, 2}));
        CHECK(k.frame_allows({1, 1}));
        CHECK(k.row_lock() == FrameLock::Free);
    }

    TEST_CASE("Type 1 frame is fixed") {
        Kernel k(make_spec(2, 3, PuzzleType::Type1));
        k.place({0, 0}, {0, 0, Face::Front});
        k.place({1, 0}, {1, 0, Face::Front});
        CHECK_FALSE(k.frame_allows({2, 0}));
        CHECK(k.frame_allows({0, 2}));
    }

    TEST_CASE("feasibility predicate") {
        const PuzzleSpec s = make_spec(3, 4, PuzzleType::Type2);
        const EdgeIndexer ix(12, 4);
        Kernel k(s);
        k.place({0, 0}, {0, 0, Face::Front});
        CandidateEdge good{Relation::make({0, EdgeLabel::B}, {1, EdgeLabel::D}), {0, 1}, {1, 0, Face::Front}};
        CHECK(feasible(k, good, s, ix));

        SUBCASE("piece already placed") {
            k.place({1, 0}, {1, 0, Face::Front});
            CHECK_FALSE(feasible(k, good, s, ix));
        }
        SUBCASE("occupied target") {
            k.place({0, 1}, {2, 0, Face::Front});
            CHECK_FALSE(feasible(k, good, s, ix));
        }
        SUBCASE("placement disagrees with the relation") {
            CandidateEdge turned = good;
            turned.placement.rotation = 1;
            CHECK_FALSE(feasible(k, turned, s, ix));
        }
        SUBCASE("the anchor edge does not face the target") {
            CandidateEdge wrong = good;
            wrong.relation = Relation::make({0, EdgeLabel::A}, {1, EdgeLabel::D});
            CHECK_FALSE(feasible(k, wrong, s, ix));
        }
        SUBCASE("column extended to four, then blocked at five") {
            k.place({1, 0}, {2, 0, Face::Front});
            k.place({2, 0}, {3, 0, Face::Front});
            CandidateEdge down{Relation::make({3, EdgeLabel::C}, {4, EdgeLabel::A}), {3, 0}, {4, 0, Face::Front}};
            CHECK(feasible(k, down, s, ix));
            k.place({3, 0}, {4, 0, Face::Front});
            CandidateEdge further{Relation::make({4, EdgeLabel::C}, {5, EdgeLabel::A}), {4, 0}, {5, 0, Face::Front}};
            CHECK_FALSE(feasible(k, further, s, ix));
        }
        SUBCASE("back faces are illegal on one-sided puzzles") {
            CandidateEdge back = good;
            back.placement.face = Face::Back;
            CHECK_FALSE(feasible(k, back, s, ix));
        }
    }

    TEST_CASE("Type 4: once a piece shows its front, its primed edges are out") {
        const PuzzleSpec s = make_spec(2, 2, PuzzleType::Type4);
        const EdgeIndexer ix(4, 8);
        Kernel k(s);
        k.place({0, 0}, {0, 0, Face::Front});
        k.place({0, 1}, {1, 0, Face::Front});  // seam 0.b - 1.d
        // Any seam on 0.b' would need piece 0 turned over.
        CandidateEdge primed{Relation::make({0, EdgeLabel::BPrime}, {2, EdgeLabel::D}), {1, 0},
                             {2, 0, Face::Front}};
        CHECK_FALSE(feasible(k, primed, s, ix));
        CandidateEdge primed_down{Relation::make({0, EdgeLabel::CPrime}, {2, EdgeLabel::A}), {1, 0},
                                  {2, 0, Face::Front}};
        CHECK_FALSE(feasible(k, primed_down, s, ix));
        CandidateEdge ok{Relation::make({0, EdgeLabel::C}, {2, EdgeLabel::APrime}), {1, 0}, {2, 0, Face::Back}};
        CHECK(feasible(k, ok, s, ix));
    }

    TEST_CASE("identical parents give back their relation set") {
        for (const auto type : {PuzzleType::Type1, PuzzleType::Type2, PuzzleType::Type4}) {
            const Fixture f(make_spec(4, 5, type), 10);
            const KernelCrossover cross(f.spec, f.candidates, 0.05);
            std::mt19937_64 rng(3);
            for (int i = 0; i < 20; ++i) {
                const Chromosome p = random_chromosome(f.spec, rng);
                CrossoverTrace trace;
                const Chromosome child = cross(p, p, rng, &trace);
                CHECK(child.is_valid(f.spec));
                CHECK(relation_set(child, f.table.indexer()) == relation_set(p, f.table.indexer()));
                for (const auto& st : trace.steps) {
                    CHECK(st.phase == Phase::Shared);
                }
            }
        }
    }

    TEST_CASE("oracle 2x2: random parents give the perfect child") {
        // Best buddies and zero-weight seams are exactly the true seams, so
        // only a wrong seam present in both parents can spoil the child.
        const PuzzleBundle b = make_oracle_puzzle(make_spec(2, 2, PuzzleType::Type2, 6), 4);
        const auto table = CompatibilityTable::build(b.pieces, b.spec);
        const CandidateIndex candidates(table);
        const KernelCrossover cross(b.spec, candidates, 0.0);
        const EdgeIndexer& ix = table.indexer();
        auto truth = adjacency_relations(*b.ground_truth);
        std::sort(truth.begin(), truth.end());
        std::mt19937_64 rng(8);
        int tried = 0;
        for (int i = 0; i < 300; ++i) {
            const Chromosome p1 = random_chromosome(b.spec, rng);
            const Chromosome p2 = random_chromosome(b.spec, rng);
            const auto r1 = relation_set(p1, ix);
            const auto r2 = relation_set(p2, ix);
            std::vector<Relation> shared;
            std::set_intersection(r1.begin(), r1.end(), r2.begin(), r2.end(), std::back_inserter(shared));
            if (!std::includes(truth.begin(), truth.end(), shared.begin(), shared.end())) {
                continue;
            }
            ++tried;
            CrossoverTrace trace;
            const Chromosome child = cross(p1, p2, rng, &trace);
            CHECK(neighbor_comparison(child, *b.ground_truth, b.spec) == 1.0);
            for (const auto& st : trace.steps) {
                CHECK(std::binary_search(truth.begin(), truth.end(), st.relation));
            }
        }
        CHECK(tried > 100);
    }

    TEST_CASE("phase instrumentation is sound") {
        for (const auto type : {PuzzleType::Type2, PuzzleType::Type4}) {
            const Fixture f(make_spec(5, 6, type), 20);
            const EdgeIndexer& ix = f.table.indexer();
            const KernelCrossover cross(f.spec, f.candidates, 0.1);
            std::mt19937_64 rng(4);
            Chromosome p1 = random_chromosome(f.spec, rng);
            Chromosome p2 = random_chromosome(f.spec, rng);
            for (int i = 0; i < 30; ++i) {
                CrossoverTrace trace;
                const Chromosome child = cross(p1, p2, rng, &trace);
                const ParentRelations r1(p1, ix);
                const ParentRelations r2(p2, ix);
                CHECK(trace.steps.size() == static_cast<std::size_t>(f.spec.piece_count() - 1));
                for (const auto& st : trace.steps) {
                    const int a = ix.index(st.relation.first);
                    const int b = ix.index(st.relation.second);
                    if (st.phase == Phase::Shared) {
                        CHECK((r1.contains(a, b) && r2.contains(a, b)));
                    } else if (st.phase == Phase::BestBuddy) {
                        CHECK((r1.contains(a, b) || r2.contains(a, b)));
                        CHECK((f.table.is_best_buddy(a, b) ||
                               (type == PuzzleType::Type4 && f.table.is_best_buddy(a ^ 4, b ^ 4))));
                    }
                }
                p1 = p2;
                p2 = child;
            }
        }
    }

    TEST_CASE("transformed parents yield the same child relations") {
        const Fixture f(make_spec(4, 6, PuzzleType::Type4), 30);
        const KernelCrossover cross(f.spec, f.candidates, 0.05);
        std::mt19937_64 rng(5);
        for (int i = 0; i < 10; ++i) {
            const Chromosome p1 = random_chromosome(f.spec, rng);
            const Chromosome p2 = random_chromosome(f.spec, rng);
            const std::uint64_t seed = rng();
            Rng a(seed);
            Rng b(seed);
            const Chromosome c1 = cross(p1, p2, a);
            const Chromosome c2 = cross(apply_dihedral(p1, {1, true}, f.spec.type), apply_dihedral(p2, {3, false}, f.spec.type), b);
            CHECK(relation_set(c1, f.table.indexer()) == relation_set(c2, f.table.indexer()));
        }
    }

    TEST_CASE("greedy phase takes the lightest seam around the seed first") {
        const Fixture f(make_spec(3, 3, PuzzleType::Type2), 40);
        const KernelCrossover cross(f.spec, f.candidates, 0.0);
        std::mt19937_64 rng(6);
        int checked = 0;
        for (int i = 0; i < 40; ++i) {
            const Chromosome p1 = random_chromosome(f.spec, rng);
            const Chromosome p2 = random_chromosome(f.spec, rng);
            CrossoverTrace trace;
            const Chromosome child = cross(p1, p2, rng, &trace);
            CHECK(child.is_valid(f.spec));
            if (trace.steps.front().phase != Phase::Greedy) {
                continue;
            }
            ++checked;
            double lowest = CompatibilityTable::kInfinity;
            for (int lab = 0; lab < 4; ++lab) {
                const int e = trace.seed * 4 + lab;
                for (int g = 0; g < f.table.indexer().edge_count(); ++g) {
                    lowest = std::min(lowest, f.table.score(e, g));
                }
            }
            CHECK(f.table.score(trace.steps.front().relation) == lowest);
        }
        CHECK(checked > 0);
    }

    TEST_CASE("candidate partners are sorted by seam weight") {
        const Fixture f(make_spec(3, 3, PuzzleType::Type4), 50);
        for (int e = 0; e < f.table.indexer().edge_count(); ++e) {
            const auto ps = f.candidates.partners(e);
            CHECK(ps.size() == 8U * 8U);
            for (std::size_t i = 1; i < ps.size(); ++i) {
                CHECK(f.candidates.weight(e, ps[i - 1]) <= f.candidates.weight(e, ps[i]));
            }
        }
    }
}
