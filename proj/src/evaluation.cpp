#include "jigsaw/evaluation.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "jigsaw/compatibility.hpp"

namespace jigsaw {

namespace {

void require_comparable(const Chromosome& solution, const Chromosome& truth, const PuzzleSpec& spec) {
    if (!truth.is_valid(spec)) {
        throw std::invalid_argument("ground truth is not a valid assembly for the puzzle");
    }
    if (!solution.is_valid(spec)) {
        throw std::invalid_argument("solution does not cover the puzzle's piece set");
    }
}

std::vector<std::uint64_t> seam_keys(const Chromosome& c, const EdgeIndexer& ix) {
    std::vector<std::uint64_t> keys;
    for (const Relation& r : adjacency_relations(c)) {
        keys.push_back(ix.seam_key(r));
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

std::vector<Relation> true_relations(const Chromosome& truth, PuzzleType type) {
    std::vector<Relation> out;
    for (const Relation& r : adjacency_relations(truth)) {
        out.push_back(r);
        if (type == PuzzleType::Type4) {
            out.push_back(r.other_side());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

RgbImage random_field(int width, int height, std::mt19937_64& rng) {
    RgbImage img(width, height);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& v : img.data) {
        v = static_cast<std::uint8_t>(byte(rng));
    }
    return img;
}

bool oracle_is_sound(const PuzzleBundle& bundle) {
    const auto table = CompatibilityTable::build(bundle.pieces, bundle.spec);
    const EdgeIndexer& ix = table.indexer();
    const auto truth = true_relations(*bundle.ground_truth, bundle.spec.type);
    std::vector<Relation> zero;
    for (int e = 0; e < ix.edge_count(); ++e) {
        const auto row = table.row(e);
        for (int f = e + 1; f < ix.edge_count(); ++f) {
            if (row[static_cast<std::size_t>(f)] == 0.0) {
                zero.push_back(Relation::make(ix.edge(e), ix.edge(f)));
            }
        }
    }
    std::sort(zero.begin(), zero.end());
    auto buddies = table.best_buddy_relations();
    std::sort(buddies.begin(), buddies.end());
    return zero == truth && buddies == truth;
}

}  // namespace

DirectScore direct_comparison(const Chromosome& solution, const Chromosome& truth, const PuzzleSpec& spec) {
    require_comparable(solution, truth, spec);
    DirectScore best;
    bool first = true;
    for (const DihedralTransform t : legal_transforms(spec.type)) {
        const Chromosome moved = apply_dihedral(solution, t, spec.type);
        double fraction = 0.0;
        if (moved.rows() == truth.rows() && moved.cols() == truth.cols()) {
            std::size_t hits = 0;
            for (std::size_t i = 0; i < truth.size(); ++i) {
                hits += moved.cells()[i] == truth.cells()[i] ? 1 : 0;
            }
            fraction = static_cast<double>(hits) / static_cast<double>(truth.size());
        }
        if (first || fraction > best.fraction) {
            best = {fraction, t};
            first = false;
        }
    }
    return best;
}

double neighbor_comparison(const Chromosome& solution, const Chromosome& truth, const PuzzleSpec& spec) {
    require_comparable(solution, truth, spec);
    const EdgeIndexer ix(spec.piece_count(), spec.edges_per_piece());
    const auto expected = seam_keys(truth, ix);
    if (expected.empty()) {
        return 1.0;
    }
    const auto found = seam_keys(solution, ix);
    std::size_t hits = 0;
    for (const auto k : expected) {
        hits += std::binary_search(found.begin(), found.end(), k) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(expected.size());
}

ScoreReport score_solution(const Chromosome& solution, const Chromosome& truth, const PuzzleSpec& spec) {
    const DirectScore d = direct_comparison(solution, truth, spec);
    ScoreReport r;
    r.direct = d.fraction;
    r.best_transform = d.transform;
    r.neighbor = neighbor_comparison(solution, truth, spec);
    r.perfect = d.fraction == 1.0;
    return r;
}

nlohmann::json to_json(const ScoreReport& report) {
    return {{"direct", report.direct},
            {"neighbor", report.neighbor},
            {"perfect", report.perfect},
            {"best_transform",
             {{"rotation", report.best_transform.quarter_turns * 90}, {"flip", report.best_transform.flip}}}};
}

PuzzleBundle make_oracle_puzzle(const PuzzleSpec& spec, std::uint64_t seed) {
    spec.validate();
    const int w = spec.tile_size;
    if (w < 2) {
        throw std::invalid_argument("oracle puzzles need tiles of at least 2 pixels");
    }
    const int width = spec.cols * (w - 1) + 1;
    const int height = spec.rows * (w - 1) + 1;
    const bool two_sided = spec.type == PuzzleType::Type4;
    std::mt19937_64 rng(seed);
    constexpr int kAttempts = 64;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        const RgbImage front = random_field(width, height, rng);
        const RgbImage back = two_sided ? random_field(width, height, rng) : RgbImage{};
        std::vector<RgbImage> fronts;
        std::vector<RgbImage> backs;
        for (int r = 0; r < spec.rows; ++r) {
            for (int c = 0; c < spec.cols; ++c) {
                fronts.push_back(cropped(front, c * (w - 1), r * (w - 1), w, w));
                if (two_sided) {
                    backs.push_back(cropped(back, (spec.cols - 1 - c) * (w - 1), r * (w - 1), w, w));
                }
            }
        }
        PuzzleBundle bundle = assemble_bundle(spec, std::move(fronts), std::move(backs), rng());
        bundle = scramble(bundle, rng()).bundle;
        if (spec.piece_count() < 2 || oracle_is_sound(bundle)) {
            return bundle;
        }
    }
    throw std::runtime_error("could not draw a sound oracle puzzle");
}

}  // namespace jigsaw
