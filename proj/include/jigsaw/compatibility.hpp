#pragma once

#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "jigsaw/puzzle_model.hpp"

namespace jigsaw {

/// Root of the summed squared L*a*b* differences along the seam formed when
/// `edge_i` of `piece_i` abuts `edge_j` of `piece_j`. Boundary pixels are read
/// clockwise around each piece, so the second sequence runs reversed against
/// the first. For b against d at rotation 0 this is the plain right-column /
/// left-column comparison. Throws std::invalid_argument for a primed edge on a
/// one-sided piece.
[[nodiscard]] double dissimilarity(const Piece& piece_i, EdgeLabel edge_i, const Piece& piece_j, EdgeLabel edge_j);

/// Whether two labels may meet in a puzzle of the given type: opposite
/// unprimed sides only for Type 1, any unprimed pair for Type 2, anything for
/// Type 4.
[[nodiscard]] bool legal_pair(PuzzleType type, EdgeLabel x, EdgeLabel y);

/// Dense table of dissimilarities over every pair of piece edges, indexed by
/// EdgeIndexer. Same-piece and illegal pairs hold +infinity. Immutable once
/// built; safe for concurrent reads.
class CompatibilityTable {
public:
    static constexpr double kInfinity = std::numeric_limits<double>::infinity();

    /// Requires at least two pieces. `workers` only changes wall-clock time:
    /// every entry is computed independently, so tables are bit-identical.
    static CompatibilityTable build(std::span<const Piece> pieces, const PuzzleSpec& spec, int workers = 1);

    [[nodiscard]] const EdgeIndexer& indexer() const { return indexer_; }
    [[nodiscard]] PuzzleType type() const { return type_; }

    [[nodiscard]] double score(int edge_i, int edge_j) const {
        return scores_[static_cast<std::size_t>(edge_i) * stride_ + static_cast<std::size_t>(edge_j)];
    }
    [[nodiscard]] double score(const Relation& r) const {
        return score(indexer_.index(r.first), indexer_.index(r.second));
    }
    /// Row of all scores against one piece edge.
    [[nodiscard]] std::span<const double> row(int edge_i) const {
        return {scores_.data() + static_cast<std::size_t>(edge_i) * stride_, stride_};
    }

    /// Best-buddy partner of a piece edge, or -1.
    [[nodiscard]] int best_buddy(int edge) const { return buddies_[static_cast<std::size_t>(edge)]; }
    [[nodiscard]] bool is_best_buddy(int edge_i, int edge_j) const { return best_buddy(edge_i) == edge_j; }
    [[nodiscard]] bool is_best_buddy(const Relation& r) const {
        return is_best_buddy(indexer_.index(r.first), indexer_.index(r.second));
    }
    [[nodiscard]] std::vector<Relation> best_buddy_relations() const;

    /// Binary cache: magic, version, bundle checksum, dimensions, raw scores.
    void save(const std::filesystem::path& path, const std::string& bundle_checksum) const;
    /// Throws InputError on a malformed file or a checksum/dimension mismatch.
    static CompatibilityTable load(const std::filesystem::path& path, const std::string& bundle_checksum,
                                   const PuzzleSpec& spec);

private:
    CompatibilityTable(const PuzzleSpec& spec, int piece_count);
    void derive_best_buddies();

    EdgeIndexer indexer_;
    PuzzleType type_;
    std::size_t stride_;
    std::vector<double> scores_;
    std::vector<int> buddies_;
};

/// Mutual-minimum piece-edge pairs: (p.x, q.y) qualifies when q.y is p.x's
/// lowest-scoring partner and vice versa. Ties go to the smallest
/// (piece, label) and must still be mutual.
[[nodiscard]] std::vector<int> best_buddy_edges(const CompatibilityTable& table);

}  // namespace jigsaw
