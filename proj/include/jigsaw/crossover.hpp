#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "jigsaw/compatibility.hpp"
#include "jigsaw/puzzle_model.hpp"

namespace jigsaw {

using Rng = std::mt19937_64;

/// Set of seams of a parent, independent of where and how the parent placed
/// them. Two-sided seams are canonicalized to one view so that turning the
/// parent over leaves the set unchanged.
[[nodiscard]] std::vector<Relation> parent_relation_set(const Chromosome& parent, const EdgeIndexer& indexer);

/// Partner lookup over a parent's seams: for every piece edge, the edge it
/// abuts in the parent (-1 on the border). Two-sided parents register both
/// views of each seam.
class ParentRelations {
public:
    ParentRelations() = default;
    ParentRelations(const Chromosome& parent, const EdgeIndexer& indexer);

    [[nodiscard]] int partner(int edge) const { return partner_[static_cast<std::size_t>(edge)]; }
    [[nodiscard]] bool contains(int edge_i, int edge_j) const { return partner(edge_i) == edge_j; }

private:
    std::vector<int> partner_;
};

/// Per-solve ordering of candidate partners for the greedy phase: for every
/// piece edge, all legal partner edges sorted by seam weight (ties by index).
/// The seam weight of a two-sided seam adds both faces.
class CandidateIndex {
public:
    explicit CandidateIndex(const CompatibilityTable& table);

    [[nodiscard]] std::span<const std::int32_t> partners(int edge) const {
        return {order_.data() + static_cast<std::size_t>(edge) * width_, width_};
    }
    [[nodiscard]] double weight(int edge_i, int edge_j) const;
    [[nodiscard]] const CompatibilityTable& table() const { return *table_; }

private:
    const CompatibilityTable* table_;
    std::size_t width_ = 0;
    std::vector<std::int32_t> order_;
};

struct Cell {
    int row = 0;
    int col = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
};

[[nodiscard]] constexpr Cell neighbor(Cell c, Side s) {
    switch (s) {
        case Side::Top: return {c.row - 1, c.col};
        case Side::Right: return {c.row, c.col + 1};
        case Side::Bottom: return {c.row + 1, c.col};
        default: return {c.row, c.col - 1};
    }
}

enum class FrameLock : std::uint8_t { Free, LockedToLong, LockedToShort };
enum class Phase : std::uint8_t { Shared, BestBuddy, Greedy, Mutation };

/// Partially grown assembly on an unbounded plane (stored in a bounded board
/// around the seed), with the flexible frame: while both axes are free each may
/// reach min(N, M); the first axis to reach min(N, M) + 1 locks to max(N, M)
/// and the other to min(N, M). Type 1 frames are fixed at N x M from the start.
class Kernel {
public:
    explicit Kernel(const PuzzleSpec& spec);

    void reset();
    [[nodiscard]] int size() const { return placed_count_; }
    [[nodiscard]] bool is_placed(PieceIndex piece) const { return placed_[static_cast<std::size_t>(piece)] != 0; }
    [[nodiscard]] bool occupied(Cell c) const { return inside(c) && board_[slot(c)] >= 0; }
    [[nodiscard]] std::optional<Placement> at(Cell c) const;

    /// Whether placing any piece at `c` keeps the bounding box within the frame.
    [[nodiscard]] bool frame_allows(Cell c) const;
    void place(Cell c, const Placement& p);

    [[nodiscard]] FrameLock row_lock() const { return row_lock_; }
    [[nodiscard]] FrameLock col_lock() const { return col_lock_; }
    [[nodiscard]] int row_extent() const { return placed_count_ ? max_row_ - min_row_ + 1 : 0; }
    [[nodiscard]] int col_extent() const { return placed_count_ ? max_col_ - min_col_ + 1 : 0; }

    /// Normalizes the bounding box to a grid. Requires every cell filled.
    [[nodiscard]] Chromosome to_chromosome() const;

private:
    [[nodiscard]] bool inside(Cell c) const {
        return c.row > -radius_ && c.row < radius_ && c.col > -radius_ && c.col < radius_;
    }
    [[nodiscard]] std::size_t slot(Cell c) const {
        return static_cast<std::size_t>(c.row + radius_ - 1) * static_cast<std::size_t>(span_) +
               static_cast<std::size_t>(c.col + radius_ - 1);
    }
    friend class KernelCrossover;

    PuzzleSpec spec_;
    int short_ = 0;
    int long_ = 0;
    int radius_ = 0;
    int span_ = 0;
    std::vector<std::int32_t> board_;  // piece * 8 + rotation * 2 + face, or -1
    std::vector<std::uint8_t> placed_;
    int placed_count_ = 0;
    int min_row_ = 0, max_row_ = 0, min_col_ = 0, max_col_ = 0;
    FrameLock row_lock_ = FrameLock::Free;
    FrameLock col_lock_ = FrameLock::Free;
};

/// A proposed kernel extension: `relation` joins an edge of a placed piece to
/// an edge of the piece that would occupy `target` as `placement`.
struct CandidateEdge {
    Relation relation;
    Cell target;
    Placement placement;
    Phase phase = Phase::Greedy;
    double weight = 0.0;
};

/// Full admissibility of a candidate: piece not yet placed, target empty and
/// within the frame, the relation's placed edge actually faces the target,
/// the placement shows the other edge toward it (which fixes the new piece's
/// face, excluding its other-face labels), the orientation is legal for the
/// puzzle type, and no edge on any created seam is already used.
[[nodiscard]] bool feasible(const Kernel& kernel, const CandidateEdge& candidate, const PuzzleSpec& spec,
                            const EdgeIndexer& indexer);

/// Selections made while building one child, for instrumentation.
struct CrossoverTrace {
    struct Step {
        Phase phase;
        Relation relation;
    };
    PieceIndex seed = -1;
    std::vector<Step> steps;
};

/// Reusable buffers for one worker.
class CrossoverWorkspace {
public:
    explicit CrossoverWorkspace(const PuzzleSpec& spec);

private:
    friend class KernelCrossover;

    struct Listed {
        Cell target;
        Side side;          // side of the placed piece facing target
        std::int32_t from;  // placed piece edge
        std::int32_t to;    // edge of the piece to place
    };
    struct Queued {
        double weight;
        std::int32_t to;
        std::int32_t from;
        Cell target;
    };
    struct Open {
        Cell target;
        Side side;  // side of the placed piece facing target
        std::int32_t from;
    };

    Kernel kernel_;
    std::vector<Listed> shared_;
    std::vector<Listed> buddies_;
    std::vector<Queued> heap_;
    std::vector<Open> open_;
    std::vector<std::int32_t> cursor_;
    std::vector<PieceIndex> unplaced_;
    std::vector<std::int32_t> unplaced_pos_;
};

/// Kernel-growing crossover. Starting from one random piece, it adds one piece
/// per step through an edge leaving the kernel, preferring a seam found in
/// both parents, then a best-buddy seam found in either parent, then the
/// lightest seam available; ties in the first two tiers are broken at random.
/// With probability `mutation_rate` a greedy step instead places a random
/// unplaced piece in a random orientation at a random open cell.
class KernelCrossover {
public:
    KernelCrossover(const PuzzleSpec& spec, const CandidateIndex& candidates, double mutation_rate);

    [[nodiscard]] Chromosome operator()(const ParentRelations& first, const ParentRelations& second, Rng& rng,
                                        CrossoverWorkspace& workspace, CrossoverTrace* trace = nullptr) const;

    /// Convenience overload that derives parent relations and scratch space.
    [[nodiscard]] Chromosome operator()(const Chromosome& first, const Chromosome& second, Rng& rng,
                                        CrossoverTrace* trace = nullptr) const;

private:
    void open_sides(CrossoverWorkspace& ws, Cell cell, const Placement& p, const ParentRelations& first,
                    const ParentRelations& second) const;
    void place(CrossoverWorkspace& ws, Cell cell, const Placement& p, const ParentRelations& first,
               const ParentRelations& second) const;
    bool pop_listed(std::vector<CrossoverWorkspace::Listed>& list, CrossoverWorkspace& ws, Rng& rng,
                    CrossoverWorkspace::Listed& out) const;
    void push_cursor(CrossoverWorkspace& ws, std::int32_t from, Cell target) const;
    [[nodiscard]] bool buddy_seam(int from, int to) const;
    [[nodiscard]] Placement placement_for(int to, Side facing) const;

    PuzzleSpec spec_;
    const CandidateIndex* candidates_;
    const CompatibilityTable* table_;
    double mutation_rate_;
};

}  // namespace jigsaw
