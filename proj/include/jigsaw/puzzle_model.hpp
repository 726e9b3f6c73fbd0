#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jigsaw/image.hpp"

namespace jigsaw {

/// Puzzle types by what is unknown: 1 = location, 2 = location + orientation,
/// 4 = location + orientation + face. Types 3, 5, 6 and 7 complete the taxonomy
/// but have no solver.
enum class PuzzleType : std::uint8_t {
    Type1 = 1,
    Type2 = 2,
    Type3 = 3,
    Type4 = 4,
    Type5 = 5,
    Type6 = 6,
    Type7 = 7,
};

[[nodiscard]] bool is_supported(PuzzleType type);
[[nodiscard]] PuzzleType puzzle_type_from_int(int value);
[[nodiscard]] std::string to_string(PuzzleType type);

/// Edges per piece: 4 for one-sided pieces, 8 for two-sided.
[[nodiscard]] int edges_per_piece(PuzzleType type);

struct PuzzleSpec {
    int rows = 0;
    int cols = 0;
    int tile_size = 0;
    PuzzleType type = PuzzleType::Type1;

    [[nodiscard]] int piece_count() const { return rows * cols; }
    [[nodiscard]] int edges_per_piece() const { return jigsaw::edges_per_piece(type); }
    /// Throws std::invalid_argument when dimensions or type are unusable.
    void validate() const;

    friend bool operator==(const PuzzleSpec&, const PuzzleSpec&) = default;
};

/// Opaque random token; carries no positional information.
struct PieceId {
    std::uint64_t value = 0;

    [[nodiscard]] std::string hex() const;
    static PieceId from_hex(const std::string& text);

    friend auto operator<=>(const PieceId&, const PieceId&) = default;
};

struct Piece {
    PieceId id;
    FaceImage front;
    std::optional<FaceImage> back;
    // Source sRGB pixels, kept so results render without a lossy round trip.
    RgbImage front_rgb;
    std::optional<RgbImage> back_rgb;

    friend bool operator==(const Piece&, const Piece&) = default;
};

/// Position of a piece within its bundle.
using PieceIndex = std::int32_t;

enum class Face : std::uint8_t { Front = 0, Back = 1 };

/// Display sides in clockwise order.
enum class Side : std::uint8_t { Top = 0, Right = 1, Bottom = 2, Left = 3 };

[[nodiscard]] constexpr Side opposite(Side s) {
    return static_cast<Side>((static_cast<int>(s) + 2) % 4);
}

/// a..d label the front face clockwise from the top at rotation 0; a'..d' are
/// the same physical boundaries seen on the flipped face, so b' is the left
/// edge of the back face.
enum class EdgeLabel : std::uint8_t { A = 0, B, C, D, APrime, BPrime, CPrime, DPrime };

[[nodiscard]] constexpr bool is_primed(EdgeLabel e) { return static_cast<int>(e) >= 4; }
/// Same physical boundary, other face: a <-> a', b <-> b', ...
[[nodiscard]] constexpr EdgeLabel flip_counterpart(EdgeLabel e) {
    return static_cast<EdgeLabel>(static_cast<int>(e) ^ 4);
}
[[nodiscard]] std::string to_string(EdgeLabel e);

/// One cell of a chromosome. Rotation counts counterclockwise quarter turns
/// applied to the face's own raster before display.
struct Placement {
    PieceIndex piece = 0;
    std::uint8_t rotation = 0;
    Face face = Face::Front;

    friend bool operator==(const Placement&, const Placement&) = default;
};

/// Label shown on display side `side` by a placed piece.
[[nodiscard]] EdgeLabel visible_edge(const Placement& p, Side side);

/// Face carrying a label and the side it occupies in that face's own
/// face-up view.
struct FaceSide {
    Face face = Face::Front;
    Side side = Side::Top;
};
[[nodiscard]] FaceSide face_side_of(EdgeLabel edge);

/// Rotation and face that bring `edge` to display side `side`.
struct Orientation {
    std::uint8_t rotation = 0;
    Face face = Face::Front;
};
[[nodiscard]] Orientation orientation_showing(EdgeLabel edge, Side side);

struct PieceEdge {
    PieceIndex piece = 0;
    EdgeLabel edge = EdgeLabel::A;

    friend auto operator<=>(const PieceEdge&, const PieceEdge&) = default;
};

/// Unordered pairing of two labeled edges of distinct pieces; stored with
/// first < second.
struct Relation {
    PieceEdge first;
    PieceEdge second;

    static Relation make(PieceEdge x, PieceEdge y);
    /// The same physical seam seen from the other side of a two-sided puzzle.
    [[nodiscard]] Relation other_side() const;

    friend auto operator<=>(const Relation&, const Relation&) = default;
};

enum class Direction : std::uint8_t { Horizontal, Vertical };

/// Relation between `first` and `second` when `second` sits right of
/// (Horizontal) or below (Vertical) `first`.
[[nodiscard]] Relation relation_of_adjacency(const Placement& first, const Placement& second,
                                             Direction direction);

/// Dense numbering of piece edges and relations for a puzzle with n pieces and
/// L labels per piece.
class EdgeIndexer {
public:
    EdgeIndexer(int piece_count, int labels_per_piece)
        : pieces_(piece_count), labels_(labels_per_piece) {}

    [[nodiscard]] int piece_count() const { return pieces_; }
    [[nodiscard]] int labels() const { return labels_; }
    [[nodiscard]] int edge_count() const { return pieces_ * labels_; }

    [[nodiscard]] int index(PieceEdge e) const { return e.piece * labels_ + static_cast<int>(e.edge); }
    [[nodiscard]] PieceEdge edge(int idx) const {
        return {idx / labels_, static_cast<EdgeLabel>(idx % labels_)};
    }
    [[nodiscard]] std::uint64_t key(const Relation& r) const {
        return static_cast<std::uint64_t>(index(r.first)) * static_cast<std::uint64_t>(edge_count()) +
               static_cast<std::uint64_t>(index(r.second));
    }
    /// Orientation-free key of a physical seam: for two-sided puzzles the
    /// smaller key of the two views.
    [[nodiscard]] std::uint64_t seam_key(const Relation& r) const;

private:
    int pieces_;
    int labels_;
};

/// Complete candidate assembly: rows x cols grid of placements.
class Chromosome {
public:
    Chromosome() = default;
    Chromosome(int rows, int cols) : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * cols) {}
    Chromosome(int rows, int cols, std::vector<Placement> cells);

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] std::size_t size() const { return cells_.size(); }

    Placement& at(int r, int c) { return cells_[static_cast<std::size_t>(r) * cols_ + c]; }
    [[nodiscard]] const Placement& at(int r, int c) const { return cells_[static_cast<std::size_t>(r) * cols_ + c]; }
    [[nodiscard]] std::span<const Placement> cells() const { return cells_; }
    [[nodiscard]] std::span<Placement> cells() { return cells_; }

    /// O(n) bijection check plus per-type rotation/face constraints and
    /// dimensions equal to (N, M) or, when rotation is unknown, (M, N).
    [[nodiscard]] bool is_valid(const PuzzleSpec& spec) const;

    friend bool operator==(const Chromosome&, const Chromosome&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Placement> cells_;
};

/// Visible relation of every grid adjacency, row-major horizontal seams then
/// vertical seams.
[[nodiscard]] std::vector<Relation> adjacency_relations(const Chromosome& chromosome);

/// Global rigid motion of a whole assembly: optional turn-over about the
/// vertical axis, then counterclockwise quarter turns.
struct DihedralTransform {
    std::uint8_t quarter_turns = 0;
    bool flip = false;

    friend bool operator==(const DihedralTransform&, const DihedralTransform&) = default;
};

/// Transforms legal for a puzzle type: identity for Type 1, four rotations for
/// Type 2, rotations with and without flip for Type 4.
[[nodiscard]] std::vector<DihedralTransform> legal_transforms(PuzzleType type);

/// Throws std::invalid_argument when a flip is requested on a one-sided puzzle.
[[nodiscard]] Chromosome apply_dihedral(const Chromosome& chromosome, DihedralTransform transform,
                                        PuzzleType type);

}  // namespace jigsaw
