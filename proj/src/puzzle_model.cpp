#include "jigsaw/puzzle_model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace jigsaw {

namespace {

// Back face seen face-up: top, right, bottom, left carry a', d', c', b'.
constexpr std::array<EdgeLabel, 4> kBackSideLabel = {EdgeLabel::APrime, EdgeLabel::DPrime,
                                                     EdgeLabel::CPrime, EdgeLabel::BPrime};
// Inverse of the above, indexed by label - 4.
constexpr std::array<int, 4> kBackLabelSide = {0, 3, 2, 1};

}  // namespace

bool is_supported(PuzzleType type) {
    return type == PuzzleType::Type1 || type == PuzzleType::Type2 || type == PuzzleType::Type4;
}

PuzzleType puzzle_type_from_int(int value) {
    if (value < 1 || value > 7) {
        throw std::invalid_argument("puzzle type must be between 1 and 7");
    }
    return static_cast<PuzzleType>(value);
}

std::string to_string(PuzzleType type) { return "Type" + std::to_string(static_cast<int>(type)); }

int edges_per_piece(PuzzleType type) { return type == PuzzleType::Type4 ? 8 : 4; }

void PuzzleSpec::validate() const {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("puzzle needs at least one row and one column");
    }
    if (tile_size < 1) {
        throw std::invalid_argument("tile size must be positive");
    }
    if (!is_supported(type)) {
        throw std::invalid_argument(to_string(type) + " puzzles are not supported");
    }
}

std::string PieceId::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

PieceId PieceId::from_hex(const std::string& text) {
    PieceId id;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, id.value, 16);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw std::invalid_argument("malformed piece id '" + text + "'");
    }
    return id;
}

std::string to_string(EdgeLabel e) {
    static constexpr std::array<const char*, 8> names = {"a", "b", "c", "d", "a'", "b'", "c'", "d'"};
    return names[static_cast<int>(e)];
}

EdgeLabel visible_edge(const Placement& p, Side side) {
    const int t = (static_cast<int>(side) + p.rotation) % 4;
    return p.face == Face::Front ? static_cast<EdgeLabel>(t) : kBackSideLabel[t];
}

FaceSide face_side_of(EdgeLabel edge) {
    const int e = static_cast<int>(edge);
    return e < 4 ? FaceSide{Face::Front, static_cast<Side>(e)} : FaceSide{Face::Back, static_cast<Side>(kBackLabelSide[e - 4])};
}

Orientation orientation_showing(EdgeLabel edge, Side side) {
    const FaceSide fs = face_side_of(edge);
    const int rot = (static_cast<int>(fs.side) - static_cast<int>(side) + 4) % 4;
    return {static_cast<std::uint8_t>(rot), fs.face};
}

Relation Relation::make(PieceEdge x, PieceEdge y) {
    if (x.piece == y.piece) {
        throw std::invalid_argument("relation needs two distinct pieces");
    }
    return x < y ? Relation{x, y} : Relation{y, x};
}

Relation Relation::other_side() const {
    return make({first.piece, flip_counterpart(first.edge)}, {second.piece, flip_counterpart(second.edge)});
}

Relation relation_of_adjacency(const Placement& first, const Placement& second, Direction direction) {
    const Side toward = direction == Direction::Horizontal ? Side::Right : Side::Bottom;
    return Relation::make({first.piece, visible_edge(first, toward)},
                          {second.piece, visible_edge(second, opposite(toward))});
}

std::uint64_t EdgeIndexer::seam_key(const Relation& r) const {
    const std::uint64_t k = key(r);
    if (labels_ < 8) {
        return k;
    }
    return std::min(k, key(r.other_side()));
}

Chromosome::Chromosome(int rows, int cols, std::vector<Placement> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
    if (rows < 0 || cols < 0 || cells_.size() != static_cast<std::size_t>(rows) * cols) {
        throw std::invalid_argument("chromosome cell count does not match its dimensions");
    }
}

bool Chromosome::is_valid(const PuzzleSpec& spec) const {
    const bool same = rows_ == spec.rows && cols_ == spec.cols;
    const bool transposed = rows_ == spec.cols && cols_ == spec.rows;
    if (!same && !(transposed && spec.type != PuzzleType::Type1)) {
        return false;
    }
    const auto n = static_cast<std::size_t>(spec.piece_count());
    if (cells_.size() != n) {
        return false;
    }
    std::vector<bool> seen(n, false);
    for (const auto& p : cells_) {
        if (p.piece < 0 || static_cast<std::size_t>(p.piece) >= n || seen[p.piece] || p.rotation > 3) {
            return false;
        }
        seen[p.piece] = true;
        if (spec.type == PuzzleType::Type1 && p.rotation != 0) {
            return false;
        }
        if (spec.type != PuzzleType::Type4 && p.face != Face::Front) {
            return false;
        }
    }
    return true;
}

std::vector<Relation> adjacency_relations(const Chromosome& chromosome) {
    std::vector<Relation> out;
    const int rows = chromosome.rows();
    const int cols = chromosome.cols();
    out.reserve(static_cast<std::size_t>(rows) * std::max(cols - 1, 0) +
                static_cast<std::size_t>(cols) * std::max(rows - 1, 0));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c + 1 < cols; ++c) {
            out.push_back(relation_of_adjacency(chromosome.at(r, c), chromosome.at(r, c + 1), Direction::Horizontal));
        }
    }
    for (int r = 0; r + 1 < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            out.push_back(relation_of_adjacency(chromosome.at(r, c), chromosome.at(r + 1, c), Direction::Vertical));
        }
    }
    return out;
}

std::vector<DihedralTransform> legal_transforms(PuzzleType type) {
    std::vector<DihedralTransform> out;
    if (type == PuzzleType::Type1) {
        out.push_back({});
        return out;
    }
    for (const bool flip : {false, true}) {
        if (flip && type != PuzzleType::Type4) {
            break;
        }
        for (std::uint8_t k = 0; k < 4; ++k) {
            out.push_back({k, flip});
        }
    }
    return out;
}

Chromosome apply_dihedral(const Chromosome& chromosome, DihedralTransform transform, PuzzleType type) {
    if (transform.flip && type != PuzzleType::Type4) {
        throw std::invalid_argument("global flip is only defined for two-sided puzzles");
    }
    Chromosome cur = chromosome;
    if (transform.flip) {
        Chromosome next(cur.rows(), cur.cols());
        for (int r = 0; r < cur.rows(); ++r) {
            for (int c = 0; c < cur.cols(); ++c) {
                Placement p = cur.at(r, c);
                p.face = p.face == Face::Front ? Face::Back : Face::Front;
                p.rotation = static_cast<std::uint8_t>((4 - p.rotation) % 4);
                next.at(r, cur.cols() - 1 - c) = p;
            }
        }
        cur = std::move(next);
    }
    for (int k = 0; k < transform.quarter_turns % 4; ++k) {
        Chromosome next(cur.cols(), cur.rows());
        for (int r = 0; r < cur.rows(); ++r) {
            for (int c = 0; c < cur.cols(); ++c) {
                Placement p = cur.at(r, c);
                p.rotation = static_cast<std::uint8_t>((p.rotation + 1) % 4);
                next.at(cur.cols() - 1 - c, r) = p;
            }
        }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace jigsaw
