#include "jigsaw/compatibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

#include "jigsaw/puzzle_factory.hpp"

namespace jigsaw {

namespace {

constexpr char kCacheMagic[8] = {'J', 'I', 'G', 'C', 'O', 'M', 'P', 'T'};
constexpr std::uint32_t kCacheVersion = 1;

/// Boundary pixels of one labeled edge in the piece's clockwise order.
std::vector<double> boundary(const Piece& piece, EdgeLabel edge) {
    const FaceSide fs = face_side_of(edge);
    if (fs.face == Face::Back && !piece.back) {
        throw std::invalid_argument("primed edge " + to_string(edge) + " on a one-sided piece");
    }
    const FaceImage& f = fs.face == Face::Front ? piece.front : *piece.back;
    const int w = f.width;
    std::vector<double> out(static_cast<std::size_t>(w) * 3);
    for (int k = 0; k < w; ++k) {
        int y = 0;
        int x = 0;
        switch (fs.side) {
            case Side::Top: y = 0; x = k; break;
            case Side::Right: y = k; x = w - 1; break;
            case Side::Bottom: y = w - 1; x = w - 1 - k; break;
            case Side::Left: y = w - 1 - k; x = 0; break;
        }
        for (int b = 0; b < 3; ++b) {
            out[static_cast<std::size_t>(k) * 3 + b] = f.at(y, x, b);
        }
    }
    return out;
}

double seam_distance(std::span<const double> a, std::span<const double> b, int w) {
    double sum = 0.0;
    for (int k = 0; k < w; ++k) {
        const double* pa = a.data() + static_cast<std::size_t>(k) * 3;
        const double* pb = b.data() + static_cast<std::size_t>(w - 1 - k) * 3;
        for (int band = 0; band < 3; ++band) {
            const double d = pa[band] - pb[band];
            sum += d * d;
        }
    }
    return std::sqrt(sum);
}

}  // namespace

bool legal_pair(PuzzleType type, EdgeLabel x, EdgeLabel y) {
    switch (type) {
        case PuzzleType::Type1:
            return !is_primed(x) && !is_primed(y) && (static_cast<int>(x) + 2) % 4 == static_cast<int>(y);
        case PuzzleType::Type4:
            return true;
        default:
            return !is_primed(x) && !is_primed(y);
    }
}

double dissimilarity(const Piece& piece_i, EdgeLabel edge_i, const Piece& piece_j, EdgeLabel edge_j) {
    const auto a = boundary(piece_i, edge_i);
    const auto b = boundary(piece_j, edge_j);
    if (a.size() != b.size()) {
        throw std::invalid_argument("pieces differ in tile size");
    }
    return seam_distance(a, b, static_cast<int>(a.size() / 3));
}

CompatibilityTable::CompatibilityTable(const PuzzleSpec& spec, int piece_count)
    : indexer_(piece_count, spec.edges_per_piece()),
      type_(spec.type),
      stride_(static_cast<std::size_t>(indexer_.edge_count())),
      scores_(stride_ * stride_, kInfinity),
      buddies_(stride_, -1) {}

CompatibilityTable CompatibilityTable::build(std::span<const Piece> pieces, const PuzzleSpec& spec, int workers) {
    if (pieces.size() < 2) {
        throw std::invalid_argument("compatibility needs at least two pieces");
    }
    CompatibilityTable table(spec, static_cast<int>(pieces.size()));
    const EdgeIndexer& ix = table.indexer_;
    const int labels = ix.labels();
    const int w = spec.tile_size;

    std::vector<std::vector<double>> edges(static_cast<std::size_t>(ix.edge_count()));
    for (int e = 0; e < ix.edge_count(); ++e) {
        const PieceEdge pe = ix.edge(e);
        edges[static_cast<std::size_t>(e)] = boundary(pieces[static_cast<std::size_t>(pe.piece)], pe.edge);
        if (edges[static_cast<std::size_t>(e)].size() != static_cast<std::size_t>(w) * 3) {
            throw std::invalid_argument("piece faces do not match the tile size");
        }
    }

    // Row e owns entries (e, f) for f > e; the mirror write (f, e) never
    // collides with another row's writes.
    const auto fill_rows = [&](int begin, int end) {
        for (int e = begin; e < end; ++e) {
            const PieceEdge pe = ix.edge(e);
            const int first_other = (pe.piece + 1) * labels;
            for (int f = first_other; f < ix.edge_count(); ++f) {
                const PieceEdge qe = ix.edge(f);
                if (!legal_pair(spec.type, pe.edge, qe.edge)) {
                    continue;
                }
                const double d = seam_distance(edges[static_cast<std::size_t>(e)], edges[static_cast<std::size_t>(f)], w);
                table.scores_[static_cast<std::size_t>(e) * table.stride_ + static_cast<std::size_t>(f)] = d;
                table.scores_[static_cast<std::size_t>(f) * table.stride_ + static_cast<std::size_t>(e)] = d;
            }
        }
    };

    const int count = ix.edge_count();
    workers = std::clamp(workers, 1, count);
    if (workers == 1) {
        fill_rows(0, count);
    } else {
        // Rows get shorter with e; interleave blocks so work stays balanced.
        std::vector<std::jthread> pool;
        constexpr int kBlock = 16;
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                for (int start = t * kBlock; start < count; start += workers * kBlock) {
                    fill_rows(start, std::min(start + kBlock, count));
                }
            });
        }
    }
    table.derive_best_buddies();
    return table;
}

void CompatibilityTable::derive_best_buddies() { buddies_ = best_buddy_edges(*this); }

std::vector<int> best_buddy_edges(const CompatibilityTable& table) {
    const int count = table.indexer().edge_count();
    std::vector<int> best(static_cast<std::size_t>(count), -1);
    for (int e = 0; e < count; ++e) {
        const auto row = table.row(e);
        double lowest = CompatibilityTable::kInfinity;
        for (int f = 0; f < count; ++f) {
            // Strict comparison keeps the smallest index among ties.
            if (row[static_cast<std::size_t>(f)] < lowest) {
                lowest = row[static_cast<std::size_t>(f)];
                best[static_cast<std::size_t>(e)] = f;
            }
        }
    }
    std::vector<int> buddies(static_cast<std::size_t>(count), -1);
    for (int e = 0; e < count; ++e) {
        const int f = best[static_cast<std::size_t>(e)];
        if (f >= 0 && best[static_cast<std::size_t>(f)] == e) {
            buddies[static_cast<std::size_t>(e)] = f;
        }
    }
    return buddies;
}

std::vector<Relation> CompatibilityTable::best_buddy_relations() const {
    std::vector<Relation> out;
    for (int e = 0; e < indexer_.edge_count(); ++e) {
        const int f = buddies_[static_cast<std::size_t>(e)];
        if (f > e) {
            out.push_back(Relation::make(indexer_.edge(e), indexer_.edge(f)));
        }
    }
    return out;
}

void CompatibilityTable::save(const std::filesystem::path& path, const std::string& bundle_checksum) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    const auto sum_len = static_cast<std::uint32_t>(bundle_checksum.size());
    const std::int32_t dims[3] = {indexer_.piece_count(), indexer_.labels(), static_cast<std::int32_t>(type_)};
    out.write(kCacheMagic, sizeof kCacheMagic);
    out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof kCacheVersion);
    out.write(reinterpret_cast<const char*>(&sum_len), sizeof sum_len);
    out.write(bundle_checksum.data(), sum_len);
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(scores_.data()),
              static_cast<std::streamsize>(scores_.size() * sizeof(double)));
    if (!out) {
        throw std::runtime_error("short write to " + path.string());
    }
}

CompatibilityTable CompatibilityTable::load(const std::filesystem::path& path, const std::string& bundle_checksum,
                                            const PuzzleSpec& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open table cache " + path.string());
    }
    char magic[sizeof kCacheMagic];
    std::uint32_t version = 0;
    std::uint32_t sum_len = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&sum_len), sizeof sum_len);
    if (!in || std::memcmp(magic, kCacheMagic, sizeof magic) != 0 || version != kCacheVersion || sum_len > 1024) {
        throw InputError("not a compatibility cache: " + path.string());
    }
    std::string sum(sum_len, '\0');
    std::int32_t dims[3] = {};
    in.read(sum.data(), sum_len);
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!in || sum != bundle_checksum) {
        throw InputError("table cache belongs to a different bundle");
    }
    if (dims[0] != spec.piece_count() || dims[1] != spec.edges_per_piece() || dims[2] != static_cast<int>(spec.type)) {
        throw InputError("table cache dimensions do not match the puzzle");
    }
    CompatibilityTable table(spec, dims[0]);
    in.read(reinterpret_cast<char*>(table.scores_.data()),
            static_cast<std::streamsize>(table.scores_.size() * sizeof(double)));
    if (!in || in.peek() != std::char_traits<char>::eof()) {
        throw InputError("truncated or oversized table cache " + path.string());
    }
    table.derive_best_buddies();
    return table;
}

}  // namespace jigsaw
