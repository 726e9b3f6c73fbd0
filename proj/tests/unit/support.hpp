#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "jigsaw/compatibility.hpp"
#include "jigsaw/puzzle_factory.hpp"
#include "jigsaw/puzzle_model.hpp"

namespace testsupport {

using namespace jigsaw;

inline FaceImage random_face(int w, std::mt19937_64& rng) {
    FaceImage f(w, w);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : f.data) {
        v = u(rng);
    }
    return f;
}

inline std::vector<Piece> random_pieces(int n, int w, bool two_sided, std::mt19937_64& rng) {
    std::vector<Piece> out;
    for (int i = 0; i < n; ++i) {
        Piece p;
        p.id.value = rng();
        p.front = random_face(w, rng);
        if (two_sided) {
            p.back = random_face(w, rng);
        }
        out.push_back(std::move(p));
    }
    return out;
}

inline RgbImage random_rgb(int width, int height, std::mt19937_64& rng) {
    RgbImage img(width, height);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& v : img.data) {
        v = static_cast<std::uint8_t>(byte(rng));
    }
    return img;
}

// Plain quarter turn, written out independently of the library: the pixel at
// (y, x) lands on (W-1-x, y).
template <typename T>
Image<T> turn_ccw(const Image<T>& src) {
    Image<T> out(src.height, src.width);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            for (int b = 0; b < 3; ++b) {
                out.at(src.width - 1 - x, y, b) = src.at(y, x, b);
            }
        }
    }
    return out;
}

// 3x3 tag grid with a label at the middle of each side. The face-up back
// carries a' on top, c' at the bottom, and b' on the left because turning a
// sheet over about its vertical axis swaps left and right.
using TagGrid = std::array<std::array<int, 3>, 3>;

inline TagGrid tag_grid(Face face) {
    TagGrid g{};
    for (auto& row : g) {
        row.fill(-1);
    }
    if (face == Face::Front) {
        g[0][1] = 0;  // a
        g[1][2] = 1;  // b
        g[2][1] = 2;  // c
        g[1][0] = 3;  // d
    } else {
        g[0][1] = 4;  // a'
        g[1][0] = 5;  // b'
        g[2][1] = 6;  // c'
        g[1][2] = 7;  // d'
    }
    return g;
}

inline TagGrid turn_ccw(const TagGrid& g) {
    TagGrid out{};
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 3; ++x) {
            out[2 - x][y] = g[y][x];
        }
    }
    return out;
}

inline int tag_at(const TagGrid& g, Side s) {
    switch (s) {
        case Side::Top: return g[0][1];
        case Side::Right: return g[1][2];
        case Side::Bottom: return g[2][1];
        default: return g[1][0];
    }
}

// Label physically showing on `side` for a placement, by turning the tag grid.
inline EdgeLabel oracle_visible(const Placement& p, Side side) {
    TagGrid g = tag_grid(p.face);
    for (int k = 0; k < p.rotation; ++k) {
        g = turn_ccw(g);
    }
    return static_cast<EdgeLabel>(tag_at(g, side));
}

// The face raster posed so that it shows `label` on `side`, found by search.
inline FaceImage posed_face(const Piece& piece, EdgeLabel label, Side side) {
    for (const Face face : {Face::Front, Face::Back}) {
        if (face == Face::Back && !piece.back) {
            continue;
        }
        FaceImage img = face == Face::Front ? piece.front : *piece.back;
        for (std::uint8_t k = 0; k < 4; ++k) {
            if (oracle_visible({0, k, face}, side) == label) {
                return img;
            }
            img = turn_ccw(img);
        }
    }
    throw std::logic_error("label not reachable");
}

// Boundary distance with `left` to the left of `right`, summed column against column.
inline double brute_force_dissimilarity(const Piece& a, EdgeLabel x, const Piece& b, EdgeLabel y) {
    const FaceImage left = posed_face(a, x, Side::Right);
    const FaceImage right = posed_face(b, y, Side::Left);
    const int w = left.width;
    double sum = 0.0;
    for (int k = 0; k < w; ++k) {
        for (int band = 0; band < 3; ++band) {
            const double d = left.at(k, w - 1, band) - right.at(k, 0, band);
            sum += d * d;
        }
    }
    return std::sqrt(sum);
}

inline PuzzleSpec make_spec(int rows, int cols, PuzzleType type, int tile = 4) {
    PuzzleSpec s;
    s.rows = rows;
    s.cols = cols;
    s.tile_size = tile;
    s.type = type;
    return s;
}

inline std::vector<std::uint64_t> seam_multiset(const Chromosome& c, const EdgeIndexer& ix) {
    std::vector<std::uint64_t> keys;
    for (const Relation& r : adjacency_relations(c)) {
        keys.push_back(ix.seam_key(r));
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

}  // namespace testsupport
