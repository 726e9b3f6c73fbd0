#include "jigsaw/puzzle_factory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

namespace jigsaw {

namespace {

constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.0;
constexpr double kWhiteZ = 1.08883;

const std::array<double, 256>& linear_lut() {
    static const std::array<double, 256> lut = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) {
            const double c = i / 255.0;
            t[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
        }
        return t;
    }();
    return lut;
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

Piece make_piece(PieceId id, RgbImage front, std::optional<RgbImage> back) {
    Piece p;
    p.id = id;
    p.front = to_normalized_lab(front);
    p.front_rgb = std::move(front);
    if (back) {
        p.back = to_normalized_lab(*back);
        p.back_rgb = std::move(back);
    }
    return p;
}

std::vector<RgbImage> cut_tiles(const RgbImage& image, const PuzzleSpec& spec) {
    const int w = spec.tile_size;
    if (image.width < spec.cols * w || image.height < spec.rows * w) {
        throw InputError("image " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                         " is too small for " + std::to_string(spec.rows) + "x" + std::to_string(spec.cols) +
                         " tiles of " + std::to_string(w) + " px");
    }
    std::vector<RgbImage> tiles;
    tiles.reserve(static_cast<std::size_t>(spec.piece_count()));
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            tiles.push_back(cropped(image, c * w, r * w, w, w));
        }
    }
    return tiles;
}

void validate_spec(const PuzzleSpec& spec) {
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

}  // namespace

LabTriple srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const auto& lut = linear_lut();
    const double rl = lut[r];
    const double gl = lut[g];
    const double bl = lut[b];
    const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabTriple srgb_to_normalized_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const auto lab = srgb_to_lab(r, g, b);
    return {std::clamp(lab[0] / 100.0, 0.0, 1.0), (std::clamp(lab[1], -128.0, 127.0) + 128.0) / 255.0,
            (std::clamp(lab[2], -128.0, 127.0) + 128.0) / 255.0};
}

FaceImage to_normalized_lab(const RgbImage& rgb) {
    FaceImage out(rgb.width, rgb.height);
    for (std::size_t i = 0; i < rgb.data.size(); i += 3) {
        const auto lab = srgb_to_normalized_lab(rgb.data[i], rgb.data[i + 1], rgb.data[i + 2]);
        out.data[i] = lab[0];
        out.data[i + 1] = lab[1];
        out.data[i + 2] = lab[2];
    }
    return out;
}

PuzzleBundle assemble_bundle(const PuzzleSpec& spec, std::vector<RgbImage> fronts, std::vector<RgbImage> backs,
                             std::uint64_t id_seed) {
    validate_spec(spec);
    const auto n = static_cast<std::size_t>(spec.piece_count());
    const bool two_sided = spec.type == PuzzleType::Type4;
    if (fronts.size() != n || (two_sided ? backs.size() != n : !backs.empty())) {
        throw InputError("tile count does not match the puzzle spec");
    }
    const auto square = [&](const RgbImage& t) { return t.width == spec.tile_size && t.height == spec.tile_size; };
    if (!std::all_of(fronts.begin(), fronts.end(), square) || !std::all_of(backs.begin(), backs.end(), square)) {
        throw InputError("every tile must be tile_size x tile_size");
    }

    std::mt19937_64 rng(id_seed);
    std::unordered_set<std::uint64_t> used;
    PuzzleBundle bundle;
    bundle.spec = spec;
    bundle.pieces.reserve(n);
    std::vector<Placement> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t id = rng();
        while (!used.insert(id).second) {
            id = rng();
        }
        std::optional<RgbImage> back;
        if (two_sided) {
            back = std::move(backs[i]);
        }
        bundle.pieces.push_back(make_piece(PieceId{id}, std::move(fronts[i]), std::move(back)));
        truth[i] = Placement{static_cast<PieceIndex>(i), 0, Face::Front};
    }
    bundle.ground_truth = Chromosome(spec.rows, spec.cols, std::move(truth));
    return bundle;
}

PuzzleBundle shred(const RgbImage& image, const PuzzleSpec& spec, std::uint64_t id_seed) {
    validate_spec(spec);
    if (spec.type == PuzzleType::Type4) {
        throw InputError("two-sided puzzles need two images");
    }
    return assemble_bundle(spec, cut_tiles(image, spec), {}, id_seed);
}

PuzzleBundle shred_two_sided(const RgbImage& front, const RgbImage& back, const PuzzleSpec& spec,
                             std::uint64_t id_seed) {
    validate_spec(spec);
    if (spec.type != PuzzleType::Type4) {
        throw InputError("two images given for a one-sided puzzle type");
    }
    const int need_w = spec.cols * spec.tile_size;
    const int need_h = spec.rows * spec.tile_size;
    const bool front_fits = front.width >= need_w && front.height >= need_h;
    if (front_fits && (back.width != front.width || back.height != front.height)) {
        throw InputError("front and back images differ in size");
    }
    auto fronts = cut_tiles(front, spec);
    auto back_grid = cut_tiles(back, spec);
    std::vector<RgbImage> backs;
    backs.reserve(back_grid.size());
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            backs.push_back(back_grid[static_cast<std::size_t>(r) * spec.cols + (spec.cols - 1 - c)]);
        }
    }
    return assemble_bundle(spec, std::move(fronts), std::move(backs), id_seed);
}

Scrambled scramble(const PuzzleBundle& bundle, std::uint64_t seed) {
    const auto n = bundle.pieces.size();
    std::mt19937_64 rng(seed);
    std::vector<PieceIndex> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    const bool rotates = bundle.spec.type == PuzzleType::Type2 || bundle.spec.type == PuzzleType::Type4;
    const bool flips = bundle.spec.type == PuzzleType::Type4;
    std::uniform_int_distribution<int> turn(0, 3);
    std::bernoulli_distribution coin(0.5);

    Scrambled out;
    out.bundle.spec = bundle.spec;
    out.bundle.pieces.reserve(n);
    out.steps.reserve(n);
    std::vector<PieceIndex> new_index(n);
    for (std::size_t j = 0; j < n; ++j) {
        ScrambleStep step;
        step.source = order[j];
        step.quarter_turns = rotates ? static_cast<std::uint8_t>(turn(rng)) : 0;
        step.faces_swapped = flips && coin(rng);

        Piece p = bundle.pieces[static_cast<std::size_t>(step.source)];
        if (step.faces_swapped) {
            std::swap(p.front, *p.back);
            std::swap(p.front_rgb, *p.back_rgb);
        }
        // A physical quarter turn seen from the front is the opposite turn seen
        // from the back.
        p.front = rotated_ccw(p.front, step.quarter_turns);
        p.front_rgb = rotated_ccw(p.front_rgb, step.quarter_turns);
        if (p.back) {
            p.back = rotated_ccw(*p.back, -step.quarter_turns);
            p.back_rgb = rotated_ccw(*p.back_rgb, -step.quarter_turns);
        }
        new_index[static_cast<std::size_t>(step.source)] = static_cast<PieceIndex>(j);
        out.bundle.pieces.push_back(std::move(p));
        out.steps.push_back(step);
    }

    if (bundle.ground_truth) {
        Chromosome truth = *bundle.ground_truth;
        for (auto& cell : truth.cells()) {
            const auto& step = out.steps[static_cast<std::size_t>(new_index[static_cast<std::size_t>(cell.piece)])];
            cell.piece = new_index[static_cast<std::size_t>(cell.piece)];
            if (step.faces_swapped) {
                cell.face = cell.face == Face::Front ? Face::Back : Face::Front;
            }
            const int delta = cell.face == Face::Front ? -step.quarter_turns : step.quarter_turns;
            cell.rotation = static_cast<std::uint8_t>(((cell.rotation + delta) % 4 + 4) % 4);
        }
        out.bundle.ground_truth = std::move(truth);
    }
    return out;
}

RgbImage render(const PuzzleBundle& bundle, const Chromosome& chromosome) {
    const int w = bundle.spec.tile_size;
    RgbImage out(chromosome.cols() * w, chromosome.rows() * w);
    for (int r = 0; r < chromosome.rows(); ++r) {
        for (int c = 0; c < chromosome.cols(); ++c) {
            const Placement& p = chromosome.at(r, c);
            const Piece& piece = bundle.pieces.at(static_cast<std::size_t>(p.piece));
            const RgbImage& face = p.face == Face::Front ? piece.front_rgb : piece.back_rgb.value();
            paste(out, rotated_ccw(face, p.rotation), c * w, r * w);
        }
    }
    return out;
}

RgbImage render_other_side(const PuzzleBundle& bundle, const Chromosome& chromosome) {
    return render(bundle, apply_dihedral(chromosome, {0, true}, bundle.spec.type));
}

}  // namespace jigsaw
