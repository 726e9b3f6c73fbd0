#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jigsaw/image.hpp"
#include "jigsaw/puzzle_model.hpp"

namespace jigsaw {

/// Raised for user-supplied data that cannot be used (bad images, bundles,
/// specs). The CLI maps it to the input-error exit code.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PuzzleBundle {
    PuzzleSpec spec;
    std::vector<Piece> pieces;
    std::optional<Chromosome> ground_truth;

    friend bool operator==(const PuzzleBundle&, const PuzzleBundle&) = default;
};

using LabTriple = std::array<double, 3>;

/// sRGB (D65, 2 degree observer) to CIE L*a*b*, unnormalized.
[[nodiscard]] LabTriple srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);
/// L* / 100 and (a*, b* + 128) / 255 with a*, b* clamped to [-128, 127].
[[nodiscard]] LabTriple srgb_to_normalized_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);
[[nodiscard]] FaceImage to_normalized_lab(const RgbImage& rgb);

/// Builds a bundle from square tiles listed in row-major ground-truth order.
/// `backs` is empty for one-sided puzzles; otherwise backs[i] is the back face
/// of piece i as seen with that face up. Piece ids are drawn from `id_seed`.
[[nodiscard]] PuzzleBundle assemble_bundle(const PuzzleSpec& spec, std::vector<RgbImage> fronts,
                                           std::vector<RgbImage> backs, std::uint64_t id_seed);

/// Cuts `image` into rows x cols tiles (excess cropped from right and bottom).
/// Throws InputError when the image is too small.
[[nodiscard]] PuzzleBundle shred(const RgbImage& image, const PuzzleSpec& spec, std::uint64_t id_seed = 0);

/// Two-sided puzzle: the piece cut at (r, c) of `front` carries, on its other
/// face, tile (r, cols-1-c) of `back` (the sheet is turned over about its
/// vertical axis).
[[nodiscard]] PuzzleBundle shred_two_sided(const RgbImage& front, const RgbImage& back, const PuzzleSpec& spec,
                                           std::uint64_t id_seed = 0);

/// How one output piece was derived from the input bundle.
struct ScrambleStep {
    PieceIndex source = 0;      // index in the input bundle
    std::uint8_t quarter_turns = 0;  // counterclockwise, as seen on the front face
    bool faces_swapped = false;      // applied before the turn
};

struct Scrambled {
    PuzzleBundle bundle;
    std::vector<ScrambleStep> steps;  // one per output piece
};

/// Permutes pieces, pre-rotates stored rasters (Type 2/4) and swaps faces
/// (Type 4) uniformly at random. The ground truth, when present, is rewritten
/// to keep denoting the correct assembly.
[[nodiscard]] Scrambled scramble(const PuzzleBundle& bundle, std::uint64_t seed);

/// Renders the visible faces of `chromosome` from the cached sRGB tiles.
[[nodiscard]] RgbImage render(const PuzzleBundle& bundle, const Chromosome& chromosome);

/// Renders the opposite side of a two-sided assembly.
[[nodiscard]] RgbImage render_other_side(const PuzzleBundle& bundle, const Chromosome& chromosome);

}  // namespace jigsaw
