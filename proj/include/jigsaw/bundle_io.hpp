#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "jigsaw/puzzle_factory.hpp"

namespace jigsaw {

/// Bundle directory layout:
///   manifest.json   format name/version, spec, piece ids, per-file SHA-256
///   <id>.front.png  one lossless raster per piece face (sRGB, 8 bit)
///   <id>.back.png   (two-sided puzzles only)
///   truth.json      optional ground truth, kept apart so solvers run blind
inline constexpr int kBundleFormatVersion = 1;
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kTruthFile = "truth.json";

class BundleError : public InputError {
public:
    using InputError::InputError;
};

[[nodiscard]] RgbImage read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const RgbImage& image);

[[nodiscard]] std::string sha256_hex(std::span<const unsigned char> bytes);
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

/// Content hash over spec, ids and face pixels; keys compatibility caches.
[[nodiscard]] std::string bundle_checksum(const PuzzleBundle& bundle);

/// Writes the bundle; the ground truth goes to truth.json when present.
void save_bundle(const PuzzleBundle& bundle, const std::filesystem::path& dir);

/// Throws BundleError on a missing or corrupt manifest, piece-count mismatch,
/// missing face files or checksum failure. A missing truth.json yields an
/// empty ground truth.
[[nodiscard]] PuzzleBundle load_bundle(const std::filesystem::path& dir);

/// Grid of {id, rotation (degrees), face} as used by truth.json and
/// solution.json.
[[nodiscard]] nlohmann::json chromosome_to_json(const Chromosome& chromosome, std::span<const Piece> pieces);
[[nodiscard]] Chromosome chromosome_from_json(const nlohmann::json& doc, std::span<const Piece> pieces);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
[[nodiscard]] nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace jigsaw
