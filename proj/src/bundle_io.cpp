#include "jigsaw/bundle_io.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <memory>

#include <openssl/evp.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace jigsaw {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw std::runtime_error("sha256 init failed");
        }
    }
    void update(const void* data, std::size_t size) { EVP_DigestUpdate(ctx_.get(), data, size); }
    std::string hex() {
        unsigned char digest[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), digest, &len);
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        out.reserve(len * 2);
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(digits[digest[i] >> 4]);
            out.push_back(digits[digest[i] & 0xf]);
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::vector<unsigned char> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw BundleError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string face_file(PieceId id, Face face) {
    return id.hex() + (face == Face::Front ? ".front.png" : ".back.png");
}

RgbImage load_face(const fs::path& dir, const json& entry, const char* file_key, const char* sum_key, int tile) {
    const fs::path path = dir / entry.at(file_key).get<std::string>();
    if (!fs::exists(path)) {
        throw BundleError("missing piece image " + path.string());
    }
    const auto bytes = read_bytes(path);
    if (sha256_hex(bytes) != entry.at(sum_key).get<std::string>()) {
        throw BundleError("checksum mismatch for " + path.string());
    }
    RgbImage img = read_image(path);
    if (img.width != tile || img.height != tile) {
        throw BundleError("piece image " + path.string() + " is not " + std::to_string(tile) + " px square");
    }
    return img;
}

}  // namespace

RgbImage read_image(const fs::path& path) {
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) {
        throw InputError("cannot read image " + path.string());
    }
    RgbImage out(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            out.at(y, x, 0) = row[x][2];
            out.at(y, x, 1) = row[x][1];
            out.at(y, x, 2) = row[x][0];
        }
    }
    return out;
}

void write_image(const fs::path& path, const RgbImage& image) {
    cv::Mat bgr(image.height, image.width, CV_8UC3);
    for (int y = 0; y < image.height; ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width; ++x) {
            row[x] = cv::Vec3b(image.at(y, x, 2), image.at(y, x, 1), image.at(y, x, 0));
        }
    }
    if (!cv::imwrite(path.string(), bgr)) {
        throw std::runtime_error("cannot write image " + path.string());
    }
}

std::string sha256_hex(std::span<const unsigned char> bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_bytes(path)); }

std::string bundle_checksum(const PuzzleBundle& bundle) {
    Sha256 h;
    const int header[4] = {bundle.spec.rows, bundle.spec.cols, bundle.spec.tile_size,
                           static_cast<int>(bundle.spec.type)};
    h.update(header, sizeof header);
    for (const auto& p : bundle.pieces) {
        h.update(&p.id.value, sizeof p.id.value);
        h.update(p.front_rgb.data.data(), p.front_rgb.data.size());
        if (p.back_rgb) {
            h.update(p.back_rgb->data.data(), p.back_rgb->data.size());
        }
    }
    return h.hex();
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw BundleError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw BundleError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

json chromosome_to_json(const Chromosome& chromosome, std::span<const Piece> pieces) {
    json grid = json::array();
    for (int r = 0; r < chromosome.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < chromosome.cols(); ++c) {
            const Placement& p = chromosome.at(r, c);
            row.push_back({{"id", pieces[static_cast<std::size_t>(p.piece)].id.hex()},
                           {"rotation", 90 * p.rotation},
                           {"face", p.face == Face::Front ? "front" : "back"}});
        }
        grid.push_back(std::move(row));
    }
    return {{"rows", chromosome.rows()}, {"cols", chromosome.cols()}, {"grid", std::move(grid)}};
}

Chromosome chromosome_from_json(const json& doc, std::span<const Piece> pieces) {
    try {
        std::map<std::uint64_t, PieceIndex> index;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            index.emplace(pieces[i].id.value, static_cast<PieceIndex>(i));
        }
        const int rows = doc.at("rows").get<int>();
        const int cols = doc.at("cols").get<int>();
        const json& grid = doc.at("grid");
        if (rows < 0 || cols < 0 || grid.size() != static_cast<std::size_t>(rows)) {
            throw BundleError("grid shape does not match rows/cols");
        }
        Chromosome out(rows, cols);
        for (int r = 0; r < rows; ++r) {
            const json& row = grid.at(static_cast<std::size_t>(r));
            if (row.size() != static_cast<std::size_t>(cols)) {
                throw BundleError("grid shape does not match rows/cols");
            }
            for (int c = 0; c < cols; ++c) {
                const json& cell = row.at(static_cast<std::size_t>(c));
                const auto it = index.find(PieceId::from_hex(cell.at("id").get<std::string>()).value);
                if (it == index.end()) {
                    throw BundleError("grid references unknown piece " + cell.at("id").get<std::string>());
                }
                const int degrees = cell.at("rotation").get<int>();
                if (degrees % 90 != 0 || degrees < 0 || degrees >= 360) {
                    throw BundleError("rotation must be 0, 90, 180 or 270");
                }
                const std::string face = cell.at("face").get<std::string>();
                if (face != "front" && face != "back") {
                    throw BundleError("face must be 'front' or 'back'");
                }
                out.at(r, c) = Placement{it->second, static_cast<std::uint8_t>(degrees / 90),
                                         face == "front" ? Face::Front : Face::Back};
            }
        }
        return out;
    } catch (const json::exception& e) {
        throw BundleError(std::string("malformed chromosome: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw BundleError(std::string("malformed chromosome: ") + e.what());
    }
}

void save_bundle(const PuzzleBundle& bundle, const fs::path& dir) {
    fs::create_directories(dir);
    json pieces = json::array();
    for (const auto& p : bundle.pieces) {
        json entry = {{"id", p.id.hex()}};
        const auto front = face_file(p.id, Face::Front);
        write_image(dir / front, p.front_rgb);
        entry["front"] = front;
        entry["front_sha256"] = sha256_file(dir / front);
        if (p.back_rgb) {
            const auto back = face_file(p.id, Face::Back);
            write_image(dir / back, *p.back_rgb);
            entry["back"] = back;
            entry["back_sha256"] = sha256_file(dir / back);
        }
        pieces.push_back(std::move(entry));
    }
    const json manifest = {
        {"format", "jigsaw-bundle"},
        {"format_version", kBundleFormatVersion},
        {"spec",
         {{"rows", bundle.spec.rows},
          {"cols", bundle.spec.cols},
          {"tile_size", bundle.spec.tile_size},
          {"puzzle_type", static_cast<int>(bundle.spec.type)}}},
        {"piece_count", bundle.pieces.size()},
        {"pieces", std::move(pieces)},
    };
    write_json(dir / kManifestFile, manifest);
    const fs::path truth = dir / kTruthFile;
    if (bundle.ground_truth) {
        write_json(truth, chromosome_to_json(*bundle.ground_truth, bundle.pieces));
    } else if (fs::exists(truth)) {
        fs::remove(truth);
    }
}

PuzzleBundle load_bundle(const fs::path& dir) {
    const fs::path manifest_path = dir / kManifestFile;
    if (!fs::exists(manifest_path)) {
        throw BundleError("no manifest.json in " + dir.string());
    }
    const json manifest = read_json(manifest_path);
    PuzzleBundle bundle;
    try {
        if (manifest.at("format").get<std::string>() != "jigsaw-bundle") {
            throw BundleError("not a puzzle bundle manifest");
        }
        if (manifest.at("format_version").get<int>() != kBundleFormatVersion) {
            throw BundleError("unsupported bundle format version");
        }
        const json& spec = manifest.at("spec");
        bundle.spec.rows = spec.at("rows").get<int>();
        bundle.spec.cols = spec.at("cols").get<int>();
        bundle.spec.tile_size = spec.at("tile_size").get<int>();
        bundle.spec.type = puzzle_type_from_int(spec.at("puzzle_type").get<int>());
        bundle.spec.validate();

        const json& pieces = manifest.at("pieces");
        const auto declared = manifest.at("piece_count").get<std::size_t>();
        const auto expected = static_cast<std::size_t>(bundle.spec.piece_count());
        if (declared != expected || pieces.size() != expected) {
            throw BundleError("manifest declares " + std::to_string(declared) + " pieces, lists " +
                              std::to_string(pieces.size()) + ", spec needs " + std::to_string(expected));
        }
        const bool two_sided = bundle.spec.type == PuzzleType::Type4;
        bundle.pieces.reserve(expected);
        for (const json& entry : pieces) {
            Piece p;
            p.id = PieceId::from_hex(entry.at("id").get<std::string>());
            p.front_rgb = load_face(dir, entry, "front", "front_sha256", bundle.spec.tile_size);
            p.front = to_normalized_lab(p.front_rgb);
            if (two_sided != entry.contains("back")) {
                throw BundleError("back faces must be present exactly for two-sided puzzles");
            }
            if (two_sided) {
                p.back_rgb = load_face(dir, entry, "back", "back_sha256", bundle.spec.tile_size);
                p.back = to_normalized_lab(*p.back_rgb);
            }
            bundle.pieces.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        throw BundleError(std::string("corrupt manifest: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw BundleError(std::string("corrupt manifest: ") + e.what());
    }

    const fs::path truth_path = dir / kTruthFile;
    if (fs::exists(truth_path)) {
        Chromosome truth = chromosome_from_json(read_json(truth_path), bundle.pieces);
        if (!truth.is_valid(bundle.spec)) {
            throw BundleError("ground truth is not a valid assembly of the bundle's pieces");
        }
        bundle.ground_truth = std::move(truth);
    }
    return bundle;
}

}  // namespace jigsaw
