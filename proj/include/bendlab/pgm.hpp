#pragma once

// 8-bit PGM (P2 ASCII / P5 binary) input and PGM/CSV raster output.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "signals.hpp"

namespace bendlab {

namespace detail {

class PgmTokenizer {
public:
    explicit PgmTokenizer(const std::string& data) : d_(data) {}

    // Next whitespace-delimited header token, skipping '#' comments.
    std::string next() {
        for (;;) {
            while (pos_ < d_.size() && std::isspace(static_cast<unsigned char>(d_[pos_]))) ++pos_;
            if (pos_ < d_.size() && d_[pos_] == '#') {
                while (pos_ < d_.size() && d_[pos_] != '\n') ++pos_;
                continue;
            }
            break;
        }
        const std::size_t start = pos_;
        while (pos_ < d_.size() && !std::isspace(static_cast<unsigned char>(d_[pos_]))) ++pos_;
        return d_.substr(start, pos_ - start);
    }

    long next_int(const char* what) {
        const std::string tok = next();
        if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw MalformedHeaderError(std::string("PGM: invalid ") + what + " '" + tok + "'");
        try {
            return std::stol(tok);
        } catch (const std::exception&) {
            throw MalformedHeaderError(std::string("PGM: invalid ") + what + " '" + tok + "'");
        }
    }

    std::size_t pos() const { return pos_; }
    void skip_one_whitespace() {
        if (pos_ < d_.size() && std::isspace(static_cast<unsigned char>(d_[pos_]))) ++pos_;
    }

private:
    const std::string& d_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Reads an 8-bit P2 or P5 PGM; pixel values are divided by maxval.
inline RasterSignal load_raster(const std::filesystem::path& path, Box domain = {{-1.0, -1.0}, {1.0, 1.0}}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError("cannot open image '" + path.string() + "'");
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    detail::PgmTokenizer tok(data);
    const std::string magic = tok.next();
    if (magic.size() != 2 || magic[0] != 'P') throw MalformedHeaderError("not a PGM file (magic '" + magic + "')");
    if (magic != "P2" && magic != "P5") throw UnsupportedFormatError("unsupported netpbm variant " + magic);
    const long w = tok.next_int("width");
    const long h = tok.next_int("height");
    const long maxval = tok.next_int("maxval");
    if (w < 1 || h < 1) throw MalformedHeaderError("PGM: non-positive dimensions");
    if (maxval < 1 || maxval > 65535) throw MalformedHeaderError("PGM: maxval out of range");
    if (maxval > 255) throw UnsupportedFormatError("only 8-bit PGM images are supported");
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    std::vector<double> px(n);
    if (magic == "P5") {
        tok.skip_one_whitespace();
        const std::size_t start = tok.pos();
        if (data.size() < start + n) throw MalformedHeaderError("PGM: truncated pixel data");
        for (std::size_t i = 0; i < n; ++i)
            px[i] = static_cast<unsigned char>(data[start + i]) / static_cast<double>(maxval);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const long v = tok.next_int("pixel value");
            if (v > maxval) throw MalformedHeaderError("PGM: pixel value exceeds maxval");
            px[i] = v / static_cast<double>(maxval);
        }
    }
    return RasterSignal(static_cast<int>(w), static_cast<int>(h), std::move(px), domain);
}

/// Writes a binary P5 PGM; values are clamped to [0,1] and rounded to 8 bits.
inline void save_pgm(const RasterSignal& r, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "P5\n" << r.width() << ' ' << r.height() << "\n255\n";
    std::string bytes(r.pixels().size(), '\0');
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(r.pixels()[i], 0.0, 1.0) * 255.0)));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

/// Writes pixel values as CSV, one image row per line, top row first.
inline void save_raster_csv(const RasterSignal& r, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    for (int row = 0; row < r.height(); ++row) {
        for (int col = 0; col < r.width(); ++col) {
            if (col) out << ',';
            out << r.at(col, row);
        }
        out << '\n';
    }
}

}  // namespace bendlab
