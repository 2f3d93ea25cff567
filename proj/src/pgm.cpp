#include "mixstate/pgm.hpp"

#include "mixstate/errors.hpp"
#include "mixstate/text.hpp"

#include <cctype>

namespace mixstate {

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::string_view s) : s_(s) {}

    std::string_view token() {
        skip();
        const std::size_t b = pos_;
        while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '#') ++pos_;
        if (b == pos_) throw FormatError("truncated PGM header");
        return s_.substr(b, pos_ - b);
    }

    long long number(const char* what) {
        const auto v = parse_int(token());
        if (!v) throw FormatError(std::string("bad PGM ") + what);
        return *v;
    }

    std::size_t pos() const { return pos_; }

private:
    void skip() {
        while (pos_ < s_.size()) {
            if (s_[pos_] == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm(std::string_view bytes) {
    HeaderReader in(bytes);
    const auto magic = in.token();
    if (magic != "P2" && magic != "P5") throw FormatError("unsupported image format (need P2 or P5 graymap)");
    const auto cols = in.number("width");
    const auto rows = in.number("height");
    const auto maxval = in.number("maxval");
    if (cols <= 0 || rows <= 0) throw FormatError("PGM dimensions must be positive");
    if (maxval <= 0 || maxval > 65535) throw FormatError("PGM maxval must lie in 1..65535");

    GrayImage img;
    img.rows = static_cast<std::size_t>(rows);
    img.cols = static_cast<std::size_t>(cols);
    img.maxval = static_cast<int>(maxval);
    const std::size_t n = img.rows * img.cols;
    img.pixels.reserve(n);

    if (magic == "P2") {
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = in.number("pixel");
            if (v < 0 || v > maxval) throw FormatError("PGM pixel outside 0..maxval");
            img.pixels.push_back(static_cast<int>(v));
        }
        return img;
    }
    // Exactly one whitespace byte separates the header from raw data.
    const std::size_t start = in.pos() + 1;
    const std::size_t width = maxval > 255 ? 2 : 1;
    if (bytes.size() < start + n * width) throw FormatError("truncated PGM raster");
    for (std::size_t i = 0; i < n; ++i) {
        const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + start + i * width);
        const int v = width == 2 ? (p[0] << 8) | p[1] : p[0];
        if (v > maxval) throw FormatError("PGM pixel outside 0..maxval");
        img.pixels.push_back(v);
    }
    return img;
}

std::string write_pgm(const GrayImage& img, bool binary) {
    if (img.pixels.size() != img.rows * img.cols) throw DomainError("image pixel count does not match its size");
    std::string out = std::string(binary ? "P5" : "P2") + "\n" + std::to_string(img.cols) + " " +
                      std::to_string(img.rows) + "\n" + std::to_string(img.maxval) + "\n";
    if (!binary) {
        for (std::size_t r = 0; r < img.rows; ++r) {
            for (std::size_t c = 0; c < img.cols; ++c) {
                if (c) out += ' ';
                out += std::to_string(img.at(r, c));
            }
            out += '\n';
        }
        return out;
    }
    for (int v : img.pixels) {
        if (img.maxval > 255) out += static_cast<char>((v >> 8) & 0xff);
        out += static_cast<char>(v & 0xff);
    }
    return out;
}

}  // namespace mixstate
