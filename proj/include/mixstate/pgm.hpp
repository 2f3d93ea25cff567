#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mixstate {

struct GrayImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    int maxval = 255;
    std::vector<int> pixels;  // row-major, 0..maxval

    int at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
};

// Netpbm graymaps: plain (P2) or raw (P5), 8- or 16-bit (big-endian),
// with '#' comments in the header. Throws FormatError.
GrayImage parse_pgm(std::string_view bytes);
std::string write_pgm(const GrayImage& image, bool binary = true);

}  // namespace mixstate
