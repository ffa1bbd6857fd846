#include "oammag/pgm_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "oammag/errors.hpp"

namespace oammag {

namespace {

// Reads one whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(char(c));
        c = in.get();
    }
    return tok;
}

int parse_dim(const std::string& tok, const char* what) {
    if (tok.empty()) throw io_error(std::string("pgm: missing ") + what);
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(tok, &used);
    } catch (const std::exception&) {
        throw io_error(std::string("pgm: bad ") + what + " '" + tok + "'");
    }
    if (used != tok.size() || v <= 0 || v > std::numeric_limits<int>::max())
        throw io_error(std::string("pgm: bad ") + what + " '" + tok + "'");
    return int(v);
}

} // namespace

void write_image(const PatternImage& image, const std::string& path) {
    if (image.bit_depth != 8 && image.bit_depth != 16)
        throw std::invalid_argument("write_image: bit_depth must be 8 or 16");
    if (image.geometry.width < 1 || image.geometry.height < 1)
        throw std::invalid_argument("write_image: empty image");
    const std::size_t n = std::size_t(image.geometry.width) * image.geometry.height;
    if (image.pixels.size() != n)
        throw std::invalid_argument("write_image: pixel count does not match geometry");
    const int maxval = image.bit_depth == 8 ? 255 : 65535;
    const double peak = image.max_pixel();
    const double scale = peak > 0.0 ? maxval / peak : 0.0;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("pgm: cannot open '" + path + "' for writing");
    out << "P5\n"
        << image.geometry.width << " " << image.geometry.height << "\n"
        << maxval << "\n";
    std::vector<unsigned char> buf;
    buf.reserve(n * (image.bit_depth == 8 ? 1 : 2));
    for (std::size_t i = 0; i < n; ++i) {
        double v = image.pixels[i] * scale;
        if (v < 0.0) v = 0.0;
        if (v > maxval) v = maxval;
        const unsigned q = unsigned(std::floor(v + 0.5));
        if (image.bit_depth == 8) {
            buf.push_back(static_cast<unsigned char>(q));
        } else {
            buf.push_back(static_cast<unsigned char>(q >> 8));
            buf.push_back(static_cast<unsigned char>(q & 0xFF));
        }
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              std::streamsize(buf.size()));
    if (!out) throw io_error("pgm: write to '" + path + "' failed");
}

PatternImage read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("pgm: cannot open '" + path + "'");
    const std::string magic = next_token(in);
    if (magic != "P5") throw io_error("pgm: bad magic '" + magic + "'");
    const int width = parse_dim(next_token(in), "width");
    const int height = parse_dim(next_token(in), "height");
    const int maxval = parse_dim(next_token(in), "maxval");
    if (maxval != 255 && maxval != 65535)
        throw io_error("pgm: unsupported maxval " + std::to_string(maxval));
    // next_token consumed the single whitespace byte after maxval.

    PatternImage img;
    img.geometry.width = width;
    img.geometry.height = height;
    img.geometry.center_x = (width - 1) / 2.0;
    img.geometry.center_y = (height - 1) / 2.0;
    img.geometry.pixels_per_waist = std::min(width, height) / 8.0;
    img.bit_depth = maxval == 255 ? 8 : 16;
    const std::size_t n = std::size_t(width) * height;
    img.pixels.resize(n);
    const std::size_t bytes = n * (maxval == 255 ? 1 : 2);
    std::vector<unsigned char> buf(bytes);
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(bytes));
    if (std::size_t(in.gcount()) != bytes)
        throw io_error("pgm: truncated payload in '" + path + "'");
    const double inv = 1.0 / maxval;
    if (maxval == 255) {
        for (std::size_t i = 0; i < n; ++i) img.pixels[i] = buf[i] * inv;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned q = (unsigned(buf[2 * i]) << 8) | buf[2 * i + 1];
            img.pixels[i] = q * inv;
        }
    }
    return img;
}

} // namespace oammag
