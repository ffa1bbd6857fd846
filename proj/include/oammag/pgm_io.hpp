#pragma once

#include <string>

#include "oammag/pattern_image.hpp"

namespace oammag {

// Binary portable graymap, magic "P5", big-endian 16-bit samples when
// maxval = 65535. Intensities are scaled linearly from [0, max_pixel] to
// [0, maxval] with round-half-up.
void write_image(const PatternImage& image, const std::string& path);

// Inverse of write_image; intensities come back in [0, 1]. Only maxval 255
// and 65535 are accepted. Throws io_error on malformed input.
PatternImage read_image(const std::string& path);

} // namespace oammag
