#ifndef FREQBAND_PNG_IO_HPP
#define FREQBAND_PNG_IO_HPP

#include <string>

#include "freqband/image.hpp"

namespace freqband {

// Decodes 8-bit and 16-bit PNG to [0,1] reals (value/255 or value/65535).
// Palette images expand to RGB; an alpha channel is dropped.
// Throws std::runtime_error on unreadable or undecodable files.
ImageBuffer read_png(const std::string& path);

// Writes gray or RGB PNG; 16-bit by default to keep quantization below the
// cue extractors' noise floor.
void write_png(const std::string& path, const ImageBuffer& img, int bit_depth = 16);

}  // namespace freqband

#endif
