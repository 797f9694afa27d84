#ifndef FREQBAND_TENSOR_IO_HPP
#define FREQBAND_TENSOR_IO_HPP

#include <string>

#include "freqband/freqmoe.hpp"

namespace freqband {

// Flat binary token-sequence format: 8-byte magic "FBTENSOR", uint32
// element size (8), uint32 rank (3), uint64 dims[3], then row-major
// doubles. All fields little-endian.
void save_tensor(const std::string& path, const moe::TokenSequence& t);
moe::TokenSequence load_tensor(const std::string& path);

}  // namespace freqband

#endif
