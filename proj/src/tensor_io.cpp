#include "freqband/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace freqband {

namespace {

constexpr char kMagic[8] = {'F', 'B', 'T', 'E', 'N', 'S', 'O', 'R'};

static_assert(std::endian::native == std::endian::little,
              "tensor io assumes a little-endian host");

}  // namespace

void save_tensor(const std::string& path, const moe::TokenSequence& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open tensor file for writing: " + path);

    out.write(kMagic, sizeof(kMagic));
    const std::uint32_t elem_size = sizeof(double);
    const std::uint32_t rank = 3;
    out.write(reinterpret_cast<const char*>(&elem_size), sizeof(elem_size));
    out.write(reinterpret_cast<const char*>(&rank), sizeof(rank));
    const std::uint64_t dims[3] = {static_cast<std::uint64_t>(t.batch),
                                   static_cast<std::uint64_t>(t.length),
                                   static_cast<std::uint64_t>(t.dim)};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(t.values.data()),
              static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("failed to write tensor file: " + path);
}

moe::TokenSequence load_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tensor file: " + path);

    char magic[8];
    std::uint32_t elem_size = 0, rank = 0;
    std::uint64_t dims[3] = {0, 0, 0};
    in.read(magic, sizeof(magic));
    in.read(reinterpret_cast<char*>(&elem_size), sizeof(elem_size));
    in.read(reinterpret_cast<char*>(&rank), sizeof(rank));
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("not a tensor file: " + path);
    }
    if (elem_size != sizeof(double) || rank != 3) {
        throw std::runtime_error("unsupported tensor header in: " + path);
    }

    moe::TokenSequence t(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                         static_cast<int>(dims[2]));
    in.read(reinterpret_cast<char*>(t.values.data()),
            static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated tensor file: " + path);
    return t;
}

}  // namespace freqband
