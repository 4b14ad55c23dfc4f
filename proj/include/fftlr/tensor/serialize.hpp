#pragma once

// Binary tensor container used for caching:
//   magic "FFTLRT01", u32 format tag, u32 order, u64 shape[order],
//   u32 rank count, u64 ranks[...], then the payload as (re, im) pairs of
//   little-endian IEEE doubles. Payload order per format:
//     full    entries, row-major
//     cp      weights (re only), then factor matrices column-major
//     tucker  orthonormal flags (u8 each), core entries, factors column-major
//     tt      carriage storage, column-major, one carriage after another

#include <filesystem>
#include <iosfwd>

#include "fftlr/tensor/formats.hpp"

namespace fftlr {

void write_tensor(std::ostream& os, const AnyTensor& t);
AnyTensor read_tensor(std::istream& is);

void save_tensor(const std::filesystem::path& path, const AnyTensor& t);
AnyTensor load_tensor(const std::filesystem::path& path);

}  // namespace fftlr
