#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace covaug {

/// Dense float64 array in C (row-major) order, mirroring the on-disk layout
/// of a little-endian '<f8' .npy file.
struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  std::size_t element_count() const;
};

/// Writes `array` in .npy format version 1.0.  The header is laid out
/// exactly as numpy's own writer does (64-byte alignment, space padding),
/// so identical arrays produce identical bytes.
void write_npy(const std::filesystem::path& path, const NpyArray& array);

/// Reads a version 1.0/2.0 '<f8' C-order .npy file.  Throws
/// std::runtime_error on any other dtype, ordering, or a malformed header.
NpyArray read_npy(const std::filesystem::path& path);

}  // namespace covaug
