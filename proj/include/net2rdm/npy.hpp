#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "net2rdm/matrix.hpp"

namespace net2rdm {

enum class NpyDtype { f4, f8 };

/// Array as read from an NPY file. `data` is row-major and always double;
/// '<f4' payloads are widened.
struct NpyArray {
  std::vector<std::size_t> shape;
  NpyDtype dtype = NpyDtype::f8;
  std::vector<double> data;

  std::size_t element_count() const noexcept;
  bool operator==(const NpyArray&) const = default;
};

/// NPY v1.0 reader for little-endian float32/float64, C order, 1-3 dims.
NpyArray read_npy(const std::filesystem::path& path);
NpyArray parse_npy(std::span<const std::byte> bytes);

/// Writes NPY v1.0 with a 64-byte aligned header. Defaults to '<f8'; '<f4'
/// narrows each element.
void write_npy(const std::filesystem::path& path, std::span<const std::size_t> shape, std::span<const double> data,
               NpyDtype dtype = NpyDtype::f8);
std::vector<std::byte> serialize_npy(std::span<const std::size_t> shape, std::span<const double> data,
                                     NpyDtype dtype = NpyDtype::f8);

void write_npy(const std::filesystem::path& path, const Matrix& matrix);

/// Collapses trailing dimensions: [a x b x c] -> [a x (b*c)], [a] -> [a x 1].
Matrix npy_as_matrix(const NpyArray& array);

}  // namespace net2rdm
