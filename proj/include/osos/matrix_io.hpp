#ifndef OSOS_MATRIX_IO_HPP
#define OSOS_MATRIX_IO_HPP

#include <filesystem>
#include <iosfwd>

#include "osos/matrix.hpp"

namespace osos {

// Binary matrix format: magic "OSEM", version byte 1, u32 little-endian
// rows, u32 little-endian cols, then rows*cols float64 little-endian in
// row-major order.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

// Header-free CSV, comma-separated, one matrix row per line. Values are
// printed with 17 significant digits so the binary/CSV round trip is
// value-exact.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace osos

#endif
