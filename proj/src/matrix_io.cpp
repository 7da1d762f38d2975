#include "osos/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace osos {

static_assert(std::endian::native == std::endian::little,
              "matrix file I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'O', 'S', 'E', 'M'};
constexpr std::uint8_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

}  // namespace

void write_matrix(std::ostream& os, const Matrix& m) {
    os.write(kMagic, sizeof kMagic);
    os.put(static_cast<char>(kVersion));
    put_u32(os, static_cast<std::uint32_t>(m.rows()));
    put_u32(os, static_cast<std::uint32_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data().data()),
             static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!os) throw IoError("write_matrix: stream failure");
}

Matrix read_matrix(std::istream& is) {
    char magic[4];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw IoError("read_matrix: bad magic");
    const int version = is.get();
    if (version != kVersion)
        throw IoError("read_matrix: unsupported version " + std::to_string(version));
    const std::uint32_t rows = get_u32(is);
    const std::uint32_t cols = get_u32(is);
    Matrix m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data().data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!is) throw IoError("read_matrix: truncated payload");
    return m;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_matrix: cannot open " + path.string());
    write_matrix(os, m);
}

Matrix read_matrix(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_matrix: cannot open " + path.string());
    return read_matrix(is);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream os(path);
    if (!os) throw IoError("write_matrix_csv: cannot open " + path.string());
    char buf[32];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j) os << ',';
            os << buf;
        }
        os << '\n';
    }
    if (!os) throw IoError("write_matrix_csv: stream failure");
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("read_matrix_csv: cannot open " + path.string());
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() && is.eof()) break;
        std::size_t line_cols = 0;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            values.push_back(std::stod(cell));
            ++line_cols;
        }
        if (rows == 0)
            cols = line_cols;
        else if (line_cols != cols)
            throw IoError("read_matrix_csv: ragged row " + std::to_string(rows));
        ++rows;
    }
    return Matrix(rows, cols, std::move(values));
}

}  // namespace osos
