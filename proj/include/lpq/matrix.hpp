#pragma once

// Dense row-major matrix, just large enough for the discretized kernels:
// storage, mat-vec products, and a small binary container format.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpq/ext.hpp"

namespace lpq {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // row-major

  static Matrix zeros(std::size_t r, std::size_t c) {
    Matrix m;
    m.rows = r;
    m.cols = c;
    m.a.assign(r * c, 0.0);
    return m;
  }
  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  const double* row(std::size_t i) const { return a.data() + i * cols; }
};

inline std::vector<double> matvec(const Matrix& m, const std::vector<double>& x) {
  if (x.size() != m.cols) throw ParamError("matvec: size mismatch");
  std::vector<double> y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline std::vector<double> matvec_t(const Matrix& m, const std::vector<double>& x) {
  if (x.size() != m.rows) throw ParamError("matvec_t: size mismatch");
  std::vector<double> y(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < m.cols; ++j) y[j] += r[j] * xi;
  }
  return y;
}

// Container format: magic "LPQOP1", two little-endian uint32 dimensions, then
// rows*cols little-endian float64 in row-major order.
inline void write_matrix(const std::string& path, const Matrix& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write("LPQOP1", 6);
  const std::uint32_t dims[2] = {static_cast<std::uint32_t>(m.rows),
                                 static_cast<std::uint32_t>(m.cols)};
  f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  f.write(reinterpret_cast<const char*>(m.a.data()),
          static_cast<std::streamsize>(m.a.size() * sizeof(double)));
  if (!f) throw std::runtime_error("short write: " + path);
}

// Plain CSV for small matrices; one row per line, 17 significant digits.
inline void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  char buf[32];
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m.at(i, j));
      f << (j ? "," : "") << buf;
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("short write: " + path);
}

inline Matrix read_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  char magic[6];
  f.read(magic, 6);
  if (!f || std::memcmp(magic, "LPQOP1", 6) != 0)
    throw std::runtime_error("not a matrix container: " + path);
  std::uint32_t dims[2];
  f.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!f) throw std::runtime_error("truncated header: " + path);
  Matrix m = Matrix::zeros(dims[0], dims[1]);
  f.read(reinterpret_cast<char*>(m.a.data()),
         static_cast<std::streamsize>(m.a.size() * sizeof(double)));
  if (!f) throw std::runtime_error("truncated payload: " + path);
  return m;
}

}  // namespace lpq
