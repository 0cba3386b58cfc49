#pragma once

// Plain-text matrix format: a line with n, then n rows of n values printed
// with 17 significant digits, separated by single spaces, LF line endings.

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "horoopt/errors.hpp"
#include "horoopt/spd.hpp"

namespace horoopt {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_matrix(std::ostream& os, const Matrix& m) {
  detail::require_square(m, "write_matrix");
  os << m.rows() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_g17(m(i, j));
    }
    os << '\n';
  }
}

inline std::string matrix_to_string(const Matrix& m) {
  std::ostringstream os;
  write_matrix(os, m);
  return os.str();
}

inline Matrix read_matrix(std::istream& is) {
  long long n = 0;
  if (!(is >> n) || n <= 0) throw InvalidArgument("read_matrix: bad dimension line");
  Matrix m(n, n);
  for (long long i = 0; i < n; ++i) {
    for (long long j = 0; j < n; ++j) {
      if (!(is >> m(i, j))) throw InvalidArgument("read_matrix: truncated matrix data");
    }
  }
  return m;
}

inline Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open matrix file: " + path);
  return read_matrix(in);
}

inline void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write matrix file: " + path);
  write_matrix(out, m);
}

}  // namespace horoopt
