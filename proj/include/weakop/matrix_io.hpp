#pragma once

// Matrix text format:
//   line 1:  "rows cols"
//   then one line per row, each with `cols` pairs "re im" separated by single
//   spaces, written with 17 significant digits (lossless double round trip).
// Lines starting with '#' are comments and are skipped on read.

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "weakop/errors.hpp"
#include "weakop/linops.hpp"

namespace weakop {

inline void write_matrix(std::ostream& os, const CMatrix& m) {
  char buf[64];
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Complex v = m(i, j);
      std::snprintf(buf, sizeof buf, "%.17g %.17g", v.real(), v.imag());
      if (j) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

inline CMatrix read_matrix(std::istream& is) {
  auto next_data_line = [&is](std::string& line) -> bool {
    while (std::getline(is, line)) {
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos) continue;
      if (line[pos] == '#') continue;
      return true;
    }
    return false;
  };

  std::string line;
  if (!next_data_line(line)) throw IoError("read_matrix: missing header line");
  Eigen::Index rows = 0, cols = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> rows >> cols) || rows <= 0 || cols <= 0)
      throw IoError("read_matrix: bad header '" + line + "'");
  }
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!next_data_line(line))
      throw IoError("read_matrix: unexpected end of input at row " + std::to_string(i));
    std::istringstream rs(line);
    for (Eigen::Index j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      if (!(rs >> re >> im))
        throw IoError("read_matrix: malformed row " + std::to_string(i));
      m(i, j) = Complex(re, im);
    }
    double extra;
    if (rs >> extra)
      throw IoError("read_matrix: trailing data in row " + std::to_string(i));
  }
  if (!is_finite(m)) throw IoError("read_matrix: non-finite entry");
  return m;
}

inline void write_matrix_file(const std::string& path, const CMatrix& m,
                              const std::string& comment = {}) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  if (!comment.empty()) os << "# " << comment << '\n';
  write_matrix(os, m);
  if (!os) throw IoError("write failed for '" + path + "'");
}

inline CMatrix read_matrix_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_matrix(is);
}

}  // namespace weakop
