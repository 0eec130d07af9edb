#include "matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace birkhoff::cli {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_matrix(std::ostream& os, const Matrix& M) {
  os << M.rows() << ' ' << M.cols() << '\n';
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j > 0) os << ' ';
      os << format_double(M(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  long long rows = -1, cols = -1;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) {
    throw FormatError("matrix file: expected a 'rows cols' header");
  }
  Matrix M(rows, cols);
  std::string tok;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      if (!(is >> tok)) throw FormatError("matrix file: fewer values than the header promises");
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw FormatError("matrix file: bad value '" + tok + "'");
      }
      M(i, j) = v;
    }
  if (is >> tok) throw FormatError("matrix file: trailing data after the last value");
  return M;
}

void save_matrix(const std::string& path, const Matrix& M) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path);
  write_matrix(os, M);
  if (!os) throw FormatError("write failed for " + path);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path);
  return read_matrix(is);
}

}  // namespace birkhoff::cli
