#pragma once

// Plain-text dense matrix files: a "rows cols" header line, then row-major
// whitespace-separated values printed with round-trip precision.

#include "birkhoff/core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace birkhoff::cli {

/// Parse failures and unreadable files.
class FormatError : public Error {
 public:
  using Error::Error;
};

void write_matrix(std::ostream& os, const Matrix& M);
Matrix read_matrix(std::istream& is);

void save_matrix(const std::string& path, const Matrix& M);
Matrix load_matrix(const std::string& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace birkhoff::cli
