#pragma once

#include "boxbp/core.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace boxbp::io {

/// Malformed input; carries the 1-based position of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, int line, int column, const std::string& what);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// A file that cannot be opened for reading or writing.
class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Matrices are stored either as headerless row-major CSV or as the JSON
// wrapper {"rows": m, "cols": n, "data": [row-major values]}.  Values are
// written in the shortest form that reads back exactly.

Matrix parse_matrix_csv(const std::string& text, const std::string& source = "<csv>");
Matrix parse_matrix_json(const std::string& text, const std::string& source = "<json>");
/// Dispatches on content: a leading '{' means JSON.
Matrix parse_matrix(const std::string& text, const std::string& source = "<input>");

std::string format_matrix_csv(const Matrix& A);
std::string format_matrix_json(const Matrix& A);

/// A vector file is a matrix with a single row or a single column.
Vector parse_vector(const std::string& text, const std::string& source = "<input>");
std::string format_vector_csv(const Vector& v);

Matrix read_matrix(const std::string& path);
Vector read_vector(const std::string& path);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace boxbp::io
