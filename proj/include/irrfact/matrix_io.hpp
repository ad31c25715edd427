// Matrix file formats: a JSON object {"n": k, "entries": [[{"re","im"},..],..]}
// and a plain-text format (one row per line, whitespace-separated re±imi
// tokens). Both round-trip entry-exactly.
#pragma once

#include <iosfwd>
#include <string>

#include "irrfact/matrix_core.hpp"

namespace irrfact {

// Malformed input: unreadable, bad shape, or non-finite entries.
class ParseError : public Error {
 public:
  using Error::Error;
};

enum class MatrixFormat { json, text };

Matrix read_matrix(std::istream& in, MatrixFormat format);
Matrix read_matrix_file(const std::string& path, MatrixFormat format);

void write_matrix(std::ostream& out, const Matrix& m, MatrixFormat format);
std::string matrix_to_string(const Matrix& m, MatrixFormat format);

// One complex entry as the text token (17 significant digits each part).
std::string complex_token(const Complex& z);

}  // namespace irrfact
