#include "irrfact/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace irrfact {

namespace {

using nlohmann::json;

void check_matrix(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ParseError("matrix must be square and nonempty");
  }
  if (!all_finite(m)) {
    throw ParseError("matrix has non-finite entries");
  }
}

Matrix read_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("entries")) {
    throw ParseError("expected an object with \"n\" and \"entries\"");
  }
  if (!doc["n"].is_number_integer()) {
    throw ParseError("\"n\" must be an integer");
  }
  const auto n = doc["n"].get<long long>();
  if (n < 1) {
    throw ParseError("\"n\" must be positive");
  }
  const json& rows = doc["entries"];
  if (!rows.is_array() || static_cast<long long>(rows.size()) != n) {
    throw ParseError("\"entries\" must be an n-row array");
  }
  Matrix m(n, n);
  for (long long i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<long long>(row.size()) != n) {
      throw ParseError("row " + std::to_string(i) + " does not have n entries");
    }
    for (long long j = 0; j < n; ++j) {
      const json& e = row[static_cast<std::size_t>(j)];
      if (!e.is_object() || !e.contains("re") || !e.contains("im") ||
          !e["re"].is_number() || !e["im"].is_number()) {
        throw ParseError("entry (" + std::to_string(i) + "," + std::to_string(j) +
                         ") must be an object with numeric \"re\" and \"im\"");
      }
      m(i, j) = Complex(e["re"].get<double>(), e["im"].get<double>());
    }
  }
  check_matrix(m);
  return m;
}

// token forms: "1.5", "2i", "-1.5+2i", "3e-05-0.25i"
Complex parse_token(const std::string& tok) {
  if (tok.empty()) throw ParseError("empty matrix entry");
  const char* s = tok.c_str();
  char* end = nullptr;
  double first = std::strtod(s, &end);
  if (end == s) throw ParseError("cannot parse entry '" + tok + "'");
  if (*end == '\0') return Complex(first, 0.0);
  if (*end == 'i' && *(end + 1) == '\0') return Complex(0.0, first);
  const char* s2 = end;
  double second = std::strtod(s2, &end);
  if (end == s2 || *end != 'i' || *(end + 1) != '\0') {
    throw ParseError("cannot parse entry '" + tok + "'");
  }
  return Complex(first, second);
}

Matrix read_text(std::istream& in) {
  std::vector<std::vector<Complex>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<Complex> row;
    std::string tok;
    while (ls >> tok) row.push_back(parse_token(tok));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no matrix rows found");
  const std::size_t n = rows.size();
  Matrix m(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw ParseError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                       " entries, expected " + std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  check_matrix(m);
  return m;
}

}  // namespace

std::string complex_token(const Complex& z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", z.real());
  std::string out(buf);
  std::snprintf(buf, sizeof buf, "%+.17g", z.imag());
  out += buf;
  out += 'i';
  return out;
}

Matrix read_matrix(std::istream& in, MatrixFormat format) {
  return format == MatrixFormat::json ? read_json(in) : read_text(in);
}

Matrix read_matrix_file(const std::string& path, MatrixFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  return read_matrix(in, format);
}

void write_matrix(std::ostream& out, const Matrix& m, MatrixFormat format) {
  if (format == MatrixFormat::json) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Index j = 0; j < m.cols(); ++j) {
        row.push_back({{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
      }
      rows.push_back(std::move(row));
    }
    json doc{{"n", m.rows()}, {"entries", std::move(rows)}};
    out << doc.dump(2) << '\n';
  } else {
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        if (j) out << ' ';
        out << complex_token(m(i, j));
      }
      out << '\n';
    }
  }
}

std::string matrix_to_string(const Matrix& m, MatrixFormat format) {
  std::ostringstream out;
  write_matrix(out, m, format);
  return out.str();
}

}  // namespace irrfact
