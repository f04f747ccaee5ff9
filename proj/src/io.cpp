#include "emot/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "emot/errors.hpp"

namespace emot {

namespace {

std::vector<double> parse_line(const std::string& line, const std::string& where) {
  std::vector<double> out;
  std::string field;
  auto flush = [&]() {
    if (field.empty()) return;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || errno == ERANGE) {
      throw Error(ErrorCode::kParse, where + ": cannot parse '" + field + "'");
    }
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kParse, where + ": non-finite value '" + field + "'");
    }
    out.push_back(v);
    field.clear();
  };
  for (char ch : line) {
    if (ch == ',' || ch == ';' || ch == ' ' || ch == '\t' || ch == '\r') {
      flush();
    } else {
      field.push_back(ch);
    }
  }
  flush();
  return out;
}

}  // namespace

DenseMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    rows.push_back(parse_line(line, where));
    if (rows.back().size() != rows.front().size()) {
      throw Error(ErrorCode::kParse,
                  where + ": expected " + std::to_string(rows.front().size()) +
                      " fields, found " + std::to_string(rows.back().size()));
    }
  }
  if (rows.empty()) throw Error(ErrorCode::kParse, path.string() + ": no data");
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Vector load_vector(const std::filesystem::path& path) {
  const DenseMatrix m = load_matrix(path);
  if (m.rows() != 1 && m.cols() != 1) {
    throw Error(ErrorCode::kSizeMismatch,
                path.string() + ": expected a vector, found " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  Vector v(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) v(i) = m.data()[i];
  return v;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
}

}  // namespace emot
