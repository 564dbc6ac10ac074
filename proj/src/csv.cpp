#include "hdlrt/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace hdlrt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_field(std::string_view field, double& out) {
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::vector<double>> parse_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> values(fields.size());
    std::size_t bad_col = 0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (!parse_field(fields[j], values[j])) {
        bad_col = j + 1;
        break;
      }
    }
    if (bad_col != 0) {
      // Only the first content row may be non-numeric: it is the header.
      if (!seen_content) {
        seen_content = true;
        continue;
      }
      throw ParseError("unparsable number", line_no, bad_col);
    }
    if (!rows.empty() && values.size() != width) {
      throw ParseError("row has " + std::to_string(values.size()) + " fields, expected " +
                           std::to_string(width),
                       line_no, values.size());
    }
    width = values.size();
    seen_content = true;
    rows.push_back(std::move(values));
  }
  return rows;
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw EmptyInput("no data rows");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EmptyInput("cannot open '" + path + "'");
  return in;
}

}  // namespace

Matrix read_csv_matrix(std::istream& in) { return rows_to_matrix(parse_rows(in)); }

Matrix read_csv_matrix_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_csv_matrix(in);
}

DataMatrix read_csv_data(std::istream& in) { return DataMatrix(read_csv_matrix(in)); }

DataMatrix read_csv_data_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_csv_data(in);
}

std::vector<double> read_csv_vector_file(const std::string& path) {
  Matrix m = read_csv_matrix_file(path);
  std::vector<double> v;
  if (m.rows() == 1) {
    auto row = m.row(0);
    v.assign(row.begin(), row.end());
  } else if (m.cols() == 1) {
    v.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) v.push_back(m(i, 0));
  } else {
    throw DimensionMismatch("'" + path + "' is not a vector (one row or one column)");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const Matrix& m, std::ostream& out) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace hdlrt
