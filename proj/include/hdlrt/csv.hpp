#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hdlrt/linalg.hpp"

namespace hdlrt {

// Comma-separated decimal text, optional single header row (auto-detected as
// a non-numeric first row), one observation per row. LF or CRLF.
DataMatrix read_csv_data(std::istream& in);
DataMatrix read_csv_data_file(const std::string& path);

// Same grammar without the DataMatrix shape requirements (for mean vectors
// and covariance matrices).
Matrix read_csv_matrix(std::istream& in);
Matrix read_csv_matrix_file(const std::string& path);

// A vector given either as one row or one column.
std::vector<double> read_csv_vector_file(const std::string& path);

// 17 significant digits: doubles survive a write/read round trip bit-exactly.
std::string format_double(double v);
void write_csv(const Matrix& m, std::ostream& out);

}  // namespace hdlrt
