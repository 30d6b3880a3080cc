#include "bwf/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace bwf {

namespace {

std::string location(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& field, const std::string& path, std::size_t line,
                    std::size_t col) {
  const std::string text = trimmed(field);
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(value))
    raise(ErrorKind::ParseError,
          location(path, line) + ": column " + std::to_string(col + 1) +
              ": expected a finite number, got '" + text + "'");
  return value;
}

long parse_index(const std::string& field, const std::string& path, std::size_t line,
                 std::size_t col) {
  const std::string text = trimmed(field);
  char* end = nullptr;
  const long value = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size() || value < 0)
    raise(ErrorKind::ParseError,
          location(path, line) + ": column " + std::to_string(col + 1) +
              ": expected a nonnegative integer, got '" + text + "'");
  return value;
}

Matrix load_covariates(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::ParseError, path + ": cannot open file");

  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::ParseError, path + ": missing header row");
  const std::size_t p = split_csv_line(line).size();
  if (p == 0) raise(ErrorKind::ParseError, path + ": empty header row");

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != p)
      raise(ErrorKind::ParseError, location(path, line_no) + ": expected " + std::to_string(p) +
                                       " columns, got " + std::to_string(fields.size()));
    std::vector<double> row(p);
    for (std::size_t c = 0; c < p; ++c) row[c] = parse_double(fields[c], path, line_no, c);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) raise(ErrorKind::ParseError, path + ": no covariate rows");

  Matrix covariates(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < p; ++c)
      covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
  return covariates;
}

struct Cell {
  long sample = 0;
  long row = 0;
  long col = 0;
  double value = 0.0;
  std::size_t line = 0;
};

}  // namespace

Dataset load_dataset(const std::string& covariates_path, const std::string& responses_path,
                     const NumericConfig& cfg) {
  const Matrix covariates = load_covariates(covariates_path);
  const long n = covariates.rows();

  std::ifstream in(responses_path);
  if (!in) raise(ErrorKind::ParseError, responses_path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line))
    raise(ErrorKind::ParseError, responses_path + ": missing header row");
  {
    const auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"sample_id", "row", "col", "value"};
    bool ok = header.size() == expected.size();
    for (std::size_t c = 0; ok && c < expected.size(); ++c) ok = trimmed(header[c]) == expected[c];
    if (!ok)
      raise(ErrorKind::ParseError,
            responses_path + ": header must be 'sample_id,row,col,value'");
  }

  std::vector<Cell> cells;
  long dim = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4)
      raise(ErrorKind::ParseError,
            location(responses_path, line_no) + ": expected 4 columns, got " +
                std::to_string(fields.size()));
    Cell cell;
    cell.sample = parse_index(fields[0], responses_path, line_no, 0);
    cell.row = parse_index(fields[1], responses_path, line_no, 1);
    cell.col = parse_index(fields[2], responses_path, line_no, 2);
    cell.value = parse_double(fields[3], responses_path, line_no, 3);
    cell.line = line_no;
    if (cell.sample >= n)
      raise(ErrorKind::ParseError,
            location(responses_path, line_no) + ": sample_id " + std::to_string(cell.sample) +
                " out of range (covariates have " + std::to_string(n) + " rows)");
    dim = std::max(dim, std::max(cell.row, cell.col) + 1);
    cells.push_back(cell);
  }
  if (cells.empty()) raise(ErrorKind::ParseError, responses_path + ": no response cells");

  // Assemble per-sample matrices; the upper triangle is mandatory, the lower
  // is optional and must mirror the upper when present.
  std::vector<Matrix> values(static_cast<std::size_t>(n), Matrix::Zero(dim, dim));
  std::vector<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> given(
      static_cast<std::size_t>(n),
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(dim, dim, false));

  for (const Cell& cell : cells) {
    auto& v = values[static_cast<std::size_t>(cell.sample)];
    auto& g = given[static_cast<std::size_t>(cell.sample)];
    if (g(cell.row, cell.col))
      raise(ErrorKind::ParseError,
            location(responses_path, cell.line) + ": duplicate cell (sample " +
                std::to_string(cell.sample) + ", " + std::to_string(cell.row) + ", " +
                std::to_string(cell.col) + ")");
    v(cell.row, cell.col) = cell.value;
    g(cell.row, cell.col) = true;
  }

  std::vector<Matrix> responses;
  responses.reserve(static_cast<std::size_t>(n));
  for (long s = 0; s < n; ++s) {
    const auto& v = values[static_cast<std::size_t>(s)];
    const auto& g = given[static_cast<std::size_t>(s)];
    Matrix full(dim, dim);
    for (long r = 0; r < dim; ++r) {
      for (long c = r; c < dim; ++c) {
        if (!g(r, c))
          raise(ErrorKind::MissingCell, responses_path + ": sample " + std::to_string(s) +
                                            " is missing cell (" + std::to_string(r) + ", " +
                                            std::to_string(c) + ")");
        const double upper = v(r, c);
        if (r != c && g(c, r)) {
          const double lower = v(c, r);
          const double tol = 1e-10 * (1.0 + std::max(std::abs(upper), std::abs(lower)));
          if (std::abs(upper - lower) > tol)
            raise(ErrorKind::AsymmetricResponse,
                  responses_path + ": sample " + std::to_string(s) + " cells (" +
                      std::to_string(r) + ", " + std::to_string(c) +
                      ") and mirror disagree beyond 1e-10");
        }
        full(r, c) = upper;
        full(c, r) = upper;
      }
    }
    responses.push_back(full);
  }

  Dataset data;
  data.covariates = covariates;
  data.responses.reserve(responses.size());
  for (std::size_t i = 0; i < responses.size(); ++i) {
    try {
      data.responses.emplace_back(responses[i], cfg);
    } catch (const Error& e) {
      raise(e.kind() == ErrorKind::NotPositiveDefinite ? ErrorKind::NotPositiveDefinite
                                                       : e.kind(),
            responses_path + ": sample " + std::to_string(i) + ": " + e.what());
    }
  }
  validate_dataset(data);
  return data;
}

void save_dataset(const Dataset& data, const std::string& covariates_path,
                  const std::string& responses_path) {
  char buffer[64];
  {
    std::ofstream out(covariates_path);
    if (!out) raise(ErrorKind::ParseError, covariates_path + ": cannot open file for writing");
    for (Eigen::Index c = 0; c < data.p(); ++c)
      out << (c ? "," : "") << "x" << (c + 1);
    out << "\n";
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      for (Eigen::Index c = 0; c < data.p(); ++c) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", data.covariates(i, c));
        out << (c ? "," : "") << buffer;
      }
      out << "\n";
    }
  }
  {
    std::ofstream out(responses_path);
    if (!out) raise(ErrorKind::ParseError, responses_path + ": cannot open file for writing");
    out << "sample_id,row,col,value\n";
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const Matrix& q = data.responses[static_cast<std::size_t>(i)].mat();
      for (Eigen::Index r = 0; r < q.rows(); ++r)
        for (Eigen::Index c = r; c < q.cols(); ++c) {
          std::snprintf(buffer, sizeof(buffer), "%.17g", q(r, c));
          out << i << "," << r << "," << c << "," << buffer << "\n";
        }
    }
  }
}

}  // namespace bwf
