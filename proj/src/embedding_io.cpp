#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "tsdapt/data.hpp"
#include "tsdapt/error.hpp"

namespace tsdapt::data {

namespace {

constexpr std::string_view kMagic = "tsdapt-embeddings";
constexpr std::string_view kVersion = "v1";

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
bool parse_integer(std::string_view cell, T& value) {
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

bool parse_finite(std::string_view cell, double& value) {
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(value);
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "format_double: conversion failed");
  return std::string(buffer, ptr);
}

void write_embeddings(std::ostream& out, const LabeledEmbeddings& data) {
  if (data.x.rows() != data.labels.size())
    throw Error(ErrorCode::InvalidArgument, "write_embeddings: label count does not match row count");
  if (!data.x.all_finite()) throw Error(ErrorCode::InvalidArgument, "write_embeddings: non-finite value");
  out << kMagic << ',' << kVersion << ',' << data.x.cols() << ',' << data.class_count << '\n';
  for (std::size_t i = 0; i < data.x.rows(); ++i) {
    out << data.labels[i];
    for (double v : data.x.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

LabeledEmbeddings read_embeddings(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  const auto header = split_commas(line);
  if (header.empty() || header[0] != kMagic) throw ParseError(1, "malformed header");
  if (header.size() != 4) throw ParseError(1, "malformed header: expected 4 fields");
  if (header[1] != kVersion) throw ParseError(1, "unknown version '" + std::string(header[1]) + "'");
  std::size_t dim = 0, classes = 0;
  if (!parse_integer(header[2], dim) || dim == 0) throw ParseError(1, "malformed header: bad dimension");
  if (!parse_integer(header[3], classes) || classes == 0) throw ParseError(1, "malformed header: bad class count");

  LabeledEmbeddings data;
  data.class_count = classes;
  data.x = linalg::Matrix(0, dim);
  std::vector<double> row(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cells = split_commas(line);
    if (cells.size() != dim + 1)
      throw ParseError(line_no, "expected " + std::to_string(dim + 1) + " cells, found " + std::to_string(cells.size()));
    int label = 0;
    if (!parse_integer(cells[0], label)) throw ParseError(line_no, "label is not an integer");
    if (label < 0 || static_cast<std::size_t>(label) >= classes)
      throw ParseError(line_no, "label " + std::to_string(label) + " outside [0, " + std::to_string(classes) + ")");
    for (std::size_t k = 0; k < dim; ++k)
      if (!parse_finite(cells[k + 1], row[k]))
        throw ParseError(line_no, "cell " + std::to_string(k + 2) + " is not a finite number");
    data.x.append_row(row);
    data.labels.push_back(label);
  }
  return data;
}

void write_embeddings_file(const std::filesystem::path& path, const LabeledEmbeddings& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::OutputError, "cannot write " + path.string());
  write_embeddings(out, data);
  out.flush();
  if (!out) throw Error(ErrorCode::OutputError, "write failed for " + path.string());
}

LabeledEmbeddings read_embeddings_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InputError, "cannot open " + path.string());
  return read_embeddings(in);
}

}  // namespace tsdapt::data
