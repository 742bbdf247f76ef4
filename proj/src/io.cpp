#include "mdcc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mdcc/errors.hpp"

namespace mdcc {

using nlohmann::json;

ChannelFile parse_channel_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("channel JSON parse error: ") + e.what());
  }
  if (!doc.contains("matrix") || !doc["matrix"].is_array() || doc["matrix"].empty()) {
    throw EmptyMatrix("channel JSON needs a nonempty \"matrix\" array");
  }
  const auto& rows = doc["matrix"];
  const std::size_t ncols = rows[0].size();
  if (ncols == 0) throw EmptyMatrix("channel JSON matrix has empty rows");
  ChannelFile file;
  file.matrix.resize(static_cast<Index>(rows.size()), static_cast<Index>(ncols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != ncols) {
      throw ShapeMismatch("channel JSON matrix is not rectangular");
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      if (!rows[r][c].is_number()) throw DomainError("channel JSON matrix entry not numeric");
      file.matrix(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c].get<double>();
    }
  }
  if (doc.contains("labels_in")) {
    file.labels_in = doc["labels_in"].get<std::vector<std::string>>();
  }
  if (doc.contains("labels_out")) {
    file.labels_out = doc["labels_out"].get<std::vector<std::string>>();
  }
  return file;
}

ChannelFile load_channel_file(const std::string& path) {
  return parse_channel_json(read_text_file(path));
}

std::string channel_to_json(const Matrix& matrix, const std::vector<std::string>& labels_in,
                            const std::vector<std::string>& labels_out) {
  json doc;
  json rows = json::array();
  for (Index r = 0; r < matrix.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < matrix.cols(); ++c) row.push_back(matrix(r, c));
    rows.push_back(std::move(row));
  }
  doc["matrix"] = std::move(rows);
  if (!labels_in.empty()) doc["labels_in"] = labels_in;
  if (!labels_out.empty()) doc["labels_out"] = labels_out;
  return doc.dump(2);
}

Codebook parse_codebook_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("codebook JSON parse error: ") + e.what());
  }
  if (!doc.contains("n") || !doc.contains("codewords")) {
    throw DomainError("codebook JSON needs \"n\" and \"codewords\"");
  }
  Codebook cb;
  cb.n = doc["n"].get<long>();
  const auto& words = doc["codewords"];
  cb.M = static_cast<long>(words.size());
  if (cb.n < 1 || cb.M < 1) throw DomainError("codebook JSON needs n >= 1 and M >= 1");
  cb.symbols.resize(static_cast<std::size_t>(cb.n) * static_cast<std::size_t>(cb.M));
  for (long m = 0; m < cb.M; ++m) {
    const auto& word = words[static_cast<std::size_t>(m)];
    if (static_cast<long>(word.size()) != cb.n) {
      throw ShapeMismatch("codeword length differs from n");
    }
    for (long i = 0; i < cb.n; ++i) {
      const int s = word[static_cast<std::size_t>(i)].get<int>();
      if (s < 0 || s > 255) throw DomainError("symbol index out of byte range");
      cb.symbols[static_cast<std::size_t>(m) * static_cast<std::size_t>(cb.n) +
                 static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(s);
    }
  }
  return cb;
}

std::string codebook_to_json(const Codebook& cb) {
  json doc;
  doc["n"] = cb.n;
  json words = json::array();
  for (long m = 0; m < cb.M; ++m) {
    json word = json::array();
    for (std::uint8_t s : cb.word(m)) word.push_back(static_cast<int>(s));
    words.push_back(std::move(word));
  }
  doc["codewords"] = std::move(words);
  return doc.dump(2);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) throw ShapeMismatch("CSV row width mismatch");
  rows_.push_back(cells);
}

std::string CsvWriter::str() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out << columns_[i] << (i + 1 == columns_.size() ? "\n" : ",");
  }
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 == row.size() ? "\n" : ",");
    }
  }
  return out.str();
}

std::string CsvWriter::format(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string CsvWriter::format(long value) { return std::to_string(value); }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path);
  out << content;
  if (!out) throw Error("failed writing output file: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mdcc
