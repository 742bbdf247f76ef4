#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdcc/channel.hpp"
#include "mdcc/code_sim.hpp"

namespace mdcc {

struct ChannelFile {
  Matrix matrix;  // raw, pre-ingestion
  std::vector<std::string> labels_in;
  std::vector<std::string> labels_out;
};

ChannelFile parse_channel_json(const std::string& text);
ChannelFile load_channel_file(const std::string& path);
std::string channel_to_json(const Matrix& matrix, const std::vector<std::string>& labels_in,
                            const std::vector<std::string>& labels_out);

Codebook parse_codebook_json(const std::string& text);
std::string codebook_to_json(const Codebook& cb);

/// Fixed-order CSV writer printing every float with 17 significant digits, so
/// files are diff-stable and round-trip exactly.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;

  static std::string format(double value);
  static std::string format(long value);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mdcc
