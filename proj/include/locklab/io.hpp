#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

namespace locklab {

/// Shortest round-trippable decimal representation; identical input bits
/// give identical text, which keeps CSV output byte-reproducible. Negative
/// zero prints as plain zero.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Minimal CSV builder: a header row plus uniform data rows, '\n' endings.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) text_ += ',';
      text_ += columns[i];
    }
    text_ += '\n';
  }

  class Row {
  public:
    explicit Row(CsvTable& t) : t_(t) {}
    ~Row() { t_.end_row(cells_); }
    Row& operator<<(double v) {
      cells_.push_back(format_double(v));
      return *this;
    }
    Row& operator<<(int v) {
      cells_.push_back(std::to_string(v));
      return *this;
    }
    Row& operator<<(bool v) {
      cells_.push_back(v ? "1" : "0");
      return *this;
    }
    Row& operator<<(const std::string& v) {
      cells_.push_back(v);
      return *this;
    }
    Row& operator<<(const char* v) {
      cells_.emplace_back(v);
      return *this;
    }

  private:
    CsvTable& t_;
    std::vector<std::string> cells_;
  };

  Row row() { return Row(*this); }

  const std::string& str() const { return text_; }

private:
  friend class Row;
  void end_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  std::string text_;
};

}  // namespace locklab
