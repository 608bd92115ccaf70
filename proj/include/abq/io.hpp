// abq -- deterministic CSV/JSON emission with atomic writes.
#pragma once

#include <string>
#include <vector>

namespace abq::io {

inline constexpr const char* kCsvVersionTag = "# abq-forms v1";

/// %.17g rendering; fixed across runs for byte-identical output.
std::string fmt_g17(double v);

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(const std::vector<std::string>& cells);
    std::string render() const;  // version tag, header, rows

    std::size_t rows() const { return rows_.size(); }

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Write via temp file + rename in the target directory.
void write_text_atomic(const std::string& path, const std::string& content);

/// To the path when non-empty, else to stdout.
void emit(const std::string& path, const std::string& content);

}  // namespace abq::io
