#include "abq/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "abq/common.hpp"

namespace abq::io {

std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
        throw domain_error("CsvTable: row width mismatch");
    rows_.push_back(cells);
}

std::string CsvTable::render() const {
    std::string out = kCsvVersionTag;
    out += '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw domain_error("cannot open output file: " + tmp.string());
        f << content;
        if (!f.good()) throw domain_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
    } else {
        write_text_atomic(path, content);
    }
}

}  // namespace abq::io
