#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "xps/errors.hpp"

namespace xps {

/// Render a double with 17 significant digits (round-trip exact).
inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Minimal CSV emitter with a fixed column order.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns)
        : columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const { return columns_; }

    void add_row(const std::vector<double>& values) {
        if (values.size() != columns_.size())
            throw Error("csv: row width does not match header");
        std::string line;
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) line += ',';
            line += csv_number(values[i]);
        }
        rows_.push_back(std::move(line));
    }

    void add_text_row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size())
            throw Error("csv: row width does not match header");
        std::string line;
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        rows_.push_back(std::move(line));
    }

    std::string str() const {
        std::string out;
        for (size_t i = 0; i < columns_.size(); ++i) {
            if (i) out += ',';
            out += columns_[i];
        }
        out += '\n';
        for (const auto& r : rows_) {
            out += r;
            out += '\n';
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw Error("csv: cannot open " + path + " for writing");
        os << str();
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

}  // namespace xps
