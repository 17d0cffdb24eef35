#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace teachrisk {

/// Formats a double with full round-trip precision (17 significant digits),
/// so repeated runs produce byte-identical files.
inline std::string csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Minimal CSV emitter: header row, then cells via add()/end_row().
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (i) out_ << ',';
            out_ << header_[i];
        }
        out_ << '\n';
    }

    CsvWriter& add(double v) { return add_cell(csv_double(v)); }
    CsvWriter& add(int v) { return add_cell(std::to_string(v)); }
    CsvWriter& add(long v) { return add_cell(std::to_string(v)); }
    CsvWriter& add(std::uint64_t v) { return add_cell(std::to_string(v)); }
    CsvWriter& add(bool v) { return add_cell(v ? "1" : "0"); }
    CsvWriter& add(const std::string& v) { return add_cell(v); }

    void end_row() {
        if (cells_ != header_.size())
            throw std::logic_error("csv row has " + std::to_string(cells_) +
                                   " cells, header has " + std::to_string(header_.size()));
        out_ << '\n';
        cells_ = 0;
        ++rows_;
    }

    std::string str() const { return out_.str(); }
    std::size_t rows() const { return rows_; }

    void write_file(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + path);
        f << out_.str();
    }

  private:
    CsvWriter& add_cell(const std::string& s) {
        if (cells_) out_ << ',';
        out_ << s;
        ++cells_;
        return *this;
    }

    std::vector<std::string> header_;
    std::ostringstream out_;
    std::size_t cells_ = 0;
    std::size_t rows_ = 0;
};

}  // namespace teachrisk
