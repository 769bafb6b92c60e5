// CSV output with full round-trip precision: '.' decimal separator, '\n'
// newlines, 17 significant digits.
#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace veblen {

inline std::string csv_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
        path_ = path;
    }

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }
    void header(const std::string& line) { out_ << line << "\n"; }

    CsvWriter& field(double x) { return raw(csv_number(x)); }
    CsvWriter& field(long long x) { return raw(std::to_string(x)); }
    CsvWriter& field(const std::string& s) { return raw(s); }
    void end_row() {
        out_ << "\n";
        first_ = true;
    }

    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("error writing " + path_);
    }

private:
    CsvWriter& raw(const std::string& s) {
        if (!first_) out_ << ",";
        out_ << s;
        first_ = false;
        return *this;
    }

    std::ofstream out_;
    std::string path_;
    bool first_ = true;
};

}  // namespace veblen
