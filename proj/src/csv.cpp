#include "omi/csv.hpp"

#include "omi/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace omi {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";  // folds -0
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> header)
    : path_(path), columns_(header.size()) {
    f_ = std::fopen(path.c_str(), "wb");
    if (!f_) throw IoError("cannot write " + path.string());
    bool first = true;
    for (auto h : header) {
        if (!first) std::fputc(',', f_);
        std::fwrite(h.data(), 1, h.size(), f_);
        first = false;
    }
    std::fputc('\n', f_);
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(f_);
}

void CsvWriter::row(std::initializer_list<double> values) {
    if (values.size() != columns_) throw DomainError("csv: row width does not match header");
    bool first = true;
    for (double v : values) {
        if (!first) std::fputc(',', f_);
        const std::string s = format_number(v);
        std::fwrite(s.data(), 1, s.size(), f_);
        first = false;
    }
    std::fputc('\n', f_);
}

void CsvWriter::close() {
    if (!f_) return;
    const bool bad = std::ferror(f_) != 0;
    const bool closed = std::fclose(f_) == 0;
    f_ = nullptr;
    if (bad || !closed) throw IoError("write failed: " + path_.string());
}

}  // namespace omi
