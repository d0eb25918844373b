#pragma once

// Locale-independent CSV output. Numbers use the shortest representation
// that round-trips (std::to_chars), so identical data gives identical bytes.

#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

namespace omi {

std::string format_number(double x);

class CsvWriter {
  public:
    // Throws IoError when the file cannot be opened.
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(std::initializer_list<double> values);
    // Flushes and closes; throws IoError if any write failed.
    void close();

  private:
    std::filesystem::path path_;
    std::FILE* f_ = nullptr;
    std::size_t columns_ = 0;
};

}  // namespace omi
