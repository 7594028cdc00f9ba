// csv.hpp — byte-stable text output: shortest round-trip float formatting,
// CSV rows and key=value metadata sidecars.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gaugeline::csv {

// Shortest representation that reads back to the same double (at most 17
// significant digits). Throws NonFiniteError for NaN or infinity.
std::string format(double v);
std::string format(long long v);
std::string format(unsigned long long v);

class Table {
public:
    explicit Table(std::vector<std::string> header);

    Table& row(std::vector<std::string> cells);
    std::string str() const;
    void write(const std::filesystem::path& path) const;
    std::size_t rows() const { return rows_; }

private:
    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string text_;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

void write_metadata(const std::filesystem::path& path, const Metadata& entries);

// Writes text to a file, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace gaugeline::csv
