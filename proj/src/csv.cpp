#include "gaugeline/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "gaugeline/errors.hpp"

namespace gaugeline::csv {

std::string format(double v) {
    if (!std::isfinite(v)) throw NonFiniteError("non-finite value reached CSV output");
    if (v == 0.0) return "0";  // also folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format(long long v) { return std::to_string(v); }
std::string format(unsigned long long v) { return std::to_string(v); }

Table::Table(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ',';
        text_ += header[i];
    }
    text_ += '\n';
}

Table& Table::row(std::vector<std::string> cells) {
    if (cells.size() != columns_) throw Error("csv: row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
    ++rows_;
    return *this;
}

std::string Table::str() const { return text_; }

void Table::write(const std::filesystem::path& path) const { write_file(path, text_); }

void write_metadata(const std::filesystem::path& path, const Metadata& entries) {
    std::string text;
    for (const auto& [k, v] : entries) text += k + "=" + v + "\n";
    write_file(path, text);
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace gaugeline::csv
