// output.hpp — atomic file writes, CSV tables and provenance sidecars

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace lab {

/// Writes to a unique temporary in the target directory, then renames over `file`.
void write_atomic(const std::filesystem::path& file, std::string_view content);

/// 17 significant digits, "." as decimal separator, independent of the locale.
std::string format_real(double value);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(const std::vector<double>& values);
    std::size_t rows() const { return rows_; }
    std::string render() const;

private:
    std::vector<std::string> header_;
    std::string body_;
    std::size_t rows_{0};
};

/// Writes `table` to dir/name and dir/name.json holding `provenance` plus the file name.
std::filesystem::path emit(const std::filesystem::path& dir, const std::string& name, const CsvTable& table,
                           nlohmann::json provenance);

}  // namespace lab
