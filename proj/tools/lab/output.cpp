// output.cpp

#include "output.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <fmt/format.h>

namespace lab {

void write_atomic(const std::filesystem::path& file, std::string_view content) {
    static std::atomic<unsigned> counter{0};
    const auto dir = file.has_parent_path() ? file.parent_path() : std::filesystem::path(".");
    std::filesystem::create_directories(dir);
    const auto tmp = dir / fmt::format(".{}.tmp.{}.{}", file.filename().string(), ::getpid(), counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("cannot write " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place: " + file.string());
    }
}

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
    if (values.size() != header_.size()) throw std::logic_error("CsvTable: row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) body_ += ',';
        body_ += format_real(values[i]);
    }
    body_ += '\n';
    ++rows_;
}

std::string CsvTable::render() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i != 0) out += ',';
        out += header_[i];
    }
    out += '\n';
    return out + body_;
}

std::filesystem::path emit(const std::filesystem::path& dir, const std::string& name, const CsvTable& table,
                           nlohmann::json provenance) {
    const auto file = dir / name;
    write_atomic(file, table.render());
    provenance["file"] = name;
    provenance["rows"] = table.rows();
    write_atomic(std::filesystem::path(file).concat(".json"), provenance.dump(2) + "\n");
    return file;
}

}  // namespace lab
