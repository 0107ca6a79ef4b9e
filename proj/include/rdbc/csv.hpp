#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace rdbc {

/// Column-oriented numeric table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    void add_column(std::string name, std::vector<double> values);
    /// Throws std::out_of_range for an unknown column.
    const std::vector<double>& column(const std::string& name) const;
    std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Inverse of format_double; throws ConfigError on malformed text.
double parse_double(const std::string& text);

/// Columns must share a length; throws DomainError otherwise, std::runtime_error on I/O failure.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

using NamedValues = std::vector<std::pair<std::string, double>>;

/// Two-column "name,value" file.
void write_constants_csv(const std::filesystem::path& path, const NamedValues& values);
NamedValues read_constants_csv(const std::filesystem::path& path);

} // namespace rdbc
