#include "rdbc/csv.hpp"

#include "rdbc/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rdbc {

void CsvTable::add_column(std::string name, std::vector<double> values)
{
    header.push_back(std::move(name));
    columns.push_back(std::move(values));
}

const std::vector<double>& CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return columns[i];
        }
    }
    throw std::out_of_range("no column '" + name + "'");
}

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text)
{
    const char* first = text.data();
    const char* last = first + text.size();
    while (first < last && (*first == ' ' || *first == '\t')) {
        ++first;
    }
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) {
        --last;
    }
    if (first < last && *first == '+') {
        ++first;
    }
    double v = 0.0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ConfigError("not a number: '" + text + "'");
    }
    return v;
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

std::string chomp(std::string s)
{
    if (!s.empty() && s.back() == '\r') {
        s.pop_back();
    }
    return s;
}

} // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    const std::size_t n = table.rows();
    for (const auto& c : table.columns) {
        if (c.size() != n) {
            throw DomainError("csv columns differ in length");
        }
    }
    std::ofstream out = open_out(path);
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        out << (j ? "," : "") << table.header[j];
    }
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            out << (j ? "," : "") << format_double(table.columns[j][i]);
        }
        out << '\n';
    }
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError(path.string() + ": empty csv");
    }
    table.header = split(chomp(line));
    table.columns.assign(table.header.size(), {});
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = chomp(line);
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != table.header.size()) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(table.header.size()) + " fields");
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            table.columns[j].push_back(parse_double(cells[j]));
        }
    }
    return table;
}

void write_constants_csv(const std::filesystem::path& path, const NamedValues& values)
{
    std::ofstream out = open_out(path);
    out << "name,value\n";
    for (const auto& [name, v] : values) {
        out << name << ',' << format_double(v) << '\n';
    }
}

NamedValues read_constants_csv(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path);
    std::string line;
    std::getline(in, line);
    NamedValues out;
    while (std::getline(in, line)) {
        line = chomp(line);
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError(path.string() + ": malformed row '" + line + "'");
        }
        out.emplace_back(line.substr(0, comma), parse_double(line.substr(comma + 1)));
    }
    return out;
}

} // namespace rdbc
