#include "cpf/util/text_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cpf {

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf, ptr);
}

std::string format_double(double value, int significant_digits) {
    if (!std::isfinite(value)) {
        return format_double(value);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, value);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(std::string_view text, char delimiter) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(delimiter, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(text.substr(start));
            break;
        }
        parts.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

bool CsvTable::has_column(std::string_view name) const {
    for (const auto& h : header) {
        if (h == name) {
            return true;
        }
    }
    return false;
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    std::string available;
    for (const auto& h : header) {
        if (!available.empty()) {
            available += ", ";
        }
        available += h;
    }
    throw std::runtime_error("column '" + std::string(name) + "' not found; available columns: " + available);
}

namespace {

// Splits one record; double-quoted fields may hold commas and "" escapes.
std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"' && trim(cur).empty()) {
            cur.clear();
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            cells.emplace_back(was_quoted ? cur : std::string(trim(cur)));
            cur.clear();
            was_quoted = false;
        } else if (!was_quoted) {
            cur += c;
        }
    }
    cells.emplace_back(was_quoted ? cur : std::string(trim(cur)));
    return cells;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("file not found: " + path.string());
    }
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        auto view = trim(line);
        if (first) {
            // Tolerate a UTF-8 byte-order mark.
            if (view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") {
                view.remove_prefix(3);
            }
            table.header = split_record(view);
            first = false;
            continue;
        }
        if (view.empty()) {
            continue;
        }
        table.rows.push_back(split_record(view));
    }
    if (first) {
        throw std::runtime_error("empty file: " + path.string());
    }
    return table;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) {
    for (const auto& h : header) {
        cell(h);
    }
    end_row();
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    if (row_open_) {
        out_ += ',';
    }
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
        out_ += text;
    } else {
        out_ += '"';
        for (const char c : text) {
            if (c == '"') {
                out_ += "\"\"";
            } else {
                out_ += (c == '\n' || c == '\r') ? ' ' : c;
            }
        }
        out_ += '"';
    }
    row_open_ = true;
    return *this;
}

CsvWriter& CsvWriter::cell(double value) { return cell(format_double(value)); }

CsvWriter& CsvWriter::cell(long long value) { return cell(std::to_string(value)); }

void CsvWriter::end_row() {
    out_ += '\n';
    row_open_ = false;
}

}  // namespace cpf
