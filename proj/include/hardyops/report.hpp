#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hardyops/errors.hpp"

namespace hardyops {

inline constexpr const char* kToolVersion = "hardyops 0.1.0";

/// Shortest decimal rendering that round-trips to the same double.
/// Non-finite values render as "inf", "-inf", "nan" in every format.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// One table cell: verbatim text, a real number, or an integer. Each
/// output format renders the numeric kinds its own way.
struct Cell {
    enum class Kind { Text, Real, Int };

    std::string text;
    Kind kind = Kind::Text;
    double numeric = 0.0;

    Cell(std::string t) : text(std::move(t)) {}
    Cell(const char* t) : text(t) {}
    Cell(double v) : text(format_double(v)), kind(Kind::Real), numeric(v) {}
    Cell(int v) : text(std::to_string(v)), kind(Kind::Int), numeric(v) {}
};

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

/// Fixed-header rectangular report, rendered as CSV (RFC 4180 quoting)
/// or json-lines (one object per row, keys in header order).
class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {
        if (header_.empty()) throw PreconditionError("Table: header must be nonempty");
    }

    void add_row(std::vector<Cell> cells) {
        if (cells.size() != header_.size())
            throw PreconditionError("Table: row width does not match header");
        rows_.push_back(std::move(cells));
    }

    std::string to_csv() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (i) out += ',';
            out += detail::csv_field(header_[i]);
        }
        out += '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += detail::csv_field(row[i].text);
            }
            out += '\n';
        }
        return out;
    }

    std::string to_jsonl() const {
        std::string out;
        for (const auto& row : rows_) {
            nlohmann::ordered_json obj;
            for (std::size_t i = 0; i < row.size(); ++i) {
                const Cell& c = row[i];
                if (c.kind == Cell::Kind::Int)
                    obj[header_[i]] = static_cast<long long>(std::llround(c.numeric));
                else if (c.kind == Cell::Kind::Real && std::isfinite(c.numeric))
                    obj[header_[i]] = c.numeric;
                else
                    obj[header_[i]] = c.text;
            }
            out += obj.dump();
            out += '\n';
        }
        return out;
    }

    std::string render(const std::string& format) const {
        if (format == "csv") return to_csv();
        if (format == "jsonl") return to_jsonl();
        throw PreconditionError("Table: unknown format '" + format + "'");
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

/// Writes to stdout when path is "-"; otherwise writes a sibling temp
/// file and renames it over the target, so readers never see a partial
/// report.
inline void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        std::fflush(stdout);
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw PreconditionError("write_output: cannot write " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw PreconditionError("write_output: cannot rename " + tmp + " over " + path);
}

}  // namespace hardyops
