// output.hpp: tabular results with metadata, written as CSV or JSON.
//
// CSV layout: `# key: value` metadata lines (command, units, notes, the
// resolved config as `# config: key = value`, optional component table),
// then a header row and the data rows. JSON mirrors the same fields.

#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace frf::cli {

struct Column {
    std::string name;
    std::string unit; // "ps", "ueV", "1/gamma", "gamma", "dimensionless", ...
};

/// A small secondary table (e.g. the spectral components) carried in the metadata.
struct SideTable {
    std::string name;
    std::vector<Column> columns;
    std::vector<std::vector<std::string>> rows; // preformatted cells
};

struct ResultTable {
    std::string command;
    std::vector<Column> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> status; // per row; empty vector: no status column
    std::vector<std::pair<std::string, std::string>> notes;
    std::vector<std::pair<std::string, std::string>> config;
    std::optional<SideTable> side;

    bool has_failures() const {
        for (const auto& s : status)
            if (s != "ok") return true;
        return false;
    }
};

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

inline std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

} // namespace detail

inline void write_csv(std::ostream& os, const ResultTable& t) {
    os << "# frf " << t.command << "\n";
    os << "# units:";
    for (std::size_t k = 0; k < t.columns.size(); ++k)
        os << (k ? ", " : " ") << t.columns[k].name << " [" << t.columns[k].unit << "]";
    os << "\n";
    for (const auto& [k, v] : t.notes) os << "# " << k << ": " << v << "\n";
    for (const auto& [k, v] : t.config) os << "# config: " << k << " = " << v << "\n";
    if (t.side) {
        os << "# " << t.side->name << ":";
        for (std::size_t k = 0; k < t.side->columns.size(); ++k)
            os << (k ? "," : " ") << t.side->columns[k].name << " [" << t.side->columns[k].unit << "]";
        os << "\n";
        for (const auto& row : t.side->rows) {
            os << "#  ";
            for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
            os << "\n";
        }
    }
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k].name;
    if (!t.status.empty()) os << ",status";
    os << "\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t k = 0; k < t.rows[r].size(); ++k) os << (k ? "," : "") << format_number(t.rows[r][k]);
        if (!t.status.empty()) os << "," << detail::csv_cell(t.status[r]);
        os << "\n";
    }
}

inline void write_json(std::ostream& os, const ResultTable& t) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["command"] = t.command;
    ordered_json units = ordered_json::object();
    ordered_json columns = ordered_json::array();
    for (const auto& c : t.columns) {
        columns.push_back(c.name);
        units[c.name] = c.unit;
    }
    doc["columns"] = columns;
    doc["units"] = units;
    ordered_json notes = ordered_json::object();
    for (const auto& [k, v] : t.notes) notes[k] = v;
    doc["notes"] = notes;
    ordered_json config = ordered_json::object();
    for (const auto& [k, v] : t.config) config[k] = v;
    doc["config"] = config;
    if (t.side) {
        ordered_json rows = ordered_json::array();
        for (const auto& row : t.side->rows) {
            ordered_json obj = ordered_json::object();
            for (std::size_t k = 0; k < row.size() && k < t.side->columns.size(); ++k)
                obj[t.side->columns[k].name] = row[k];
            rows.push_back(obj);
        }
        doc[t.side->name] = rows;
    }
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json r = ordered_json::array();
        for (double v : row) {
            if (std::isnan(v))
                r.push_back(nullptr);
            else
                r.push_back(ordered_json::parse(format_number(v)));
        }
        rows.push_back(r);
    }
    doc["rows"] = rows;
    if (!t.status.empty()) doc["status"] = t.status;
    os << doc.dump(2) << "\n";
}

} // namespace frf::cli
