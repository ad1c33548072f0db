#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "version.hpp"

namespace dsinfer::cli {

Table::Table(std::string name, std::vector<std::string> columns)
    : name(std::move(name)), columns(std::move(columns)) {}

void Table::add(std::vector<Value> row) {
    if (row.size() != columns.size())
        throw std::logic_error("table '" + name + "': row width does not match the header");
    rows.push_back(std::move(row));
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string csv_value(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) return format_double(x);
            else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) return csv_field(x);
            else return std::to_string(x);
        },
        v);
}

nlohmann::ordered_json json_value(const Value& v) {
    return std::visit(
        [](const auto& x) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(x)) return nullptr;
                return x;
            } else {
                return x;
            }
        },
        v);
}

}  // namespace

void write_csv(const Report& report, std::ostream& out) {
    out << "# tool: " << tool_name << '\n';
    out << "# version: " << tool_version << '\n';
    out << "# command: " << report.command << '\n';
    out << "# config: " << report.config.dump() << '\n';
    bool first = true;
    for (const auto& t : report.tables) {
        if (!first) out << '\n';
        first = false;
        out << "# table: " << t.name << '\n';
        for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << csv_field(t.columns[c]);
        out << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_value(row[c]);
            out << '\n';
        }
    }
}

void write_json(const Report& report, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["tool"] = tool_name;
    doc["version"] = tool_version;
    doc["command"] = report.command;
    doc["config"] = report.config;
    nlohmann::ordered_json tables = nlohmann::ordered_json::object();
    for (const auto& t : report.tables) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            nlohmann::ordered_json r = nlohmann::ordered_json::array();
            for (const auto& v : row) r.push_back(json_value(v));
            rows.push_back(std::move(r));
        }
        tables[t.name] = {{"columns", t.columns}, {"rows", std::move(rows)}};
    }
    doc["tables"] = std::move(tables);
    out << doc.dump(2) << '\n';
}

}  // namespace dsinfer::cli
