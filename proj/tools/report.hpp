#pragma once

// Tabular output shared by every subcommand. CSV carries the run metadata in
// "# key: value" lines and one "# table: name" section per table; JSON holds
// the same tables as {"columns": [...], "rows": [[...], ...]}.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace dsinfer::cli {

using Value = std::variant<double, std::int64_t, std::uint64_t, bool, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;

    Table(std::string name, std::vector<std::string> columns);
    void add(std::vector<Value> row);
};

struct Report {
    std::string command;
    nlohmann::ordered_json config;
    std::vector<Table> tables;
};

/// Text that reads back to the same double ("%.17g"); nan and
/// +/-inf are spelled out.
std::string format_double(double x);

void write_csv(const Report& report, std::ostream& out);
void write_json(const Report& report, std::ostream& out);

}  // namespace dsinfer::cli
