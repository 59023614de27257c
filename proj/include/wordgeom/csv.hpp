#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "wordgeom/common.hpp"

namespace wordgeom {

// RFC-4180-ish: comma separated, double quotes around fields that need
// them, "" escapes a quote. Enough for the survey and names files.
std::vector<std::string> split_csv_line(const std::string& line,
                                        std::uint64_t line_no);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index for a required header name.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

// Reads a CSV file with a required header row; blank lines skipped.
CsvTable read_csv(const std::string& path);

std::string csv_quote(const std::string& field);

}  // namespace wordgeom
