#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fscan/fdata.hpp"
#include "fscan/geometry.hpp"

namespace fscan {

// Sites CSV:  header `id,x,y`, one site per line, planar coordinates.
// Curves CSV: header `id,t_1,...,t_T` where the t_k are the numeric grid
//             times; one row of T values per site id.
// Both accept CRLF line ends, surrounding whitespace and double-quoted ids.

SiteGrid read_sites_csv(std::istream& in, std::string_view source = "sites");
SiteGrid read_sites_csv(const std::filesystem::path& path);

FunctionalDataset read_curves_csv(std::istream& in,
                                  std::string_view source = "curves");
FunctionalDataset read_curves_csv(const std::filesystem::path& path);

void write_sites_csv(std::ostream& out, const SiteGrid& grid);
void write_curves_csv(std::ostream& out, const FunctionalDataset& ds);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// Splits one CSV line on commas, trimming blanks and optional quotes.
std::vector<std::string> split_csv_line(std::string_view line);

double parse_double(std::string_view text, std::string_view what);

}  // namespace fscan
