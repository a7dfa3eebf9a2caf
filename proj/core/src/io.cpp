#include "fscan/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "fscan/error.hpp"

namespace fscan {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool blank(std::string_view line) { return trim(line).empty(); }

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return in;
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    auto field = trim(line.substr(start, comma == std::string_view::npos
                                             ? std::string_view::npos
                                             : comma - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = field.substr(1, field.size() - 2);
    }
    fields.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError(std::string(what) + ": '" + std::string(text) +
                          "' is not a number");
  }
  return v;
}

SiteGrid read_sites_csv(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank(line)) break;
  }
  if (lineno == 0 || blank(line)) {
    throw ValidationError(std::string(source) + ": empty sites file");
  }
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"id", "x", "y"}) {
    throw ValidationError(where(source, lineno) +
                          ": sites header must be 'id,x,y'");
  }

  std::vector<Site> sites;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3 || f[0].empty()) {
      throw ValidationError(where(source, lineno) +
                            ": expected 'id,x,y' with a non-empty id");
    }
    const auto loc = where(source, lineno);
    sites.push_back({f[0], parse_double(f[1], loc), parse_double(f[2], loc)});
  }
  return build_site_grid(std::move(sites));
}

SiteGrid read_sites_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_sites_csv(in, path.string());
}

FunctionalDataset read_curves_csv(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank(line)) break;
  }
  if (lineno == 0 || blank(line)) {
    throw ValidationError(std::string(source) + ": empty curves file");
  }
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "id") {
    throw ValidationError(where(source, lineno) +
                          ": curves header must be 'id,t_1,...,t_T' with T >= 2");
  }
  std::vector<double> grid;
  for (std::size_t k = 1; k < header.size(); ++k) {
    grid.push_back(parse_double(header[k], where(source, lineno) + " time"));
  }

  std::vector<std::string> ids;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size() || f[0].empty()) {
      throw ValidationError(where(source, lineno) + ": expected " +
                            std::to_string(header.size()) +
                            " fields with a non-empty id, got " +
                            std::to_string(f.size()));
    }
    ids.push_back(f[0]);
    const auto loc = where(source, lineno);
    for (std::size_t k = 1; k < f.size(); ++k) {
      values.push_back(parse_double(f[k], loc));
    }
  }
  if (ids.empty()) {
    throw ValidationError(std::string(source) + ": no curves");
  }
  return {std::move(ids), std::move(grid), std::move(values)};
}

FunctionalDataset read_curves_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_curves_csv(in, path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_sites_csv(std::ostream& out, const SiteGrid& grid) {
  out << "id,x,y\n";
  for (const Site& s : grid.sites()) {
    out << s.id << ',' << format_double(s.x) << ',' << format_double(s.y)
        << '\n';
  }
}

void write_curves_csv(std::ostream& out, const FunctionalDataset& ds) {
  out << "id";
  for (double t : ds.time_grid()) out << ',' << format_double(t);
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.ids()[i];
    for (double v : ds.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace fscan
