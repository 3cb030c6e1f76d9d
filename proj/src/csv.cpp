#include "cisjac/csv.hpp"

#include "cisjac/expr.hpp"

namespace cisjac {

std::vector<std::string> state_columns(std::size_t m, Chart chart, bool tangent) {
  const bool darboux = chart == Chart::darboux;
  std::vector<std::string> cols;
  const auto block = [&](const char* name) {
    for (std::size_t i = 1; i <= m; ++i) cols.push_back(name + std::to_string(i));
  };
  block(darboux ? "q" : "z");
  block(darboux ? "p" : "I");
  if (tangent) {
    block(darboux ? "dq" : "dz");
    block(darboux ? "dp" : "dI");
  }
  return cols;
}

void write_csv_header(std::ostream& os, std::span<const std::string> cols) {
  os << "t";
  for (const std::string& c : cols) os << "," << c;
  os << "\n";
}

void write_csv_row(std::ostream& os, double t, std::span<const double> values) {
  os << format_double(t);
  for (double v : values) os << "," << format_double(v);
  os << "\n";
}

}  // namespace cisjac
