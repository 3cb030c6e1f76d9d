#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cisjac/system.hpp"

namespace cisjac {

// Column names for a flat state in the given layout: q1..qm, p1..pm and, for
// tangent states, dq1..dqm, dp1..dpm (z/I/dz/dI in an action-angle chart).
std::vector<std::string> state_columns(std::size_t m, Chart chart, bool tangent);

void write_csv_header(std::ostream& os, std::span<const std::string> cols);

// One row: the time followed by the values, shortest-round-trip formatted.
void write_csv_row(std::ostream& os, double t, std::span<const double> values);

}  // namespace cisjac
