#pragma once

#include "jjgz/pipeline/run.hpp"

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace jjgz {

inline constexpr const char* sweep_csv_header =
    "axis,value,delta_ix_over_ic,delta_ix_amperes,err,plateau_ok,C,Q1,K1,status";

/// Numbers use 17 significant digits; absent values are empty fields.
void write_rows_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_rows_json(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> read_rows_json(std::istream& in);

void write_probability_csv(std::ostream& out, std::span<const std::pair<double, double>> curve);
void write_probability_json(std::ostream& out, std::span<const std::pair<double, double>> curve, double width);

} // namespace jjgz
