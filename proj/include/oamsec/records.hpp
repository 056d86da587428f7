#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "oamsec/ao.hpp"
#include "oamsec/ber.hpp"
#include "oamsec/schemes.hpp"

namespace oamsec {

// RFC 4180 quoting: wraps the field in quotes when it holds a comma, quote or newline.
std::string csv_field(const std::string& s);
// Shortest round-trippable decimal form.
std::string format_number(double v);

const std::vector<std::string>& result_columns();
void write_result_header(std::ostream& out);
void write_result_row(std::ostream& out, const ResultRecord& r);

const std::vector<std::string>& trace_columns();
void write_trace_csv(std::ostream& out, const AoTrace& trace);

const std::vector<std::string>& ber_columns();
void write_ber_csv(std::ostream& out, const std::string& scheme, const std::vector<BerPoint>& points,
                   bool header = true);

// JSON mirrors carrying the same rows as the CSV files, as arrays of objects.
std::string results_to_json(const std::vector<ResultRecord>& rows);
std::string trace_to_json(const AoTrace& trace);
std::string ber_to_json(const std::string& scheme, const std::vector<BerPoint>& points);

}  // namespace oamsec
