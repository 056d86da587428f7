#include "oamsec/records.hpp"

#include <charconv>

#include <json.hpp>

namespace oamsec {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

template <typename Row>
void write_row(std::ostream& out, const Row& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_field(fields[i]);
    out << '\n';
}

std::vector<std::string> result_fields(const ResultRecord& r) {
    return {r.scheme,          r.parameter,         format_number(r.value), std::to_string(r.seed),
            format_number(r.r_oam), format_number(r.r_b), format_number(r.r_e), format_number(r.c_b),
            std::to_string(r.iterations), format_number(r.wall_time_s)};
}

std::vector<std::string> trace_fields(const AoRecord& r) {
    return {std::to_string(r.iter),     format_number(r.r_b),        format_number(r.r_e),
            format_number(r.c_b),       format_number(r.r_oam),      format_number(r.ris2_power),
            std::to_string(r.l1),       std::to_string(r.l2),        r.repaired ? "1" : "0"};
}

std::vector<std::string> ber_fields(const std::string& scheme, const BerPoint& p) {
    const Interval b = p.bob_ci(), e = p.eve_ci();
    return {scheme,
            format_number(p.snr_db),
            std::to_string(p.bob_errors),
            std::to_string(p.bob_bits),
            format_number(p.ber_bob()),
            format_number(b.low),
            format_number(b.high),
            std::to_string(p.eve_errors),
            std::to_string(p.eve_bits),
            format_number(p.ber_eve()),
            format_number(e.low),
            format_number(e.high)};
}

// Numeric-looking fields become JSON numbers, the rest strings.
nlohmann::json row_object(const std::vector<std::string>& cols, const std::vector<std::string>& fields,
                          const std::vector<bool>& numeric) {
    nlohmann::json o = nlohmann::json::object();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (numeric[i])
            o[cols[i]] = nlohmann::json::parse(fields[i], nullptr, false);  // discarded (null) for nan/inf
        else
            o[cols[i]] = fields[i];
    }
    return o;
}

}  // namespace

const std::vector<std::string>& result_columns() {
    static const std::vector<std::string> c = {"scheme", "parameter", "value",      "seed",       "R_OAM",
                                               "R_B",    "R_E",       "C_B",        "iterations", "wall_time_s"};
    return c;
}

void write_result_header(std::ostream& out) { write_row(out, result_columns()); }
void write_result_row(std::ostream& out, const ResultRecord& r) { write_row(out, result_fields(r)); }

const std::vector<std::string>& trace_columns() {
    static const std::vector<std::string> c = {"iter", "R_B", "R_E", "C_B", "R_OAM", "ris2_power", "L1", "L2",
                                               "repaired"};
    return c;
}

void write_trace_csv(std::ostream& out, const AoTrace& trace) {
    write_row(out, trace_columns());
    for (const AoRecord& r : trace.records) write_row(out, trace_fields(r));
}

const std::vector<std::string>& ber_columns() {
    static const std::vector<std::string> c = {"scheme",   "snr_db",     "bob_errors", "bob_bits",
                                               "ber_bob",  "bob_ci_low", "bob_ci_high", "eve_errors",
                                               "eve_bits", "ber_eve",    "eve_ci_low", "eve_ci_high"};
    return c;
}

void write_ber_csv(std::ostream& out, const std::string& scheme, const std::vector<BerPoint>& points, bool header) {
    if (header) write_row(out, ber_columns());
    for (const BerPoint& p : points) write_row(out, ber_fields(scheme, p));
}

std::string results_to_json(const std::vector<ResultRecord>& rows) {
    const std::vector<bool> numeric = {false, false, true, true, true, true, true, true, true, true};
    nlohmann::json arr = nlohmann::json::array();
    for (const ResultRecord& r : rows) arr.push_back(row_object(result_columns(), result_fields(r), numeric));
    return arr.dump(2);
}

std::string trace_to_json(const AoTrace& trace) {
    const std::vector<bool> numeric(trace_columns().size(), true);
    nlohmann::json arr = nlohmann::json::array();
    for (const AoRecord& r : trace.records) arr.push_back(row_object(trace_columns(), trace_fields(r), numeric));
    return arr.dump(2);
}

std::string ber_to_json(const std::string& scheme, const std::vector<BerPoint>& points) {
    std::vector<bool> numeric(ber_columns().size(), true);
    numeric[0] = false;
    nlohmann::json arr = nlohmann::json::array();
    for (const BerPoint& p : points) arr.push_back(row_object(ber_columns(), ber_fields(scheme, p), numeric));
    return arr.dump(2);
}

}  // namespace oamsec
