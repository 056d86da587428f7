#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oamsec/schemes.hpp"

namespace oamsec {

struct SweepSpec {
    std::string parameter;  // P_total (dBm), Q (Q1 = Q2), rho, theta_Ay (radians)
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
    std::vector<Scheme> schemes;
    AoConfig ao;
    std::optional<std::string> scenario;  // path or preset name

    void validate() const;
};

// {"parameter": "Q", "values": [...], "seeds": [..] or a count, "schemes": [...],
//  "scenario": "desk", "ao": {"outer_tolerance": .., "max_outer_iters": ..}}
SweepSpec sweep_spec_from_json_text(const std::string& text, const std::string& source = "sweep");
SweepSpec load_sweep_spec(const std::string& path);

Scenario apply_parameter(const Scenario& base, const std::string& parameter, double value);

// One row per (scheme, value, seed) in that nesting order. Rows are written to
// `csv_path` as each finishes; the optional JSON mirror is written at the end.
// parallel=false runs the reference serial loop.
std::vector<ResultRecord> run_sweep(const SweepSpec& spec, const Scenario& scenario, const std::string& csv_path,
                                    const std::string& json_path = "", bool parallel = true);

}  // namespace oamsec
