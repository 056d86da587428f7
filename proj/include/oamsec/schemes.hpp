#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oamsec/ao.hpp"
#include "oamsec/scenario.hpp"

namespace oamsec {

enum class Scheme { proposed, no_an, random_phase, dp, sa, sp, zc, mimo };

Scheme parse_scheme(const std::string& id);
std::string scheme_name(Scheme s);
const std::vector<Scheme>& all_schemes();

// Optimizer inputs for one scheme: the system model, the starting design and which
// design blocks are free.
struct SchemeSetup {
    SystemModel model;
    DesignPoint start;
    AoFlags flags;
    bool mmse_bob = false;
};

SchemeSetup setup_scheme(Scheme scheme, const Scenario& scenario, std::uint64_t seed);

struct ResultRecord {
    std::string scheme;
    std::string parameter;
    double value = 0.0;
    std::uint64_t seed = 0;
    double r_oam = 0.0;
    double r_b = 0.0;
    double r_e = 0.0;
    double c_b = 0.0;
    int iterations = 0;
    double wall_time_s = 0.0;
};

struct SchemeRun {
    ResultRecord record;
    SchemeSetup setup;
    AoResult ao;
};

SchemeRun run_scheme_full(Scheme scheme, const Scenario& scenario, std::uint64_t seed, const AoConfig& config = {});
ResultRecord run_scheme(Scheme scheme, const Scenario& scenario, std::uint64_t seed, const AoConfig& config = {});

}  // namespace oamsec
