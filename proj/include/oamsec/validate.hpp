#pragma once

#include <cstdint>
#include <ostream>

#include "oamsec/ao.hpp"

namespace oamsec {

struct RandomModelOptions {
    int n = 4;
    int n_e = 4;
    int q1 = 6;
    int q2 = 6;
    int n_a = 2;
    int n_s = 2;
    int n_zz = 2;
    double p_t = 1.0;
    double rho = 0.8;
    double a_max = 4.0;
};

// I.i.d. complex Gaussian channels scaled so every SINR term is of order one.
SystemModel random_model(const RandomModelOptions& opt, std::uint64_t seed);
// Random unit-modulus phases, random feasible powers and gains.
DesignPoint random_design(const SystemModel& model, std::uint64_t seed);

// Quick invariant suite behind `oamsec validate`; prints one PASS/FAIL line per check.
bool run_validation(std::ostream& out);

}  // namespace oamsec
