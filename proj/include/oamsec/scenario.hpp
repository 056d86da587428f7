#pragma once

#include <optional>
#include <string>

#include "oamsec/channel.hpp"
#include "oamsec/oam.hpp"

namespace oamsec {

struct EvePosition {
    double distance = 40.0;
    double theta = 0.0;
    double varphi = -kPi / 20.0;
};

struct Scenario {
    std::string name = "custom";
    // Eve's UCA center is overwritten from eve_position by deployment().
    Deployment layout;
    EvePosition eve_position;
    NoiseLevels noise;  // watts
    double p_total = 1.0;
    double transmit_share = 0.9;
    double rho = 0.9;
    double a_max = 10.0;
    int n_a = 4;
    int n_s = 3;
    int n_zz = 3;
    std::optional<double> p_th;
    int zc_root = 1;

    double p_t() const { return transmit_share * p_total; }
    double p_r2() const { return (1.0 - transmit_share) * p_total; }
    // Explicit p_th, else 1e-3 * rho * P_T / N_s.
    double p_th_value() const;
    Deployment deployment() const;
    // Resize both RIS to q1 and q2 elements on near-square grids.
    void set_ris_elements(int q1, int q2);
    // Throws ConfigError naming the offending field.
    void validate() const;
};

// The published simulation parameters; radii, carrier, attenuations and Eve's range
// are the artifact's own defaults.
Scenario paper_default();
// paper_default geometry with a link budget in which every rate is nonzero.
Scenario desk_scenario();
// "paper_default" or "desk".
Scenario preset(const std::string& name);

// Path to a JSON scenario file, or a bare preset name.
Scenario load_scenario(const std::string& path_or_preset);
Scenario scenario_from_json_text(const std::string& text, const std::string& source = "scenario");
std::string scenario_to_json_text(const Scenario& s);

}  // namespace oamsec
