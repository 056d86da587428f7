// Command-line front end: optimize, sweep, ber, validate, codebook.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oamsec/ber.hpp"
#include "oamsec/error.hpp"
#include "oamsec/records.hpp"
#include "oamsec/schemes.hpp"
#include "oamsec/sweep.hpp"
#include "oamsec/validate.hpp"

using namespace oamsec;

namespace {

// "0,5,10" or "start:step:stop" (inclusive).
std::vector<double> parse_snr_list(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::stringstream ss(text);
        std::string a, b, c;
        std::getline(ss, a, ':');
        std::getline(ss, b, ':');
        std::getline(ss, c, ':');
        const double start = std::stod(a), step = std::stod(b), stop = std::stod(c);
        if (!(step > 0)) throw ConfigError("--snr step must be positive");
        for (double v = start; v <= stop + 1e-9 * step; v += step) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    if (out.empty()) throw ConfigError("--snr list is empty");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text << '\n';
    if (!out) throw IoError("write to '" + path + "' failed", 0);
}

int cmd_optimize(const std::string& scenario_path, std::uint64_t seed, const std::string& scheme_id,
                 const std::string& out_path, const std::string& json_path) {
    const Scenario sc = load_scenario(scenario_path);
    AoConfig cfg;
    cfg.seed = seed;
    const SchemeRun run = run_scheme_full(parse_scheme(scheme_id), sc, seed, cfg);
    std::ofstream out(out_path);
    write_trace_csv(out, run.ao.trace);
    if (!out) throw IoError("write to '" + out_path + "' failed", 0);
    if (!json_path.empty()) write_text(json_path, trace_to_json(run.ao.trace));
    const ResultRecord& r = run.record;
    std::cout << "scheme " << r.scheme << " seed " << r.seed << ": R_OAM " << r.r_oam << ", R_B " << r.r_b
              << ", R_E " << r.r_e << ", C_B " << r.c_b << " bits/s/Hz after " << r.iterations << " iterations"
              << (run.ao.converged ? "" : " (not converged)") << '\n';
    return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& scenario_override, const std::string& out_path,
              const std::string& json_path) {
    const SweepSpec spec = load_sweep_spec(spec_path);
    const std::string sc_path = !scenario_override.empty() ? scenario_override : spec.scenario.value_or("paper_default");
    const auto rows = run_sweep(spec, load_scenario(sc_path), out_path, json_path);
    std::cout << rows.size() << " rows written to " << out_path << '\n';
    return 0;
}

int cmd_ber(const std::string& scenario_path, const std::string& snr_text, int frames, std::uint64_t seed,
            const std::vector<std::string>& schemes, bool literal_snr, const std::string& out_path,
            const std::string& json_path) {
    const Scenario sc = load_scenario(scenario_path);
    const std::vector<double> snr = parse_snr_list(snr_text);
    std::ofstream out(out_path);
    bool header = true;
    std::string json_all = "[";
    for (const std::string& id : schemes) {
        const Scheme s = parse_scheme(id);
        AoConfig cfg;
        const SchemeRun run = run_scheme_full(s, sc, seed, cfg);
        BerOptions opt;
        opt.bob_mmse = run.setup.mmse_bob;
        opt.path_normalized_snr = !literal_snr;
        const auto pts = ber_monte_carlo(run.setup.model, run.ao.design, snr, frames, seed, opt);
        write_ber_csv(out, id, pts, header);
        header = false;
        json_all += (json_all.size() > 1 ? "," : "") + ber_to_json(id, pts);
    }
    if (!out) throw IoError("write to '" + out_path + "' failed", 0);
    if (!json_path.empty()) write_text(json_path, json_all + "]");
    std::cout << "BER for " << schemes.size() << " scheme(s) at " << snr.size() << " SNR point(s) written to "
              << out_path << '\n';
    return 0;
}

int cmd_codebook(int n, int na, int ns, int nz) {
    const OamCodebook cb = enumerate_sn_pairs(n, na, ns, nz);
    for (int g = 0; g < cb.g(); ++g) {
        std::cout << g << ",";
        for (int l : cb.pairs[g].signal) std::cout << ' ' << l;
        std::cout << ",";
        for (int l : cb.pairs[g].an) std::cout << ' ' << l;
        std::cout << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Double-RIS OAM secrecy-rate workbench"};
    app.require_subcommand(1);

    std::string scenario = "paper_default", out, json, scheme = "proposed", spec, snr = "0:2:20";
    std::uint64_t seed = 0;
    int frames = 10000;
    bool literal_snr = false;
    std::vector<std::string> ber_schemes = {"proposed", "pa-ris-mimo"};
    int n = 8, na = 4, ns = 3, nz = 3;

    auto* opt = app.add_subcommand("optimize", "Run the alternating optimization for one scheme and write the trace CSV");
    opt->add_option("--scenario", scenario, "Scenario JSON path or preset (paper_default, desk)");
    opt->add_option("--seed", seed, "Run seed");
    opt->add_option("--scheme", scheme, "Scheme id");
    opt->add_option("--out", out, "Trace CSV path")->required();
    opt->add_option("--json", json, "Optional JSON mirror of the trace");

    auto* sw = app.add_subcommand("sweep", "Run a parameter sweep and write ResultRecord rows");
    sw->add_option("--spec", spec, "Sweep spec JSON path")->required();
    std::string sweep_scenario;
    sw->add_option("--scenario", sweep_scenario, "Override the spec's scenario");
    sw->add_option("--out", out, "CSV path")->required();
    sw->add_option("--json", json, "Optional JSON mirror");

    auto* ber = app.add_subcommand("ber", "Optimize each scheme, then run the QPSK BER Monte Carlo");
    ber->add_option("--scenario", scenario, "Scenario JSON path or preset");
    ber->add_option("--snr", snr, "SNR list in dB: a,b,c or start:step:stop");
    ber->add_option("--frames", frames, "Frames per SNR point");
    ber->add_option("--seed", seed, "Seed for optimization and Monte Carlo");
    ber->add_option("--schemes", ber_schemes, "Scheme ids")->delimiter(',');
    ber->add_flag("--literal-snr", literal_snr, "Use P_T/sigma^2 without path-gain normalization");
    ber->add_option("--out", out, "CSV path")->required();
    ber->add_option("--json", json, "Optional JSON mirror");

    auto* val = app.add_subcommand("validate", "Run the invariant suite");

    auto* cbk = app.add_subcommand("codebook", "Print the SN-pair codebook");
    cbk->add_option("--N", n, "Total modes");
    cbk->add_option("--NA", na, "Low-order pool size");
    cbk->add_option("--Ns", ns, "Signal modes per pair");
    cbk->add_option("--Nz", nz, "AN modes per pair");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*opt) return cmd_optimize(scenario, seed, scheme, out, json);
        if (*sw) return cmd_sweep(spec, sweep_scenario, out, json);
        if (*ber) return cmd_ber(scenario, snr, frames, seed, ber_schemes, literal_snr, out, json);
        if (*val) return run_validation(std::cout) ? 0 : 1;
        if (*cbk) return cmd_codebook(n, na, ns, nz);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
