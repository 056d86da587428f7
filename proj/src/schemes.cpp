#include "oamsec/schemes.hpp"

#include <chrono>
#include <cmath>

#include "oamsec/error.hpp"

namespace oamsec {

namespace {

const std::vector<std::pair<Scheme, std::string>>& names() {
    static const std::vector<std::pair<Scheme, std::string>> n = {
        {Scheme::proposed, "proposed"},
        {Scheme::no_an, "pa-ris-oam-no-an"},
        {Scheme::random_phase, "pa-ris-oam-random-phase"},
        {Scheme::dp, "dp-ris-oam"},
        {Scheme::sa, "sa-ris-oam"},
        {Scheme::sp, "sp-ris-oam"},
        {Scheme::zc, "pa-ris-oam-zc"},
        {Scheme::mimo, "pa-ris-mimo"},
    };
    return n;
}

bool is_passive(Scheme s) { return s == Scheme::dp || s == Scheme::sp; }
bool is_single_ris(Scheme s) { return s == Scheme::sa || s == Scheme::sp; }

}  // namespace

Scheme parse_scheme(const std::string& id) {
    for (const auto& [s, n] : names())
        if (n == id) return s;
    throw ConfigError("unknown scheme '" + id + "'");
}

std::string scheme_name(Scheme s) {
    for (const auto& [k, n] : names())
        if (k == s) return n;
    return "unknown";
}

const std::vector<Scheme>& all_schemes() {
    static const std::vector<Scheme> all = [] {
        std::vector<Scheme> v;
        for (const auto& [s, n] : names()) v.push_back(s);
        return v;
    }();
    return all;
}

SchemeSetup setup_scheme(Scheme scheme, const Scenario& scenario, std::uint64_t seed) {
    scenario.validate();
    const Deployment dep = scenario.deployment();
    const int n = dep.alice.count;

    SchemeSetup out;
    SystemModel& m = out.model;
    switch (scheme) {
        case Scheme::no_an:
            m.codebook = enumerate_sn_pairs(n, scenario.n_a, scenario.n_a, 0);
            break;
        case Scheme::mimo:
            m.codebook = enumerate_sn_pairs(n, scenario.n_a, scenario.n_a, n - scenario.n_a);
            break;
        default:
            m.codebook = enumerate_sn_pairs(n, scenario.n_a, scenario.n_s, scenario.n_zz);
    }
    m.pair_index = 0;
    m.channels = is_single_ris(scheme)
                     ? build_single_ris_channel_set(dep, dep.ris1.count() + dep.ris2.count())
                     : build_channel_set(dep);
    if (scheme == Scheme::zc)
        m.basis = zc_basis(n, dep.alice.initial_azimuth, scenario.zc_root);
    else if (scheme == Scheme::mimo)
        m.basis = antenna_basis(n);
    else
        m.basis = oam_basis(n, dep.alice.initial_azimuth);

    m.noise = scenario.noise;
    m.rho = scheme == Scheme::no_an ? 1.0 : scenario.rho;
    m.a_max = scenario.a_max;
    if (is_passive(scheme)) {
        m.noise.sigma_r2 = 0.0;
        m.p_t = scenario.p_total;
        m.p_r2 = std::numeric_limits<double>::infinity();
    } else {
        m.p_t = scenario.p_t();
        m.p_r2 = scenario.p_r2();
    }
    m.p_th = scenario.p_th ? *scenario.p_th : 1e-3 * m.rho * m.p_t / m.n_s();

    out.start = initial_design(m, seed);
    if (is_single_ris(scheme)) out.start.ris.theta1 = cvec::Ones(m.channels.q1());
    if (is_passive(scheme)) out.start.ris.a = rvec::Ones(m.channels.q2());

    out.flags.theta1 = scheme != Scheme::random_phase && !is_single_ris(scheme);
    out.flags.theta2 = scheme != Scheme::random_phase;
    out.flags.amplifier = !is_passive(scheme);
    out.mmse_bob = scheme == Scheme::mimo;
    return out;
}

SchemeRun run_scheme_full(Scheme scheme, const Scenario& scenario, std::uint64_t seed, const AoConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    SchemeRun run;
    run.setup = setup_scheme(scheme, scenario, seed);
    run.ao = alternating_optimize(run.setup.model, run.setup.start, config, run.setup.flags);

    RateReport rep = run.ao.report;
    if (run.setup.mmse_bob) {
        const SystemModel& m = run.setup.model;
        const rvec g = sinr_bob_mmse(m.channels, run.ao.design.ris, m.pair(), m.basis.transmit, run.ao.design.p,
                                     m.noise);
        rep.gamma_b = g;
        rep.r_b = g.array().log1p().sum() / std::log(2.0);
        rep.c_b = rep.r_b + m.codebook.index_bits();
        rep.r_oam = rep.c_b - rep.r_e;
        run.ao.report = rep;
    }
    ResultRecord& r = run.record;
    r.scheme = scheme_name(scheme);
    r.seed = seed;
    r.r_oam = rep.r_oam;
    r.r_b = rep.r_b;
    r.r_e = rep.r_e;
    r.c_b = rep.c_b;
    r.iterations = static_cast<int>(run.ao.trace.records.size());
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

ResultRecord run_scheme(Scheme scheme, const Scenario& scenario, std::uint64_t seed, const AoConfig& config) {
    return run_scheme_full(scheme, scenario, seed, config).record;
}

}  // namespace oamsec
