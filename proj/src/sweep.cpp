#include "oamsec/sweep.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oamsec/error.hpp"
#include "oamsec/records.hpp"

namespace oamsec {

using nlohmann::json;

void SweepSpec::validate() const {
    static const std::set<std::string> known = {"P_total", "Q", "rho", "theta_Ay"};
    if (!known.count(parameter)) throw ConfigError("sweep.parameter: unknown parameter '" + parameter + "'");
    if (values.empty()) throw ConfigError("sweep.values: must be nonempty");
    if (seeds.empty()) throw ConfigError("sweep.seeds: must be nonempty");
    if (schemes.empty()) throw ConfigError("sweep.schemes: must be nonempty");
}

SweepSpec sweep_spec_from_json_text(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(source + ": expected an object");
    SweepSpec s;
    static const std::set<std::string> keys = {"parameter", "values", "seeds", "schemes", "scenario", "ao"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key())) throw ConfigError(source + "." + it.key() + ": unknown field");
    try {
        s.parameter = j.at("parameter").get<std::string>();
        s.values = j.at("values").get<std::vector<double>>();
        const json& seeds = j.at("seeds");
        if (seeds.is_number_integer()) {
            for (std::uint64_t i = 0; i < seeds.get<std::uint64_t>(); ++i) s.seeds.push_back(i);
        } else {
            s.seeds = seeds.get<std::vector<std::uint64_t>>();
        }
        for (const auto& id : j.at("schemes").get<std::vector<std::string>>()) s.schemes.push_back(parse_scheme(id));
        if (j.contains("scenario")) s.scenario = j.at("scenario").get<std::string>();
        if (j.contains("ao")) {
            const json& a = j.at("ao");
            for (auto it = a.begin(); it != a.end(); ++it) {
                const std::string& k = it.key();
                if (k == "outer_tolerance") s.ao.outer_tolerance = it->get<double>();
                else if (k == "max_outer_iters") s.ao.max_outer_iters = it->get<int>();
                else if (k == "rcg_max_iters") s.ao.rcg.max_iters = it->get<int>();
                else if (k == "rcg_grad_tolerance") s.ao.rcg.grad_tolerance = it->get<double>();
                else if (k == "convex_tolerance") s.ao.convex_tolerance = it->get<double>();
                else throw ConfigError(source + ".ao." + k + ": unknown field");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(source + ": " + e.what());
    }
    s.validate();
    return s;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("sweep spec '" + path + "' not found");
    std::stringstream ss;
    ss << in.rdbuf();
    return sweep_spec_from_json_text(ss.str(), path);
}

Scenario apply_parameter(const Scenario& base, const std::string& parameter, double value) {
    Scenario s = base;
    if (parameter == "P_total") {
        s.p_total = dbm_to_watts(value);
    } else if (parameter == "Q") {
        const int q = static_cast<int>(std::lround(value));
        s.set_ris_elements(q, q);
    } else if (parameter == "rho") {
        s.rho = value;
    } else if (parameter == "theta_Ay") {
        s.layout.alice.attitude.rot_y = value;
    } else {
        throw ConfigError("unknown sweep parameter '" + parameter + "'");
    }
    return s;
}

std::vector<ResultRecord> run_sweep(const SweepSpec& spec, const Scenario& scenario, const std::string& csv_path,
                                    const std::string& json_path, bool parallel) {
    spec.validate();
    struct Task {
        Scheme scheme;
        double value;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (Scheme sc : spec.schemes)
        for (double v : spec.values)
            for (std::uint64_t seed : spec.seeds) tasks.push_back({sc, v, seed});

    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot open '" + csv_path + "'", 0);
    write_result_header(out);
    out.flush();

    std::vector<ResultRecord> rows(tasks.size());
    std::size_t written = 0;
    std::exception_ptr failure;
    bool io_failed = false;
    const long long n = static_cast<long long>(tasks.size());

    auto compute = [&](long long i) {
        const Task& t = tasks[i];
        ResultRecord r = run_scheme(t.scheme, apply_parameter(scenario, spec.parameter, t.value), t.seed, spec.ao);
        r.parameter = spec.parameter;
        r.value = t.value;
        return r;
    };
    auto emit = [&](long long i) {
        if (io_failed) return;
        write_result_row(out, rows[i]);
        out.flush();
        if (!out) {
            io_failed = true;
            return;
        }
        ++written;
    };

#pragma omp parallel for ordered schedule(dynamic, 1) if (parallel)
    for (long long i = 0; i < n; ++i) {
        bool ok = true;
        try {
            rows[i] = compute(i);
        } catch (...) {
            ok = false;
#pragma omp critical(oamsec_sweep_failure)
            if (!failure) failure = std::current_exception();
        }
#pragma omp ordered
        if (ok) emit(i);
    }
    if (io_failed) throw IoError("write to '" + csv_path + "' failed", written);
    if (failure) std::rethrow_exception(failure);

    if (!json_path.empty()) {
        std::ofstream js(json_path);
        js << results_to_json(rows) << '\n';
        if (!js) throw IoError("write to '" + json_path + "' failed", written);
    }
    return rows;
}

}  // namespace oamsec
