#include "oamsec/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oamsec/error.hpp"
#include "oamsec/log.hpp"

namespace oamsec {

namespace log {

namespace {
Sink& sink() {
    static Sink s = [](const std::string& m) { std::clog << "[warn] " << m << '\n'; };
    return s;
}
}  // namespace

Sink set_warning_sink(Sink s) {
    Sink old = std::move(sink());
    sink() = std::move(s);
    return old;
}

void warn(const std::string& message) {
    if (sink()) sink()(message);
}

}  // namespace log

using nlohmann::json;

double Scenario::p_th_value() const { return p_th ? *p_th : 1e-3 * rho * p_t() / n_s; }

Deployment Scenario::deployment() const {
    Deployment d = layout;
    d.eve.center = eve_center(eve_position.distance, eve_position.theta, eve_position.varphi);
    return d;
}

void Scenario::set_ris_elements(int q1, int q2) {
    std::tie(layout.ris1.count_y, layout.ris1.count_z) = grid_dims(q1);
    std::tie(layout.ris2.count_y, layout.ris2.count_z) = grid_dims(q2);
}

void Scenario::validate() const {
    auto need = [](bool ok, const std::string& field, const std::string& rule) {
        if (!ok) throw ConfigError(field + ": " + rule);
    };
    need(layout.links.wavelength > 0, "wavelength_m", "must be positive");
    for (const auto& [name, u] : {std::pair{"alice", &layout.alice}, {"bob", &layout.bob}, {"eve", &layout.eve}}) {
        need(u->count > 0, std::string(name) + ".count", "must be positive");
        need(u->radius > 0, std::string(name) + ".radius_m", "must be positive");
    }
    need(layout.bob.count == layout.alice.count, "bob.count", "must equal alice.count");
    for (const auto& [name, r] : {std::pair{"ris1", &layout.ris1}, {"ris2", &layout.ris2}}) {
        need(r->count_y > 0 && r->count_z > 0, std::string(name) + ".count_y/count_z", "must be positive");
        need(r->spacing_y > 0 && r->spacing_z > 0, std::string(name) + ".spacing", "must be positive");
    }
    const LinkParams& l = layout.links;
    need(l.beta_ar1 >= 0 && l.beta_r1r2 >= 0 && l.beta_r2b >= 0 && l.beta_ae >= 0 && l.beta_r1e >= 0, "attenuation",
         "factors must be nonnegative");
    need(eve_position.distance > 0, "eve.D_m", "must be positive");
    need(noise.sigma_b2 > 0, "noise.sigma_b2", "must be positive");
    need(noise.sigma_e2 > 0, "noise.sigma_e2", "must be positive");
    need(noise.sigma_r2 > 0, "noise.sigma_r2", "must be positive");
    need(p_total > 0, "power.total", "must be positive");
    need(transmit_share > 0 && transmit_share < 1, "power.transmit_share", "must lie in (0, 1)");
    need(rho > 0 && rho <= 1, "power.rho", "must lie in (0, 1]");
    need(a_max >= 0, "power.a_max", "must be nonnegative");
    need(!p_th || *p_th >= 0, "power.p_th_w", "must be nonnegative");
    need(1 <= n_s && n_s <= n_a && n_a <= layout.alice.count, "modes", "need 1 <= N_s <= N_A <= N");
    need(0 <= n_zz && n_zz <= layout.alice.count - n_a, "modes.N_zz", "must lie in [0, N - N_A]");
    need(layout.eve.count >= n_a, "eve.count", "must be at least N_A (Eve rows are indexed by mode)");
}

Scenario paper_default() {
    Scenario s;
    s.name = "paper_default";
    Deployment& d = s.layout;
    d.alice = UcaSpec{Vec3(0, 0, 0), 0.5, 8, 0.0, Attitude{0.0, kPi / 10}};
    d.bob = UcaSpec{Vec3(0, 0, 40), 0.5, 8, 0.0, Attitude{0.0, -kPi / 10}};
    d.eve = UcaSpec{Vec3::Zero(), 0.5, 8, 0.0, Attitude{-kPi / 4, -kPi / 4}};
    d.ris1 = RisSpec{Vec3(2, 0, 0.3), 5, 8, 0.05, 0.05, Attitude{0.0, kPi / 10}};
    d.ris2 = RisSpec{Vec3(1, 0, 39.7), 5, 8, 0.05, 0.05, Attitude{0.0, -kPi / 10}};
    d.links = LinkParams{};
    s.eve_position = EvePosition{};
    s.noise = NoiseLevels{dbm_to_watts(-20), dbm_to_watts(-20), dbm_to_watts(-60)};
    s.p_total = dbm_to_watts(30);
    s.transmit_share = 0.9;
    s.rho = 0.9;
    s.a_max = 10.0;
    s.n_a = 4;
    s.n_s = 3;
    s.n_zz = 3;
    return s;
}

Scenario desk_scenario() {
    Scenario s = paper_default();
    s.name = "desk";
    s.noise = NoiseLevels{dbm_to_watts(-90), dbm_to_watts(-50), dbm_to_watts(-100)};
    s.eve_position.distance = 10.0;
    s.layout.links.beta_ar1 = 10.0;
    s.layout.links.beta_r1r2 = 10.0;
    s.layout.links.beta_r2b = 10.0;
    s.set_ris_elements(12, 12);
    return s;
}

Scenario preset(const std::string& name) {
    if (name == "paper_default") return paper_default();
    if (name == "desk") return desk_scenario();
    throw ConfigError("unknown scenario preset '" + name + "'");
}

namespace {

// Walks one JSON object, remembering which keys were read so leftovers can be
// reported as unknown fields.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        used_.insert(key);
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
        return v.get<double>();
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        used_.insert(key);
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
        return v.get<int>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        used_.insert(key);
        const json& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
        return v.get<std::string>();
    }

    Vec3 vec3(const std::string& key, const Vec3& fallback) {
        if (!has(key)) return fallback;
        used_.insert(key);
        const json& v = j_.at(key);
        if (!v.is_array() || v.size() != 3) throw ConfigError(field(key) + ": expected [x, y, z]");
        Vec3 out;
        for (int i = 0; i < 3; ++i) {
            if (!v[i].is_number()) throw ConfigError(field(key) + ": expected [x, y, z]");
            out(i) = v[i].get<double>();
        }
        return out;
    }

    // Power or variance given either in watts (key_w) or dBm (key_dbm).
    double power(const std::string& key, double fallback) {
        const bool w = has(key + "_w"), dbm = has(key + "_dbm");
        if (w && dbm) throw ConfigError(field(key) + ": give either _w or _dbm, not both");
        if (w) return number(key + "_w", fallback);
        if (dbm) return dbm_to_watts(number(key + "_dbm", 0.0));
        return fallback;
    }

    Section child(const std::string& key) {
        used_.insert(key);
        return Section(j_.at(key), field(key));
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown field");
    }

    std::string field(const std::string& key) const { return path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

Attitude read_attitude(Section& s, const Attitude& a) {
    return Attitude{s.number("rot_x", a.rot_x), s.number("rot_y", a.rot_y)};
}

void read_uca(Section& parent, const std::string& key, UcaSpec& u, bool is_eve, EvePosition* pos) {
    if (!parent.has(key)) {
        log::warn(parent.field(key) + ".radius_m not set; using default " + std::to_string(u.radius) +
                  " m (artifact default, not a published value)");
        return;
    }
    Section s = parent.child(key);
    if (!s.has("radius_m"))
        log::warn(s.field("radius_m") + " not set; using default " + std::to_string(u.radius) +
                  " m (artifact default, not a published value)");
    u.radius = s.number("radius_m", u.radius);
    u.count = s.integer("count", u.count);
    u.initial_azimuth = s.number("initial_azimuth", u.initial_azimuth);
    u.attitude = read_attitude(s, u.attitude);
    if (is_eve) {
        pos->distance = s.number("D_m", pos->distance);
        pos->theta = s.number("theta", pos->theta);
        pos->varphi = s.number("varphi", pos->varphi);
    } else {
        u.center = s.vec3("center", u.center);
    }
    s.finish();
}

void read_ris(Section& parent, const std::string& key, RisSpec& r) {
    if (!parent.has(key)) return;
    Section s = parent.child(key);
    r.center = s.vec3("center", r.center);
    if (s.has("count")) {
        if (s.has("count_y") || s.has("count_z"))
            throw ConfigError(s.field("count") + ": give either count or count_y/count_z");
        std::tie(r.count_y, r.count_z) = grid_dims(s.integer("count", r.count()));
    }
    r.count_y = s.integer("count_y", r.count_y);
    r.count_z = s.integer("count_z", r.count_z);
    r.spacing_y = s.number("spacing_y_m", r.spacing_y);
    r.spacing_z = s.number("spacing_z_m", r.spacing_z);
    r.attitude = read_attitude(s, r.attitude);
    s.finish();
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + e.what());
    }
    Section root(j, source);
    Scenario s = preset(root.text("preset", "paper_default"));
    s.name = root.text("name", s.name);

    LinkParams& l = s.layout.links;
    if (root.has("wavelength_m") && root.has("carrier_hz"))
        throw ConfigError(source + ": give either wavelength_m or carrier_hz");
    if (root.has("carrier_hz")) l.wavelength = kSpeedOfLight / root.number("carrier_hz", 28e9);
    l.wavelength = root.number("wavelength_m", l.wavelength);

    read_uca(root, "alice", s.layout.alice, false, nullptr);
    read_uca(root, "bob", s.layout.bob, false, nullptr);
    read_uca(root, "eve", s.layout.eve, true, &s.eve_position);
    read_ris(root, "ris1", s.layout.ris1);
    read_ris(root, "ris2", s.layout.ris2);

    if (root.has("attenuation")) {
        Section a = root.child("attenuation");
        l.beta_ar1 = a.number("AR1", l.beta_ar1);
        l.beta_r1r2 = a.number("R1R2", l.beta_r1r2);
        l.beta_r2b = a.number("R2B", l.beta_r2b);
        l.beta_ae = a.number("AE", l.beta_ae);
        l.beta_r1e = a.number("R1E", l.beta_r1e);
        a.finish();
    }
    if (root.has("noise")) {
        Section n = root.child("noise");
        s.noise.sigma_b2 = n.power("sigma_b2", s.noise.sigma_b2);
        s.noise.sigma_e2 = n.power("sigma_e2", s.noise.sigma_e2);
        s.noise.sigma_r2 = n.power("sigma_r2", s.noise.sigma_r2);
        n.finish();
    }
    if (root.has("power")) {
        Section p = root.child("power");
        s.p_total = p.power("total", s.p_total);
        s.transmit_share = p.number("transmit_share", s.transmit_share);
        s.rho = p.number("rho", s.rho);
        s.a_max = p.number("a_max", s.a_max);
        if (p.has("p_th_w")) s.p_th = p.number("p_th_w", 0.0);
        p.finish();
    }
    if (root.has("modes")) {
        Section m = root.child("modes");
        s.n_a = m.integer("N_A", s.n_a);
        s.n_s = m.integer("N_s", s.n_s);
        s.n_zz = m.integer("N_zz", s.n_zz);
        s.zc_root = m.integer("zc_root", s.zc_root);
        m.finish();
    }
    root.finish();
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path_or_preset) {
    if (!std::filesystem::exists(path_or_preset)) {
        if (path_or_preset == "paper_default" || path_or_preset == "desk") return preset(path_or_preset);
        throw ConfigError("scenario file '" + path_or_preset + "' not found");
    }
    std::ifstream in(path_or_preset);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json_text(ss.str(), path_or_preset);
}

std::string scenario_to_json_text(const Scenario& s) {
    auto uca = [](const UcaSpec& u) {
        return json{{"radius_m", u.radius},
                    {"count", u.count},
                    {"initial_azimuth", u.initial_azimuth},
                    {"rot_x", u.attitude.rot_x},
                    {"rot_y", u.attitude.rot_y}};
    };
    auto ris = [](const RisSpec& r) {
        return json{{"center", {r.center.x(), r.center.y(), r.center.z()}},
                    {"count_y", r.count_y},
                    {"count_z", r.count_z},
                    {"spacing_y_m", r.spacing_y},
                    {"spacing_z_m", r.spacing_z},
                    {"rot_x", r.attitude.rot_x},
                    {"rot_y", r.attitude.rot_y}};
    };
    json j;
    j["name"] = s.name;
    j["wavelength_m"] = s.layout.links.wavelength;
    j["alice"] = uca(s.layout.alice);
    j["alice"]["center"] = {s.layout.alice.center.x(), s.layout.alice.center.y(), s.layout.alice.center.z()};
    j["bob"] = uca(s.layout.bob);
    j["bob"]["center"] = {s.layout.bob.center.x(), s.layout.bob.center.y(), s.layout.bob.center.z()};
    j["eve"] = uca(s.layout.eve);
    j["eve"]["D_m"] = s.eve_position.distance;
    j["eve"]["theta"] = s.eve_position.theta;
    j["eve"]["varphi"] = s.eve_position.varphi;
    j["ris1"] = ris(s.layout.ris1);
    j["ris2"] = ris(s.layout.ris2);
    const LinkParams& l = s.layout.links;
    j["attenuation"] = {{"AR1", l.beta_ar1}, {"R1R2", l.beta_r1r2}, {"R2B", l.beta_r2b}, {"AE", l.beta_ae},
                        {"R1E", l.beta_r1e}};
    j["noise"] = {{"sigma_b2_w", s.noise.sigma_b2}, {"sigma_e2_w", s.noise.sigma_e2},
                  {"sigma_r2_w", s.noise.sigma_r2}};
    j["power"] = {{"total_w", s.p_total}, {"transmit_share", s.transmit_share}, {"rho", s.rho}, {"a_max", s.a_max}};
    if (s.p_th) j["power"]["p_th_w"] = *s.p_th;
    j["modes"] = {{"N_A", s.n_a}, {"N_s", s.n_s}, {"N_zz", s.n_zz}, {"zc_root", s.zc_root}};
    return j.dump(2);
}

}  // namespace oamsec
