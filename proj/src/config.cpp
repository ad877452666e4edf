#include "flexent/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "flexent/errors.hpp"

namespace flexent {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ValidationError("config key '" + key + "': expected an integer, got '" + v + "'");
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

void for_each_config_field(
    Config& c, const std::function<void(const std::string&, FieldKind, void*)>& fn) {
    fn("pump_thz", FieldKind::Double, &c.pump_thz);
    fn("width_ghz", FieldKind::Double, &c.width_ghz);
    fn("count", FieldKind::Int, &c.count);
    fn("c_band_low_thz", FieldKind::Double, &c.c_band_low_thz);
    fn("c_band_high_thz", FieldKind::Double, &c.c_band_high_thz);
    fn("c_ports", FieldKind::Int, &c.c_ports);
    fn("l_band_low_thz", FieldKind::Double, &c.l_band_low_thz);
    fn("l_band_high_thz", FieldKind::Double, &c.l_band_high_thz);
    fn("l_ports", FieldKind::Int, &c.l_ports);
    fn("adjacent_leakage", FieldKind::Double, &c.adjacent_leakage);
    fn("extinction_floor", FieldKind::Double, &c.extinction_floor);
    fn("alpha_re", FieldKind::Double, &c.alpha_re);
    fn("alpha_im", FieldKind::Double, &c.alpha_im);
    fn("beta_re", FieldKind::Double, &c.beta_re);
    fn("beta_im", FieldKind::Double, &c.beta_im);
    fn("visibility", FieldKind::Double, &c.visibility);
    fn("local_rotation", FieldKind::String, &c.local_rotation);
    fn("coincidence_window_s", FieldKind::Double, &c.coincidence_window_s);
    fn("jsi_pair_rate", FieldKind::Double, &c.jsi_pair_rate);
    fn("jsi_pair_rate_backward", FieldKind::Double, &c.jsi_pair_rate_backward);
    fn("jsi_singles_rate", FieldKind::Double, &c.jsi_singles_rate);
    fn("jsi_integration_s", FieldKind::Double, &c.jsi_integration_s);
    fn("tomo_pair_rate", FieldKind::Double, &c.tomo_pair_rate);
    fn("tomo_singles_rate", FieldKind::Double, &c.tomo_singles_rate);
    fn("tomo_integration_s", FieldKind::Double, &c.tomo_integration_s);
    fn("mcmc_samples", FieldKind::Int, &c.mcmc_samples);
    fn("mcmc_burn_in", FieldKind::Int, &c.mcmc_burn_in);
    fn("mcmc_thinning", FieldKind::Int, &c.mcmc_thinning);
    fn("mcmc_beta", FieldKind::Double, &c.mcmc_beta);
}

void Config::validate() const {
    if (local_rotation != "random" && local_rotation != "identity")
        throw ValidationError("config: local_rotation must be 'random' or 'identity'");
    if (!(jsi_integration_s > 0.0) || !(tomo_integration_s > 0.0))
        throw ValidationError("config: integration times must be positive");
    c_wss(*this).validate();
    l_wss(*this).validate();
    // rates, amplitudes and window validated through SourceModel
    tomo_source(*this, 0).validate();
    jsi_source(*this, false, 0).validate();
    jsi_source(*this, true, 0).validate();
    mcmc_config(*this, 0).validate();
}

Config default_config() { return {}; }

namespace {

void set_key(Config& cfg, const std::string& key, const std::string& value) {
    bool found = false;
    for_each_config_field(cfg, [&](const std::string& name, FieldKind kind, void* p) {
        if (name != key) return;
        found = true;
        switch (kind) {
            case FieldKind::Double: *static_cast<double*>(p) = parse_double(key, value); break;
            case FieldKind::Int: *static_cast<int*>(p) = parse_int(key, value); break;
            case FieldKind::String: *static_cast<std::string*>(p) = value; break;
        }
    });
    if (!found) throw ValidationError("unknown config key '" + key + "'");
}

} // namespace

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": expected key=value, got '" + line + "'");
        try {
            set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ValidationError& e) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

void apply_override(Config& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw UsageError("--set expects key=value, got '" + assignment + "'");
    set_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::map<std::string, std::string> config_to_map(const Config& cfg) {
    std::map<std::string, std::string> out;
    // visitation never mutates here; const_cast confined to this adapter
    auto& mutable_cfg = const_cast<Config&>(cfg);
    for_each_config_field(mutable_cfg, [&](const std::string& name, FieldKind kind, void* p) {
        switch (kind) {
            case FieldKind::Double: out[name] = format_double(*static_cast<double*>(p)); break;
            case FieldKind::Int: out[name] = std::to_string(*static_cast<int*>(p)); break;
            case FieldKind::String: out[name] = *static_cast<std::string*>(p); break;
        }
    });
    return out;
}

WssSpec c_wss(const Config& cfg) {
    return {cfg.c_band_low_thz, cfg.c_band_high_thz, cfg.c_ports,
            cfg.adjacent_leakage, cfg.extinction_floor};
}

WssSpec l_wss(const Config& cfg) {
    return {cfg.l_band_low_thz, cfg.l_band_high_thz, cfg.l_ports,
            cfg.adjacent_leakage, cfg.extinction_floor};
}

namespace {

SourceModel base_source(const Config& cfg, std::uint64_t seed) {
    SourceModel m;
    m.alpha = Complex(cfg.alpha_re, cfg.alpha_im);
    m.beta = Complex(cfg.beta_re, cfg.beta_im);
    m.visibility = cfg.visibility;
    m.coincidence_window_s = cfg.coincidence_window_s;
    if (cfg.local_rotation == "random") m.local_rotation_seed = seed;
    return m;
}

} // namespace

SourceModel jsi_source(const Config& cfg, bool backward, std::uint64_t seed) {
    SourceModel m = base_source(cfg, seed);
    m.pair_rate = backward ? cfg.jsi_pair_rate_backward : cfg.jsi_pair_rate;
    m.singles_rate_s = cfg.jsi_singles_rate;
    m.singles_rate_i = cfg.jsi_singles_rate;
    return m;
}

SourceModel tomo_source(const Config& cfg, std::uint64_t seed) {
    SourceModel m = base_source(cfg, seed);
    m.pair_rate = cfg.tomo_pair_rate;
    m.singles_rate_s = cfg.tomo_singles_rate;
    m.singles_rate_i = cfg.tomo_singles_rate;
    return m;
}

McmcConfig mcmc_config(const Config& cfg, std::uint64_t chain_seed) {
    McmcConfig mc;
    mc.n_samples = cfg.mcmc_samples;
    mc.burn_in = cfg.mcmc_burn_in;
    mc.thinning = cfg.mcmc_thinning;
    mc.beta = cfg.mcmc_beta;
    mc.seed = chain_seed;
    return mc;
}

} // namespace flexent
