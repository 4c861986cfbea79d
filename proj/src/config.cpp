#include "scatterlab/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace scatterlab::cli {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config::Config() {
    kv_ = {
        {"geometry.preset", "default-square"},  // default-square | rectangular-2 | custom
        {"geometry.aspect_num", "1"},
        {"geometry.aspect_den", "1"},
        {"geometry.x1x", "0"},
        {"geometry.x1y", "0"},
        {"geometry.x2x", "1.3012902845685732"},   // pi (sqrt2 - 1)
        {"geometry.x2y", "2.29980543911286"},     // pi (sqrt3 - 1)
        {"extension.preset", "rank2-sample"},
        {"extension.phase", "0"},
        {"extension.theta", "0"},
        {"extension.psi1", "0"},
        {"extension.psi2", "0"},
        {"solver.cutoff", "1e7"},
        {"solver.tol", "1e-8"},
        {"solver.margin", "1e-6"},
        {"solver.bottom_floor", "-1e3"},
        {"solver.phase_tracking", "0"},
        {"sieve.epsilon", "0.05"},
        {"sieve.delta", "0.2"},
        {"sieve.C1", "1.0"},
        {"sieve.c2_low", "0.5"},
        {"experiment.lambda_min", "1e3"},
        {"experiment.lambda_max", "1e5"},
        {"experiment.samples", "100"},
        {"spectrum.lambda_max", "500"},
        {"report.criteria", "all"},
        {"out.dir", "out"},
        {"cache.dir", "cache"},
        {"threads", "0"},  // 0: hardware concurrency
    };
}

Config Config::from_file(const std::string& path) {
    Config c;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: bad line: " + line);
        c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
}

void Config::set(const std::string& key, const std::string& value) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw std::invalid_argument("config: unknown key " + key);
    it->second = value;
}

void Config::apply_overrides(const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) set(k, v);
}

const std::string& Config::get(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw std::invalid_argument("config: unknown key " + key);
    return it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string& s = get(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::invalid_argument("config: non-numeric value for " + key + ": " + s);
    return v;
}

std::int64_t Config::get_int(const std::string& key) const {
    const double v = get_double(key);
    if (v != std::floor(v)) throw std::invalid_argument("config: non-integer value for " + key);
    return static_cast<std::int64_t>(v);
}

std::string Config::canonical() const {
    std::ostringstream out;
    for (const auto& [k, v] : kv_) out << k << "=" << v << "\n";  // std::map: sorted
    return out.str();
}

TorusGeometry Config::geometry() const {
    const std::string preset = get("geometry.preset");
    if (preset == "default-square") return default_geometry();
    if (preset == "rectangular-2") return rectangular_geometry(Rational::make(2, 1));
    if (preset == "custom") {
        const Rational aspect =
            Rational::make(get_int("geometry.aspect_num"), get_int("geometry.aspect_den"));
        return make_geometry(aspect, {get_double("geometry.x1x"), get_double("geometry.x1y")},
                             {get_double("geometry.x2x"), get_double("geometry.x2y")});
    }
    throw std::invalid_argument("config: unknown geometry.preset " + preset);
}

sieve::FilterParams Config::filter_params() const {
    sieve::FilterParams p;
    p.epsilon = get_double("sieve.epsilon");
    p.delta = get_double("sieve.delta");
    p.C1 = get_double("sieve.C1");
    p.c2_low = get_double("sieve.c2_low");
    p.validate();
    return p;
}

scattering::ExtensionU Config::extension() const {
    const std::string preset = get("extension.preset");
    if (preset == "custom") {
        return scattering::make_unitary(
            get_double("extension.phase"),
            {get_double("extension.theta"), get_double("extension.psi1"),
             get_double("extension.psi2")});
    }
    return scattering::preset_extension(preset);
}

scattering::ScanOptions Config::scan_options() const {
    scattering::ScanOptions opt;
    opt.solver.tol = get_double("solver.tol");
    opt.solver.margin_frac = get_double("solver.margin");
    opt.solver.phase_tracking = get_int("solver.phase_tracking") != 0;
    opt.bottom_floor = get_double("solver.bottom_floor");
    const auto t = get_int("threads");
    opt.threads = t > 0 ? static_cast<unsigned>(t) : default_threads();
    return opt;
}

double Config::solver_cutoff() const { return get_double("solver.cutoff"); }

void Config::validate() const {
    geometry();
    filter_params();
    extension();
    scan_options();
    if (!(solver_cutoff() >= 1e5)) throw std::invalid_argument("config: solver.cutoff too small");
    if (!(get_double("experiment.lambda_min") > 1.0))
        throw std::invalid_argument("config: experiment.lambda_min must exceed 1");
    if (!(get_double("experiment.lambda_max") > get_double("experiment.lambda_min")))
        throw std::invalid_argument("config: empty experiment range");
    if (get_int("experiment.samples") < 1)
        throw std::invalid_argument("config: experiment.samples must be positive");
    if (!(get_double("spectrum.lambda_max") > 0))
        throw std::invalid_argument("config: spectrum.lambda_max must be positive");
}

}  // namespace scatterlab::cli
