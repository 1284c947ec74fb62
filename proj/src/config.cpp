#include "chns/config.hpp"

#include "chns/errors.hpp"
#include "chns/initial.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace chns {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v)
{
    if (v.empty())
        throw ConfigError("expected a number, got an empty value");
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || errno == ERANGE)
        throw ConfigError("expected a number, got '" + v + "'");
    return x;
}

long to_long(const std::string& v)
{
    char* end = nullptr;
    errno = 0;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
        throw ConfigError("expected an integer, got '" + v + "'");
    return x;
}

int to_int(const std::string& v)
{
    const long x = to_long(v);
    if (x < -2147483647L || x > 2147483647L)
        throw ConfigError("integer out of range: " + v);
    return static_cast<int>(x);
}

bool to_bool(const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError("expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double(trim(item)));
    return out;
}

std::string list_string(const std::vector<double>& xs)
{
    std::string s;
    for (std::size_t k = 0; k < xs.size(); ++k)
        s += (k ? ", " : "") + format_double(xs[k]);
    return s;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Table = std::map<std::string, std::map<std::string, Setter>>;

const Table& table()
{
    static const Table t = {
        {"grid",
         {
             {"nx", [](RunConfig& c, const std::string& v) { c.nx = to_int(v); }},
             {"ny", [](RunConfig& c, const std::string& v) { c.ny = to_int(v); }},
             {"lx", [](RunConfig& c, const std::string& v) { c.lx = to_double(v); }},
             {"ly", [](RunConfig& c, const std::string& v) { c.ly = to_double(v); }},
         }},
        {"physics",
         {
             {"A", [](RunConfig& c, const std::string& v) { c.physics.A = to_double(v); }},
             {"B", [](RunConfig& c, const std::string& v) { c.physics.B = to_double(v); }},
             {"chi", [](RunConfig& c, const std::string& v) { c.physics.chi = to_double(v); }},
             {"lambda", [](RunConfig& c, const std::string& v) { c.physics.lambda = to_double(v); }},
             {"alpha", [](RunConfig& c, const std::string& v) { c.physics.alpha = to_double(v); }},
             {"c0", [](RunConfig& c, const std::string& v) { c.physics.c0 = to_double(v); }},
             {"consumption", [](RunConfig& c, const std::string& v) { c.physics.consumption = to_double(v); }},
             {"eta1", [](RunConfig& c, const std::string& v) { c.physics.eta1 = to_double(v); }},
             {"eta2", [](RunConfig& c, const std::string& v) { c.physics.eta2 = to_double(v); }},
             {"h_kind",
              [](RunConfig&, const std::string& v) {
                  if (v != "linear")
                      throw ConfigError("h_kind supports only 'linear', got '" + v + "'");
              }},
             {"source", [](RunConfig& c, const std::string& v) { c.physics.source.kind = source_kind_from_string(v); }},
             {"source_amplitude", [](RunConfig& c, const std::string& v) { c.physics.source.amplitude = to_double(v); }},
             {"source_x0", [](RunConfig& c, const std::string& v) { c.physics.source.x0 = to_double(v); }},
             {"source_y0", [](RunConfig& c, const std::string& v) { c.physics.source.y0 = to_double(v); }},
             {"source_width", [](RunConfig& c, const std::string& v) { c.physics.source.width = to_double(v); }},
             {"source_decay", [](RunConfig& c, const std::string& v) { c.physics.source.decay = to_double(v); }},
             {"source_times", [](RunConfig& c, const std::string& v) { c.physics.source.times = to_list(v); }},
             {"source_values", [](RunConfig& c, const std::string& v) { c.physics.source.values = to_list(v); }},
         }},
        {"potential",
         {
             {"kind",
              [](RunConfig& c, const std::string& v) {
                  if (v == "logarithmic")
                      c.potential.kind = PotentialKind::logarithmic;
                  else if (v == "quartic")
                      c.potential.kind = PotentialKind::quartic;
                  else
                      throw ConfigError("potential kind must be logarithmic or quartic, got '" + v + "'");
              }},
             {"theta", [](RunConfig& c, const std::string& v) { c.potential.theta = to_double(v); }},
             {"theta0", [](RunConfig& c, const std::string& v) { c.potential.theta0 = to_double(v); }},
             {"eps_barrier", [](RunConfig& c, const std::string& v) { c.potential.eps_barrier = to_double(v); }},
         }},
        {"stepper",
         {
             {"dt", [](RunConfig& c, const std::string& v) { c.stepper.dt = to_double(v); }},
             {"dt_max", [](RunConfig& c, const std::string& v) { c.stepper.dt_max = to_double(v); }},
             {"dt_min", [](RunConfig& c, const std::string& v) { c.stepper.dt_min = to_double(v); }},
             {"cfl_max", [](RunConfig& c, const std::string& v) { c.stepper.cfl_max = to_double(v); }},
             {"adapt_dt", [](RunConfig& c, const std::string& v) { c.stepper.adapt_dt = to_bool(v); }},
             {"newton_tol", [](RunConfig& c, const std::string& v) { c.stepper.newton_tol = to_double(v); }},
             {"max_newton", [](RunConfig& c, const std::string& v) { c.stepper.max_newton = to_int(v); }},
             {"projection_tol", [](RunConfig& c, const std::string& v) { c.stepper.projection_tol = to_double(v); }},
             {"linear_tol", [](RunConfig& c, const std::string& v) { c.stepper.linear_tol = to_double(v); }},
             {"coupling",
              [](RunConfig& c, const std::string& v) {
                  if (v == "sequential")
                      c.stepper.coupling = Coupling::sequential;
                  else if (v == "picard")
                      c.stepper.coupling = Coupling::picard;
                  else
                      throw ConfigError("coupling must be sequential or picard, got '" + v + "'");
              }},
             {"picard_kmax", [](RunConfig& c, const std::string& v) { c.stepper.picard_kmax = to_int(v); }},
             {"picard_tol", [](RunConfig& c, const std::string& v) { c.stepper.picard_tol = to_double(v); }},
             {"interpolation",
              [](RunConfig& c, const std::string& v) {
                  if (v == "centered")
                      c.stepper.interp = FaceInterpolation::centered;
                  else if (v == "upwind")
                      c.stepper.interp = FaceInterpolation::upwind;
                  else
                      throw ConfigError("interpolation must be centered or upwind, got '" + v + "'");
              }},
             {"solve_nutrient", [](RunConfig& c, const std::string& v) { c.stepper.solve_nutrient = to_bool(v); }},
             {"solve_flow", [](RunConfig& c, const std::string& v) { c.stepper.solve_flow = to_bool(v); }},
         }},
        {"output",
         {
             {"dir", [](RunConfig& c, const std::string& v) { c.output.dir = v; }},
             {"csv_every", [](RunConfig& c, const std::string& v) { c.output.csv_every = to_int(v); }},
             {"snapshot_every", [](RunConfig& c, const std::string& v) { c.output.snapshot_every = to_int(v); }},
             {"format",
              [](RunConfig& c, const std::string& v) {
                  if (v == "ascii")
                      c.output.format = SnapshotEncoding::ascii;
                  else if (v == "binary")
                      c.output.format = SnapshotEncoding::binary;
                  else
                      throw ConfigError("format must be ascii or binary, got '" + v + "'");
              }},
             {"heatmap", [](RunConfig& c, const std::string& v) { c.output.heatmap = to_bool(v); }},
         }},
        {"experiment",
         {
             {"name", [](RunConfig& c, const std::string& v) { c.experiment.name = v; }},
             {"initial",
              [](RunConfig& c, const std::string& v) {
                  if (v != "spinodal" && v != "stripe" && v != "constant" && v != "snapshot")
                      throw ConfigError("initial must be spinodal, stripe, constant or snapshot, got '" + v + "'");
                  c.experiment.initial = v;
              }},
             {"seed",
              [](RunConfig& c, const std::string& v) {
                  char* end = nullptr;
                  errno = 0;
                  const auto x = std::strtoull(v.c_str(), &end, 10);
                  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno == ERANGE)
                      throw ConfigError("seed must be a nonnegative integer, got '" + v + "'");
                  c.experiment.seed = x;
              }},
             {"phi_mean", [](RunConfig& c, const std::string& v) { c.experiment.phi_mean = to_double(v); }},
             {"phi_amplitude", [](RunConfig& c, const std::string& v) { c.experiment.phi_amplitude = to_double(v); }},
             {"stripe_width", [](RunConfig& c, const std::string& v) { c.experiment.stripe_width = to_double(v); }},
             {"stripe_thickness",
              [](RunConfig& c, const std::string& v) { c.experiment.stripe_thickness = to_double(v); }},
             {"sigma0", [](RunConfig& c, const std::string& v) { c.experiment.sigma0 = to_double(v); }},
             {"vortex_amplitude",
              [](RunConfig& c, const std::string& v) { c.experiment.vortex_amplitude = to_double(v); }},
             {"phi_snapshot", [](RunConfig& c, const std::string& v) { c.experiment.phi_snapshot = v; }},
             {"sigma_snapshot", [](RunConfig& c, const std::string& v) { c.experiment.sigma_snapshot = v; }},
             {"t_end", [](RunConfig& c, const std::string& v) { c.experiment.t_end = to_double(v); }},
             {"steps", [](RunConfig& c, const std::string& v) { c.experiment.steps = to_long(v); }},
         }},
    };
    return t;
}

[[noreturn]] void fail_at(const std::string& origin, int line, std::size_t col, const std::string& msg)
{
    std::ostringstream os;
    os << origin << ':' << line << ':' << col << ": " << msg;
    throw ConfigError(os.str());
}

ScalarField initial_phase(const RunConfig& cfg, const Grid& g)
{
    const InitialSettings& e = cfg.experiment;
    if (e.initial == "spinodal")
        return spinodal_phase(g, e.phi_mean, e.phi_amplitude, e.seed);
    if (e.initial == "stripe")
        return stripe_phase(g, e.stripe_width, e.stripe_thickness);
    if (e.initial == "constant")
        return ScalarField(g, e.phi_mean);
    if (e.initial == "snapshot") {
        if (e.phi_snapshot.empty())
            throw ConfigError("initial = snapshot needs phi_snapshot");
        Snapshot s = read_snapshot(e.phi_snapshot);
        if (!(s.field.grid() == g))
            throw ConfigError("phi_snapshot grid does not match [grid]");
        return s.field;
    }
    throw ConfigError("unknown initial preset '" + e.initial + "'");
}

ScalarField initial_nutrient(const RunConfig& cfg, const Grid& g)
{
    if (cfg.experiment.sigma_snapshot.empty())
        return ScalarField(g, cfg.experiment.sigma0);
    Snapshot s = read_snapshot(cfg.experiment.sigma_snapshot);
    if (!(s.field.grid() == g))
        throw ConfigError("sigma_snapshot grid does not match [grid]");
    return s.field;
}

}  // namespace

Potential PotentialSettings::build() const
{
    return kind == PotentialKind::quartic ? Potential::quartic() : Potential::logarithmic(theta, theta0, eps_barrier);
}

std::string default_output_dir()
{
    const char* env = std::getenv("CHNS_OUTPUT_DIR");
    return env && *env ? env : "chns_output";
}

RunConfig parse_config(const std::string& text, const std::string& origin)
{
    RunConfig cfg;
    bool dt_given = false;
    std::string section;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string body = hash == std::string::npos ? raw : raw.substr(0, hash);
        const std::string line = trim(body);
        if (line.empty())
            continue;
        const std::size_t indent = body.find_first_not_of(" \t") + 1;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail_at(origin, line_no, indent + line.size() - 1, "expected ']' to close the section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!table().count(section))
                fail_at(origin, line_no, indent + 1, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            fail_at(origin, line_no, indent, "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            fail_at(origin, line_no, indent, "missing key before '='");
        if (section.empty())
            fail_at(origin, line_no, indent, "key '" + key + "' appears before any [section]");
        const auto& keys = table().at(section);
        const auto it = keys.find(key);
        if (it == keys.end())
            fail_at(origin, line_no, indent, "unknown key '" + key + "' in [" + section + "]");
        const std::size_t vcol = body.find_first_not_of(" \t", eq + 1);
        try {
            it->second(cfg, value);
        } catch (const ConfigError& e) {
            fail_at(origin, line_no, vcol == std::string::npos ? eq + 2 : vcol + 1, key + ": " + e.what());
        }
        if (section == "stepper" && key == "dt")
            dt_given = true;
    }
    if (cfg.output.dir.empty())
        cfg.output.dir = default_output_dir();
    cfg.physics.potential = cfg.potential.build();
    if (!dt_given && cfg.nx > 0 && cfg.ny > 0 && cfg.lx > 0 && cfg.ly > 0 && cfg.physics.B > 0) {
        const double h = std::min(cfg.lx / cfg.nx, cfg.ly / cfg.ny);
        double dt = 0.1 * h * h / cfg.physics.B;
        if (cfg.experiment.vortex_amplitude != 0.0) {
            // The discrete vortex has |u| <= 2 |amplitude| pi / min(lx, ly).
            const double umax = 2.0 * std::abs(cfg.experiment.vortex_amplitude) * 3.141592653589793 /
                                std::min(cfg.lx, cfg.ly);
            dt = std::min(dt, cfg.stepper.cfl_max * h / (2.0 * umax));
        }
        cfg.stepper.dt = dt;
    }
    return cfg;
}

RunConfig parse_and_validate(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    RunConfig cfg = parse_config(ss.str(), path.string());
    validate(cfg);
    return cfg;
}

void validate(const RunConfig& cfg)
{
    if (cfg.nx < 4 || cfg.ny < 4)
        throw ConfigError("grid needs nx, ny >= 4");
    if (!(cfg.lx > 0.0) || !(cfg.ly > 0.0))
        throw ConfigError("grid lengths must be positive");
    cfg.physics.validate();
    cfg.stepper.validate();
    if (cfg.output.csv_every < 0 || cfg.output.snapshot_every < 0)
        throw ConfigError("output cadences must be nonnegative");
    if (cfg.experiment.steps < 0 || cfg.experiment.t_end < 0.0)
        throw ConfigError("steps and t_end must be nonnegative");
    if (cfg.experiment.initial == "stripe" && !(cfg.experiment.stripe_thickness > 0.0))
        throw ConfigError("stripe_thickness must be positive");
    const Grid g = cfg.grid();
    const ScalarField phi = initial_phase(cfg, g);
    const double m = mean(phi);
    if (!(std::abs(m) < 1.0))
        throw ConfigError("initial phase must satisfy |mean(phi0)| < 1 (got " + format_double(m) + ")");
    if (linf_norm(phi) > 1.0)
        throw ConfigError("initial phase must satisfy |phi0| <= 1 everywhere");
    initial_nutrient(cfg, g);
}

std::string emit_config(const RunConfig& c)
{
    std::ostringstream os;
    auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
    auto num = [&](const char* k, double v) { kv(k, format_double(v)); };
    auto flag = [&](const char* k, bool v) { kv(k, v ? "true" : "false"); };

    os << "[grid]\n";
    kv("nx", std::to_string(c.nx));
    kv("ny", std::to_string(c.ny));
    num("lx", c.lx);
    num("ly", c.ly);

    const PhysParams& p = c.physics;
    os << "\n[physics]\n";
    num("A", p.A);
    num("B", p.B);
    num("chi", p.chi);
    if (p.lambda)
        num("lambda", *p.lambda);
    num("alpha", p.alpha);
    num("c0", p.c0);
    num("consumption", p.consumption);
    num("eta1", p.eta1);
    num("eta2", p.eta2);
    kv("h_kind", "linear");
    kv("source", to_string(p.source.kind));
    num("source_amplitude", p.source.amplitude);
    num("source_x0", p.source.x0);
    num("source_y0", p.source.y0);
    num("source_width", p.source.width);
    num("source_decay", p.source.decay);
    if (!p.source.times.empty())
        kv("source_times", list_string(p.source.times));
    if (!p.source.values.empty())
        kv("source_values", list_string(p.source.values));

    os << "\n[potential]\n";
    kv("kind", c.potential.kind == PotentialKind::quartic ? "quartic" : "logarithmic");
    num("theta", c.potential.theta);
    num("theta0", c.potential.theta0);
    num("eps_barrier", c.potential.eps_barrier);

    const StepperConfig& s = c.stepper;
    os << "\n[stepper]\n";
    num("dt", s.dt);
    if (s.dt_max)
        num("dt_max", *s.dt_max);
    num("dt_min", s.dt_min);
    num("cfl_max", s.cfl_max);
    flag("adapt_dt", s.adapt_dt);
    num("newton_tol", s.newton_tol);
    kv("max_newton", std::to_string(s.max_newton));
    num("projection_tol", s.projection_tol);
    num("linear_tol", s.linear_tol);
    kv("coupling", s.coupling == Coupling::picard ? "picard" : "sequential");
    kv("picard_kmax", std::to_string(s.picard_kmax));
    num("picard_tol", s.picard_tol);
    kv("interpolation", s.interp == FaceInterpolation::upwind ? "upwind" : "centered");
    flag("solve_nutrient", s.solve_nutrient);
    flag("solve_flow", s.solve_flow);

    os << "\n[output]\n";
    kv("dir", c.output.dir);
    kv("csv_every", std::to_string(c.output.csv_every));
    kv("snapshot_every", std::to_string(c.output.snapshot_every));
    kv("format", c.output.format == SnapshotEncoding::binary ? "binary" : "ascii");
    flag("heatmap", c.output.heatmap);

    const InitialSettings& e = c.experiment;
    os << "\n[experiment]\n";
    kv("name", e.name);
    kv("initial", e.initial);
    kv("seed", std::to_string(e.seed));
    num("phi_mean", e.phi_mean);
    num("phi_amplitude", e.phi_amplitude);
    num("stripe_width", e.stripe_width);
    num("stripe_thickness", e.stripe_thickness);
    num("sigma0", e.sigma0);
    num("vortex_amplitude", e.vortex_amplitude);
    if (!e.phi_snapshot.empty())
        kv("phi_snapshot", e.phi_snapshot);
    if (!e.sigma_snapshot.empty())
        kv("sigma_snapshot", e.sigma_snapshot);
    num("t_end", e.t_end);
    kv("steps", std::to_string(e.steps));
    return os.str();
}

SimState initial_state(const RunConfig& cfg)
{
    const Grid g = cfg.grid();
    const MacVelocity v = cfg.experiment.vortex_amplitude != 0.0 ? discrete_vortex(g, cfg.experiment.vortex_amplitude)
                                                                 : MacVelocity(g);
    return make_state(cfg.physics, v, initial_phase(cfg, g), initial_nutrient(cfg, g));
}

}  // namespace chns
