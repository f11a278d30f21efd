#include "cpf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cpf/errors.hpp"

namespace cpf {

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

namespace {

std::string where(const YAML::Node& n) {
    const auto m = n.Mark();
    if (m.line < 0) return "";
    return "line " + std::to_string(m.line + 1) + ": ";
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) { throw ParseError(where(n) + msg); }

void check_keys(const YAML::Node& section, const std::string& name, const std::set<std::string>& allowed) {
    if (!section.IsMap()) fail(section, "section '" + name + "' must be a mapping");
    for (const auto& kv : section) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in section '" + name + "'");
    }
}

std::string scalar(const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar()) fail(n, "'" + key + "' must be a scalar");
    return n.Scalar();
}

double parse_number(const YAML::Node& n, const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e || !std::isfinite(v)) fail(n, "'" + key + "' is not a finite number: '" + text + "'");
    return v;
}

double number(const YAML::Node& n, const std::string& key) { return parse_number(n, key, scalar(n, key)); }

int integer(const YAML::Node& n, const std::string& key) {
    const std::string t = scalar(n, key);
    int v = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail(n, "'" + key + "' is not an integer: '" + t + "'");
    return v;
}

std::uint64_t unsigned64(const YAML::Node& n, const std::string& key) {
    const std::string t = scalar(n, key);
    std::uint64_t v = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail(n, "'" + key + "' is not an unsigned integer: '" + t + "'");
    return v;
}

bool boolean(const YAML::Node& n, const std::string& key) {
    const std::string t = scalar(n, key);
    if (t == "true") return true;
    if (t == "false") return false;
    fail(n, "'" + key + "' must be true or false");
}

// "<number> <unit>" with unit kappa, MHz or kHz; a bare number is in kappa units.
double rate_over_kappa(const YAML::Node& n, const std::string& key, double kappa_mhz) {
    const std::string t = scalar(n, key);
    const auto sp = t.find_first_of(" \t");
    const std::string num = t.substr(0, sp);
    std::string unit = sp == std::string::npos ? "kappa" : t.substr(t.find_first_not_of(" \t", sp));
    const double v = parse_number(n, key, num);
    if (unit == "kappa") return v;
    if (unit == "MHz") return v / kappa_mhz;
    if (unit == "kHz") return v / (1e3 * kappa_mhz);
    fail(n, "'" + key + "' has unknown unit '" + unit + "' (expected kappa, MHz or kHz)");
}

template <class F>
auto enum_value(const YAML::Node& n, const std::string& key, F parse) {
    try {
        return parse(scalar(n, key));
    } catch (const ArgumentError& e) {
        fail(n, e.what());
    }
}

std::vector<double> number_list(const YAML::Node& n, const std::string& key) {
    if (!n.IsSequence()) fail(n, "'" + key + "' must be a list");
    std::vector<double> v;
    for (const auto& x : n) v.push_back(number(x, key));
    return v;
}

void parse_physical(const YAML::Node& s, PhysicalSection& p) {
    check_keys(s, "physical",
               {"kappa", "g", "gamma", "omega0", "B_mT", "delta_over_kappa", "delta_over_g", "cavity_split",
                "use_cg_scaling", "resonant_only"});
    if (s["kappa"]) {
        const std::string t = scalar(s["kappa"], "kappa");
        const auto sp = t.find_first_of(" \t");
        const std::string unit = sp == std::string::npos ? "" : t.substr(t.find_first_not_of(" \t", sp));
        if (unit != "MHz") fail(s["kappa"], "'kappa' must be given in MHz (e.g. '2 MHz')");
        p.kappa_mhz = parse_number(s["kappa"], "kappa", t.substr(0, sp));
        if (!(p.kappa_mhz > 0.0)) fail(s["kappa"], "'kappa' must be > 0");
    }
    if (s["g"]) p.g_over_kappa = rate_over_kappa(s["g"], "g", p.kappa_mhz);
    if (s["gamma"]) p.gamma_over_kappa = rate_over_kappa(s["gamma"], "gamma", p.kappa_mhz);
    if (s["omega0"]) p.omega0_over_kappa = rate_over_kappa(s["omega0"], "omega0", p.kappa_mhz);
    int fields = 0;
    for (const char* k : {"B_mT", "delta_over_kappa", "delta_over_g"}) {
        if (!s[k]) continue;
        if (++fields > 1) fail(s[k], "only one of B_mT, delta_over_kappa, delta_over_g may be given");
        p.field_value = number(s[k], k);
        p.field = std::string(k) == "B_mT"               ? FieldSpec::FieldMilliTesla
                  : std::string(k) == "delta_over_kappa" ? FieldSpec::DeltaOverKappa
                                                         : FieldSpec::DeltaOverG;
        if (p.field_value < 0.0) fail(s[k], std::string("'") + k + "' must be >= 0");
    }
    if (s["cavity_split"]) {
        const auto& c = s["cavity_split"];
        if (!c.IsSequence() || c.size() != 4) fail(c, "'cavity_split' must list 4 rates for L = -2, -1, +1, +2");
        for (std::size_t i = 0; i < 4; ++i) p.split_over_kappa[i] = rate_over_kappa(c[i], "cavity_split", p.kappa_mhz);
    }
    if (s["use_cg_scaling"]) p.use_cg_scaling = boolean(s["use_cg_scaling"], "use_cg_scaling");
    if (s["resonant_only"]) p.resonant_only = boolean(s["resonant_only"], "resonant_only");
}

void parse_pulse(const YAML::Node& s, PulseSection& p, double kappa_mhz) {
    check_keys(s, "pulse", {"shape", "sigma", "window_factor"});
    if (s["shape"]) p.shape = enum_value(s["shape"], "shape", parse_pulse_shape);
    if (s["sigma"]) p.sigma_over_kappa = rate_over_kappa(s["sigma"], "sigma", kappa_mhz);
    if (s["window_factor"]) p.window_factor = number(s["window_factor"], "window_factor");
}

void parse_grid(const YAML::Node& s, GridSection& g, double kappa_mhz) {
    check_keys(s, "grid", {"n_bins", "band"});
    if (s["n_bins"]) g.n_bins = integer(s["n_bins"], "n_bins");
    if (s["band"]) g.band_over_kappa = rate_over_kappa(s["band"], "band", kappa_mhz);
}

void parse_evolution(const YAML::Node& s, EvolutionSection& e) {
    check_keys(s, "evolution", {"dt", "method", "strict", "self_converge", "scatter_window", "channel_source"});
    if (s["dt"]) e.dt_kappa = number(s["dt"], "dt");
    if (s["method"]) e.method = enum_value(s["method"], "method", parse_method);
    if (s["strict"]) e.strict = boolean(s["strict"], "strict");
    if (s["self_converge"]) e.self_converge = boolean(s["self_converge"], "self_converge");
    if (s["scatter_window"]) e.scatter_window_kappa = number(s["scatter_window"], "scatter_window");
    if (s["channel_source"]) e.source = enum_value(s["channel_source"], "channel_source", parse_channel_source);
}

void parse_experiment(const YAML::Node& s, ExperimentSection& x) {
    check_keys(s, "experiment", {"axis", "points", "repeats", "seed", "shapes", "zeta"});
    if (s["axis"]) x.axis = enum_value(s["axis"], "axis", parse_sweep_axis);
    if (s["points"]) x.points = number_list(s["points"], "points");
    if (s["repeats"]) x.repeats = integer(s["repeats"], "repeats");
    if (s["seed"]) x.seed = unsigned64(s["seed"], "seed");
    if (s["shapes"]) {
        if (!s["shapes"].IsSequence()) fail(s["shapes"], "'shapes' must be a list");
        x.shapes.clear();
        for (const auto& n : s["shapes"]) x.shapes.push_back(enum_value(n, "shapes", parse_pulse_shape));
    }
    if (s["zeta"]) x.zeta = number(s["zeta"], "zeta");
}

void parse_output(const YAML::Node& s, OutputSection& o) {
    check_keys(s, "output", {"directory", "formats"});
    if (s["directory"]) o.directory = scalar(s["directory"], "directory");
    if (s["formats"]) {
        if (!s["formats"].IsSequence()) fail(s["formats"], "'formats' must be a list");
        o.formats.clear();
        for (const auto& n : s["formats"]) {
            const std::string f = scalar(n, "formats");
            if (f != "csv" && f != "json") fail(n, "unknown output format '" + f + "'");
            o.formats.push_back(f);
        }
    }
}

const char* field_key(FieldSpec f) {
    switch (f) {
        case FieldSpec::DeltaOverKappa: return "delta_over_kappa";
        case FieldSpec::DeltaOverG: return "delta_over_g";
        default: return "B_mT";
    }
}

std::string rate(double over_kappa) { return "\"" + format_double(over_kappa) + " kappa\""; }

}  // namespace

void RunConfig::validate() const {
    auto bad = [](const std::string& m) { throw ParseError(m); };
    if (!(physical.kappa_mhz > 0.0)) bad("physical.kappa must be > 0");
    if (!(physical.g_over_kappa >= 0.0)) bad("physical.g must be >= 0");
    if (!(physical.gamma_over_kappa >= 0.0)) bad("physical.gamma must be >= 0");
    if (!(physical.omega0_over_kappa > 0.0)) bad("physical.omega0 must be > 0");
    if (physical.field_value < 0.0) bad("physical field must be >= 0");
    if (!(pulse.sigma_over_kappa > 0.0)) bad("pulse.sigma must be > 0");
    if (!(pulse.window_factor > 0.0)) bad("pulse.window_factor must be > 0");
    if (grid.n_bins < 2) bad("grid.n_bins must be >= 2");
    if (grid.band_over_kappa < 0.0) bad("grid.band must be >= 0");
    if (!(evolution.dt_kappa > 0.0)) bad("evolution.dt must be > 0");
    if (!(evolution.scatter_window_kappa > 0.0)) bad("evolution.scatter_window must be > 0");
    if (experiment.repeats < 1) bad("experiment.repeats must be >= 1");
    if (experiment.shapes.empty()) bad("experiment.shapes must not be empty");
    if (!(experiment.zeta >= 0.0)) bad("experiment.zeta must be >= 0");
    if (output.formats.empty()) bad("output.formats must not be empty");
}

double RunConfig::kappa() const { return 2.0 * kPi * physical.kappa_mhz * 1e6; }

PhysicalConfig RunConfig::physical_config() const {
    const double k = kappa();
    PhysicalConfig c;
    c.kappa = k;
    c.g_ref = physical.g_over_kappa * k;
    c.gamma = physical.gamma_over_kappa * k;
    c.omega0 = physical.omega0_over_kappa * k;
    c.sigma_omega = pulse.sigma_over_kappa * k;
    switch (physical.field) {
        case FieldSpec::FieldMilliTesla: c.B = physical.field_value; break;
        case FieldSpec::DeltaOverKappa: c.B = field_for_delta(physical.field_value * k); break;
        case FieldSpec::DeltaOverG: c.B = field_for_delta(physical.field_value * c.g_ref); break;
    }
    for (std::size_t i = 0; i < 4; ++i) c.cavity_split[i] = physical.split_over_kappa[i] * k;
    c.use_cg_scaling = physical.use_cg_scaling;
    c.resonant_only = physical.resonant_only;
    return c;
}

SimulationSetup RunConfig::setup(int threads) const {
    SimulationSetup s;
    s.cfg = physical_config();
    s.shape = pulse.shape;
    s.numerics.n_bins = grid.n_bins;
    s.numerics.window_factor = pulse.window_factor;
    s.numerics.band_over_kappa = grid.band_over_kappa;
    s.numerics.dt_kappa = evolution.dt_kappa;
    s.numerics.method = evolution.method;
    s.numerics.self_converge = evolution.self_converge;
    s.numerics.scatter_window_kappa = evolution.scatter_window_kappa;
    s.numerics.source = evolution.source;
    s.numerics.strict = evolution.strict;
    s.threads = threads;
    return s;
}

bool RunConfig::wants(const std::string& format) const {
    return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ParseError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    RunConfig cfg;
    if (root.IsNull()) {
        cfg.validate();
        return cfg;
    }
    check_keys(root, "top level", {"physical", "pulse", "grid", "evolution", "experiment", "output"});
    try {
        if (root["physical"]) parse_physical(root["physical"], cfg.physical);
        if (root["pulse"]) parse_pulse(root["pulse"], cfg.pulse, cfg.physical.kappa_mhz);
        if (root["grid"]) parse_grid(root["grid"], cfg.grid, cfg.physical.kappa_mhz);
        if (root["evolution"]) parse_evolution(root["evolution"], cfg.evolution);
        if (root["experiment"]) parse_experiment(root["experiment"], cfg.experiment);
        if (root["output"]) parse_output(root["output"], cfg.output);
    } catch (const YAML::Exception& e) {
        throw ParseError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const RunConfig& c) {
    std::ostringstream os;
    const auto& p = c.physical;
    os << "physical:\n";
    os << "  kappa: \"" << format_double(p.kappa_mhz) << " MHz\"\n";
    os << "  g: " << rate(p.g_over_kappa) << "\n";
    os << "  gamma: " << rate(p.gamma_over_kappa) << "\n";
    os << "  omega0: " << rate(p.omega0_over_kappa) << "\n";
    os << "  " << field_key(p.field) << ": " << format_double(p.field_value) << "\n";
    os << "  cavity_split: [";
    for (std::size_t i = 0; i < 4; ++i) os << (i ? ", " : "") << rate(p.split_over_kappa[i]);
    os << "]\n";
    os << "  use_cg_scaling: " << (p.use_cg_scaling ? "true" : "false") << "\n";
    os << "  resonant_only: " << (p.resonant_only ? "true" : "false") << "\n";
    os << "pulse:\n";
    os << "  shape: " << to_string(c.pulse.shape) << "\n";
    os << "  sigma: " << rate(c.pulse.sigma_over_kappa) << "\n";
    os << "  window_factor: " << format_double(c.pulse.window_factor) << "\n";
    os << "grid:\n";
    os << "  n_bins: " << c.grid.n_bins << "\n";
    os << "  band: " << rate(c.grid.band_over_kappa) << "\n";
    os << "evolution:\n";
    os << "  dt: " << format_double(c.evolution.dt_kappa) << "\n";
    os << "  method: " << to_string(c.evolution.method) << "\n";
    os << "  strict: " << (c.evolution.strict ? "true" : "false") << "\n";
    os << "  self_converge: " << (c.evolution.self_converge ? "true" : "false") << "\n";
    os << "  scatter_window: " << format_double(c.evolution.scatter_window_kappa) << "\n";
    os << "  channel_source: " << to_string(c.evolution.source) << "\n";
    const auto& x = c.experiment;
    os << "experiment:\n";
    os << "  axis: " << to_string(x.axis) << "\n";
    os << "  points: [";
    for (std::size_t i = 0; i < x.points.size(); ++i) os << (i ? ", " : "") << format_double(x.points[i]);
    os << "]\n";
    os << "  repeats: " << x.repeats << "\n";
    os << "  seed: " << x.seed << "\n";
    os << "  shapes: [";
    for (std::size_t i = 0; i < x.shapes.size(); ++i) os << (i ? ", " : "") << to_string(x.shapes[i]);
    os << "]\n";
    os << "  zeta: " << format_double(x.zeta) << "\n";
    os << "output:\n";
    os << "  directory: \"" << c.output.directory << "\"\n";
    os << "  formats: [";
    for (std::size_t i = 0; i < c.output.formats.size(); ++i) os << (i ? ", " : "") << c.output.formats[i];
    os << "]\n";
    return os.str();
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : serialize(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cpf
