// cpfgate: command-line driver for the two-photon qudit phase gate simulations.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cpf/config.hpp"
#include "cpf/errors.hpp"
#include "cpf/experiments.hpp"
#include "cpf/parallel.hpp"

using namespace cpf;
using json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;
const char* kLabels[4] = {"-2", "-1", "+1", "+2"};

struct Context {
    RunConfig cfg;
    std::string hash;
    int threads = 0;
    std::filesystem::path dir;

    std::filesystem::path file(const std::string& name) const { return dir / name; }
};

std::string fmt(double v) { return format_double(v); }

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ArgumentError("cannot write '" + p.string() + "'");
    return os;
}

void write_json(const Context& ctx, const std::string& name, json body) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["config_hash"] = ctx.hash;
    for (auto& [k, v] : body.items()) doc[k] = v;
    auto os = open_out(ctx.file(name));
    os << doc.dump(2) << '\n';
}

void csv_header(std::ostream& os, const Context& ctx) { os << "# config_hash=" << ctx.hash << '\n'; }

std::string state_label(std::size_t i, std::size_t j) { return std::string("|") + kLabels[i] + "," + kLabels[j] + ">"; }

std::size_t label_index(const std::string& s) {
    const std::string t = (s == "1" || s == "2") ? "+" + s : s;
    for (std::size_t i = 0; i < 4; ++i)
        if (t == kLabels[i]) return i;
    throw ArgumentError("unknown qudit label '" + s + "' (expected -2, -1, +1 or +2)");
}

GateChannels channels_for(const Context& ctx) {
    GateChannels ch = compute_gate_channels(ctx.cfg.setup(resolve_threads(ctx.threads)));
    if (ch.max_leakage > 1e-2) std::cerr << "warning: max channel leakage " << ch.max_leakage << '\n';
    return ch;
}

GateOptions gate_options(const Context& ctx) {
    GateOptions o;
    o.strict = ctx.cfg.evolution.strict;
    return o;
}

int cmd_phase_scan(const Context& ctx, const std::string& channel, double range) {
    const SimulationSetup setup = ctx.cfg.setup(resolve_threads(ctx.threads));
    std::vector<Spin> spins;
    if (channel == "down" || channel == "both") spins.push_back(Spin::Down);
    if (channel == "up" || channel == "both") spins.push_back(Spin::Up);
    const AngularLabel L(+2);
    auto os = open_out(ctx.file("phase_scan.csv"));
    csv_header(os, ctx);
    os << "detuning_over_kappa,analytic_phase,numeric_phase,channel\n";
    double worst = 0.0;
    for (Spin s : spins) {
        for (const auto& r : phase_scan(setup, L, s, range)) {
            os << fmt(r.detuning_over_kappa) << ',' << fmt(r.analytic) << ',' << fmt(r.numeric) << ',' << to_string(s)
               << '\n';
            if (r.relative_mass > 0.01) worst = std::max(worst, std::abs(r.analytic - r.numeric));
        }
    }
    std::cout << "phase-scan: max |analytic - numeric| = " << worst << " rad over bins above 1% of peak mass\n";
    return 0;
}

int cmd_truth_table(const Context& ctx) {
    const GateChannels ch = channels_for(ctx);
    const TruthTable tt = truth_table(*ch.sim, *ch.reference, gate_options(ctx));
    double offdiag = 0.0;
    json entries = json::array();
    for (std::size_t in = 0; in < 16; ++in) {
        json e;
        e["input_state"] = state_label(in / 4, in % 4);
        e["fidelity"] = tt.fidelity[in];
        e["prob_down"] = tt.prob_down[in];
        e["signed_amplitude"] = tt.signed_amplitude[in][in];
        json pops = json::array();
        for (std::size_t o = 0; o < 16; ++o) {
            pops.push_back(tt.populations[in][o]);
            if (o != in) offdiag = std::max(offdiag, tt.populations[in][o]);
        }
        e["populations"] = pops;
        entries.push_back(e);
    }
    if (ctx.cfg.wants("json")) {
        json body;
        body["mean_fidelity"] = tt.mean_fidelity;
        body["max_offdiagonal_population"] = offdiag;
        body["entries"] = entries;
        write_json(ctx, "truth_table.json", body);
    }
    if (ctx.cfg.wants("csv")) {
        auto os = open_out(ctx.file("truth_table.csv"));
        csv_header(os, ctx);
        os << "input";
        for (std::size_t o = 0; o < 16; ++o) os << ',' << state_label(o / 4, o % 4);
        os << ",signed_amplitude,fidelity\n";
        for (std::size_t in = 0; in < 16; ++in) {
            os << state_label(in / 4, in % 4);
            for (std::size_t o = 0; o < 16; ++o) os << ',' << fmt(tt.populations[in][o]);
            os << ',' << fmt(tt.signed_amplitude[in][in]) << ',' << fmt(tt.fidelity[in]) << '\n';
        }
    }
    std::cout << "truth-table: mean fidelity " << tt.mean_fidelity << ", max off-diagonal population " << offdiag << '\n';
    return 0;
}

int cmd_gate_run(const Context& ctx, const std::string& input) {
    const auto comma = input.find(',');
    if (comma == std::string::npos) throw ArgumentError("--input expects two labels, e.g. -2,+1");
    const std::size_t i = label_index(input.substr(0, comma)), j = label_index(input.substr(comma + 1));
    const GateChannels ch = channels_for(ctx);
    GateEvaluator ev(ch.sim, ch.reference);
    const GateResult r = ev.run(TwoPhotonState::product(QuditState::basis(i), QuditState::basis(j)), gate_options(ctx));
    json body;
    body["input_state"] = state_label(i, j);
    body["outcome_probs"] = {{"down", r.outcome_probs[0]}, {"up", r.outcome_probs[1]}};
    body["fidelity"] = {{"down", r.fidelity[0]}, {"up", r.fidelity[1]}};
    body["combined_fidelity"] = r.combined_fidelity;
    body["max_channel_leakage"] = ch.max_leakage;
    write_json(ctx, "gate_run.json", body);
    std::cout << "gate-run " << state_label(i, j) << ": fidelity down " << r.fidelity[0] << ", up " << r.fidelity[1]
              << '\n';
    return 0;
}

void write_curve(std::ostream& os, const SweepCurve& c, const std::string& prefix) {
    for (const auto& p : c.points) {
        os << prefix << fmt(p.x) << ',' << fmt(p.infidelity) << ',' << fmt(p.infidelity_up) << ',' << fmt(p.std_error)
           << '\n';
    }
}

SweepSpec spec_from(const Context& ctx, SweepAxis axis, std::vector<double> defaults) {
    SweepSpec s;
    s.axis = axis;
    s.points = ctx.cfg.experiment.points.empty() ? std::move(defaults) : ctx.cfg.experiment.points;
    s.repeats = ctx.cfg.experiment.repeats;
    s.seed = ctx.cfg.experiment.seed;
    return s;
}

int cmd_sweep_detuning(const Context& ctx) {
    const SweepSpec spec = spec_from(ctx, SweepAxis::DetuningRatio, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    const SweepCurve c = sweep_detuning(ctx.cfg.setup(resolve_threads(ctx.threads)), spec);
    auto os = open_out(ctx.file("sweep_detuning.csv"));
    csv_header(os, ctx);
    os << "delta_over_g,infidelity,infidelity_up,stderr\n";
    write_curve(os, c, "");
    std::cout << "sweep-detuning: 1-F_G at delta/g=" << c.points.back().x << " is " << c.points.back().infidelity << '\n';
    return 0;
}

int cmd_sweep_bandwidth(const Context& ctx) {
    const SweepSpec spec = spec_from(ctx, SweepAxis::Bandwidth, {0.2, 0.4, 0.6, 0.8, 1.0, 1.2});
    auto os = open_out(ctx.file("sweep_bandwidth.csv"));
    csv_header(os, ctx);
    os << "shape,sigma_over_kappa,infidelity,infidelity_up,stderr\n";
    std::ostringstream summary;
    for (PulseShape shape : ctx.cfg.experiment.shapes) {
        const SweepCurve c = sweep_bandwidth(ctx.cfg.setup(resolve_threads(ctx.threads)), spec, shape);
        write_curve(os, c, c.label + ",");
        summary << ' ' << c.label << '=' << c.points.back().infidelity;
    }
    std::cout << "sweep-bandwidth: 1-F_G at the last point" << summary.str() << '\n';
    return 0;
}

int cmd_sweep_noise(const Context& ctx) {
    const SweepSpec spec = spec_from(ctx, SweepAxis::NoiseSigma, {0.0, 0.05, 0.1, 0.15, 0.2, 0.25});
    const GateChannels ch = channels_for(ctx);
    const SweepCurve c = sweep_mw_noise(ch, spec, resolve_threads(ctx.threads));
    auto os = open_out(ctx.file("sweep_noise.csv"));
    csv_header(os, ctx);
    os << "zeta,infidelity,infidelity_up,stderr\n";
    write_curve(os, c, "");
    std::cout << "sweep-noise: 1-F at zeta=" << c.points.back().x << " is " << c.points.back().infidelity << " +- "
              << c.points.back().std_error << '\n';
    return 0;
}

int cmd_error_budget(const Context& ctx) {
    const SimulationSetup setup = ctx.cfg.setup(resolve_threads(ctx.threads));
    ErrorBudgetOptions opt;
    opt.zeta = ctx.cfg.experiment.zeta;
    opt.noise_repeats = ctx.cfg.experiment.repeats;
    opt.seed = ctx.cfg.experiment.seed;
    opt.cavity_split = setup.cfg.cavity_split;
    const ErrorBudget b = error_budget(setup, opt);
    const std::vector<std::pair<std::string, double>> rows = {
        {"pulse_shape_distortion", b.distortion},       {"unwanted_transitions", b.unwanted},
        {"cavity_mode_splitting", b.cavity_split},      {"coupling_fluctuation", b.g_fluctuation},
        {"microwave_noise", b.mw_noise},                {"total_full_model", b.total}};
    if (ctx.cfg.wants("json")) {
        json body;
        json r;
        for (const auto& [k, v] : rows) r[k] = v;
        body["rows"] = r;
        body["microwave_noise_stderr"] = b.mw_noise_stderr;
        body["zeta"] = b.zeta;
        json split = json::array();
        for (double s : b.split_used) split.push_back(s / (2.0 * kPi * 1e3));
        body["cavity_split_khz"] = split;
        body["g_factors"] = b.g_factors;
        write_json(ctx, "error_budget.json", body);
    }
    if (ctx.cfg.wants("csv")) {
        auto os = open_out(ctx.file("error_budget.csv"));
        csv_header(os, ctx);
        os << "# g ensemble: uniform";
        for (double g : b.g_factors) os << ' ' << fmt(g);
        os << " x g; zeta=" << fmt(b.zeta) << '\n';
        os << "row,infidelity\n";
        for (const auto& [k, v] : rows) os << k << ',' << fmt(v) << '\n';
    }
    std::cout << "error-budget: distortion " << b.distortion << ", unwanted " << b.unwanted << ", split "
              << b.cavity_split << ", g " << b.g_fluctuation << ", noise " << b.mw_noise << '\n';
    return 0;
}

int cmd_oracle_check(const Context& ctx, int n_bins, int inputs) {
    SimulationSetup setup = ctx.cfg.setup(1);
    setup.numerics.n_bins = n_bins;
    setup.numerics.band_over_kappa = 0.0;
    setup.numerics.method = Method::KrylovExp;
    setup.numerics.dt_kappa = std::max(setup.numerics.dt_kappa, 1e-2);
    const GateChannels ch = compute_gate_channels(setup);
    GateEvaluator ev(ch.sim, ch.reference);
    DirectSetup ds;
    ds.cfg = setup.cfg;
    ds.grid = ch.grid;
    ds.profile = ch.profile;
    ds.scatter_window = ch.scatter_window;
    ds.arrival = ch.arrival;
    ds.params = setup_params(setup);
    ds.max_bins = std::max(8, n_bins);

    std::mt19937_64 rng(stream_seed(ctx.cfg.experiment.seed, 0, 0));
    std::normal_distribution<double> nd;
    std::vector<TwoPhotonState> states(static_cast<std::size_t>(inputs));
    for (auto& st : states) {
        double n = 0.0;
        for (auto& row : st.amps)
            for (auto& a : row) {
                a = cplx(nd(rng), nd(rng));
                n += std::norm(a);
            }
        for (auto& row : st.amps)
            for (auto& a : row) a /= std::sqrt(n);
    }
    std::vector<double> diff(states.size());
    parallel_for(states.size(), resolve_threads(ctx.threads), [&](std::size_t k) {
        const GateResult rc = ev.run(states[k]);
        const GateResult rd = run_gate_direct(states[k], ds, *ch.reference);
        diff[k] = std::max(std::abs(rc.fidelity[0] - rd.fidelity[0]), std::abs(rc.fidelity[1] - rd.fidelity[1]));
    });
    double worst = 0.0;
    for (double d : diff) worst = std::max(worst, d);
    json body;
    body["n_bins"] = n_bins;
    body["inputs"] = inputs;
    body["max_fidelity_discrepancy"] = worst;
    body["discrepancies"] = diff;
    write_json(ctx, "oracle_check.json", body);
    std::cout << "oracle-check: max channel/direct fidelity discrepancy " << worst << " over " << inputs << " inputs\n";
    if (ctx.cfg.evolution.strict && worst > 1e-6) throw ToleranceError("channel/direct discrepancy above 1e-6");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-photon qudit controlled-phase gate simulator"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    int threads = 0;
    app.add_option("-c,--config", config_path, "YAML run configuration");
    app.add_option("-o,--out", out_dir, "output directory (overrides output.directory)");
    app.add_option("-j,--threads", threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    std::string channel = "both";
    double range = 3.0;
    auto* phase = app.add_subcommand("phase-scan", "reflection phase versus detuning, analytic and simulated");
    phase->add_option("--channel", channel, "ion branch: down, up or both")->check(CLI::IsMember({"down", "up", "both"}));
    phase->add_option("--range", range, "half-width of the scan in units of kappa");

    auto* tt = app.add_subcommand("truth-table", "16-input truth table");
    std::string input = "-2,+2";
    auto* run = app.add_subcommand("gate-run", "single input through the gate");
    run->add_option("--input", input, "photon labels, e.g. -2,+1");
    auto* sd = app.add_subcommand("sweep-detuning", "gate infidelity versus delta/g");
    auto* sb = app.add_subcommand("sweep-bandwidth", "gate infidelity versus pulse bandwidth");
    auto* sn = app.add_subcommand("sweep-noise", "gate infidelity versus microwave area noise");
    auto* eb = app.add_subcommand("error-budget", "error contributions table");
    int n_bins = 8, inputs = 20;
    auto* oc = app.add_subcommand("oracle-check", "channel composition against the direct two-photon simulation");
    oc->add_option("--n-bins", n_bins, "frequency bins (<= 8 recommended)")->check(CLI::PositiveNumber);
    oc->add_option("--inputs", inputs, "random input states")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        Context ctx;
        ctx.cfg = config_path.empty() ? parse_config("") : load_config(config_path);
        ctx.hash = config_hash(ctx.cfg);
        if (!out_dir.empty()) ctx.cfg.output.directory = out_dir;
        ctx.threads = threads;
        ctx.dir = ctx.cfg.output.directory;
        std::filesystem::create_directories(ctx.dir);

        if (*phase) return cmd_phase_scan(ctx, channel, range);
        if (*tt) return cmd_truth_table(ctx);
        if (*run) return cmd_gate_run(ctx, input);
        if (*sd) return cmd_sweep_detuning(ctx);
        if (*sb) return cmd_sweep_bandwidth(ctx);
        if (*sn) return cmd_sweep_noise(ctx);
        if (*eb) return cmd_error_budget(ctx);
        if (*oc) return cmd_oracle_check(ctx, n_bins, inputs);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.error_class() == ErrorClass::Validation ? 1 : 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
