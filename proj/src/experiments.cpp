#include "cpf/experiments.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "cpf/errors.hpp"
#include "cpf/parallel.hpp"

namespace cpf {

std::string to_string(ChannelSource s) { return s == ChannelSource::TimeDomain ? "time_domain" : "analytic"; }

ChannelSource parse_channel_source(const std::string& name) {
    if (name == "time_domain") return ChannelSource::TimeDomain;
    if (name == "analytic") return ChannelSource::Analytic;
    throw ArgumentError("unknown channel source '" + name + "' (expected time_domain or analytic)");
}

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::DetuningRatio: return "detuning_ratio";
        case SweepAxis::Bandwidth: return "bandwidth";
        case SweepAxis::NoiseSigma: return "noise_sigma";
        case SweepAxis::GPerturbation: return "g_perturbation";
        default: return "cavity_split";
    }
}

SweepAxis parse_sweep_axis(const std::string& name) {
    for (SweepAxis a : {SweepAxis::DetuningRatio, SweepAxis::Bandwidth, SweepAxis::NoiseSigma, SweepAxis::GPerturbation,
                        SweepAxis::CavitySplit}) {
        if (to_string(a) == name) return a;
    }
    throw ArgumentError("unknown sweep axis '" + name + "'");
}

void SweepSpec::validate() const {
    if (points.empty()) throw ArgumentError("sweep needs at least one point");
    if (repeats < 1) throw ArgumentError("sweep repeats must be >= 1");
}

FrequencyGrid setup_grid(const SimulationSetup& setup) {
    const auto& n = setup.numerics;
    return make_grid(n.n_bins, setup.cfg.sigma_omega, n.window_factor, n.band_over_kappa * setup.cfg.kappa);
}

EvolutionParams setup_params(const SimulationSetup& setup) {
    EvolutionParams p;
    p.dt = setup.numerics.dt_kappa / setup.cfg.kappa;
    p.method = setup.numerics.method;
    p.self_converge = setup.numerics.self_converge;
    p.strict = setup.numerics.strict;
    return p;
}

GateChannels compute_gate_channels(const SimulationSetup& setup, const PhysicalConfig* reference_cfg) {
    setup.cfg.validate();
    GateChannels ch;
    const double kappa = setup.cfg.kappa;
    const double sigma = setup.cfg.sigma_omega;
    ch.grid = setup_grid(setup);
    ch.profile = discretize(setup.shape, sigma, ch.grid);
    ch.arrival = arrival_delay(setup.shape, sigma);
    ch.scatter_window = effective_scatter_window(setup.numerics.scatter_window_kappa / kappa, setup.shape, sigma, kappa);

    if (setup.numerics.source == ChannelSource::Analytic) {
        ch.sim = std::make_shared<ChannelTable>(analytic_channels(setup.cfg, ch.grid, ch.profile));
    } else {
        const HamiltonianBlocks h = assemble(setup.cfg, ch.grid, Registers::One);
        ScatterWindow w;
        w.duration = ch.scatter_window;
        w.arrival = ch.arrival;
        w.bin_kappa = bin_coupling(kappa, ch.grid.delta_omega);
        ch.sim = std::make_shared<ChannelTable>(compute_channels(h, ch.profile, w, setup_params(setup), setup.threads));
    }
    for (double l : ch.sim->leakage) ch.max_leakage = std::max(ch.max_leakage, l);

    PhysicalConfig ref = reference_cfg ? *reference_cfg : setup.cfg;
    if (!reference_cfg) ref.cavity_split = {};
    ch.reference = std::make_shared<ChannelTable>(ideal_channels(ref, ch.grid, ch.profile));
    return ch;
}

double field_for_delta(double delta) { return delta / (kLandeD * kMuB); }

std::vector<QuditState> basis_set_g() {
    std::vector<QuditState> g;
    for (std::size_t i = 0; i < 4; ++i) g.push_back(QuditState::basis(i));
    const double h = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            QuditState a;
            a.amps[i] = h;
            a.amps[j] = h;
            g.push_back(a);
            QuditState b;
            b.amps[i] = h;
            b.amps[j] = cplx(0.0, h);
            g.push_back(b);
        }
    return g;
}

GateFidelity gate_fidelity(const GateEvaluator& ev, const GateOptions& options) {
    static const std::vector<QuditState> set = basis_set_g();
    GateFidelity f;
    for (const auto& a : set)
        for (const auto& b : set) {
            f.down += ev.fidelity(a, b, Spin::Down, options);
            f.up += ev.fidelity(a, b, Spin::Up, options);
        }
    const double n = static_cast<double>(set.size() * set.size());
    f.down /= n;
    f.up /= n;
    return f;
}

GateFidelity gate_fidelity(const GateChannels& ch, const GateOptions& options) {
    return gate_fidelity(GateEvaluator(ch.sim, ch.reference), options);
}

namespace {

SweepPoint point_from(double x, const GateFidelity& f) {
    SweepPoint p;
    p.x = x;
    p.infidelity = 1.0 - f.down;
    p.infidelity_up = 1.0 - f.up;
    return p;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Box-Muller on the raw engine output, so draws do not depend on the standard
// library's distribution implementation.
double normal_draw(std::mt19937_64& rng) {
    constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
    const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * scale;
    const double u2 = (static_cast<double>(rng() >> 11) + 0.5) * scale;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t repeat) {
    return splitmix64(splitmix64(splitmix64(seed) ^ point) ^ repeat);
}

SweepCurve sweep_detuning(const SimulationSetup& setup, const SweepSpec& spec) {
    spec.validate();
    SweepCurve c;
    c.label = "detuning_ratio";
    for (double ratio : spec.points) {
        if (!(ratio > 0.0)) throw ArgumentError("detuning ratios must be > 0");
        SimulationSetup s = setup;
        s.cfg.B = field_for_delta(ratio * s.cfg.g_ref);
        c.points.push_back(point_from(ratio, gate_fidelity(compute_gate_channels(s))));
    }
    return c;
}

SweepCurve sweep_bandwidth(const SimulationSetup& setup, const SweepSpec& spec, PulseShape shape) {
    spec.validate();
    SweepCurve c;
    c.label = to_string(shape);
    for (double width : spec.points) {
        if (!(width > 0.0)) throw ArgumentError("bandwidth points must be > 0");
        SimulationSetup s = setup;
        s.shape = shape;
        s.cfg.sigma_omega = width * s.cfg.kappa;
        c.points.push_back(point_from(width, gate_fidelity(compute_gate_channels(s))));
    }
    return c;
}

SweepCurve sweep_mw_noise(const GateChannels& ch, const SweepSpec& spec, int threads) {
    spec.validate();
    const GateEvaluator ev(ch.sim, ch.reference);
    SweepCurve c;
    c.label = "noise_sigma";
    for (std::size_t pi = 0; pi < spec.points.size(); ++pi) {
        const double zeta = spec.points[pi];
        if (!(zeta >= 0.0)) throw ArgumentError("noise sigma must be >= 0");
        std::vector<GateFidelity> runs(static_cast<std::size_t>(spec.repeats));
        parallel_for(runs.size(), threads, [&](std::size_t r) {
            std::mt19937_64 rng(stream_seed(spec.seed, pi, r));
            GateOptions opt;
            for (double& a : opt.area_factors) a = 1.0 + zeta * normal_draw(rng);
            runs[r] = gate_fidelity(ev, opt);
        });
        // Offsets from the first run keep identical runs bitwise equal to the mean.
        const double n = static_cast<double>(runs.size());
        double dm = 0.0, dm_up = 0.0;
        for (const auto& f : runs) {
            dm += f.down - runs[0].down;
            dm_up += f.up - runs[0].up;
        }
        const double mean = runs[0].down + dm / n;
        const double mean_up = runs[0].up + dm_up / n;
        double var = 0.0;
        for (const auto& f : runs) var += (f.down - mean) * (f.down - mean);
        SweepPoint p;
        p.x = zeta;
        p.infidelity = 1.0 - mean;
        p.infidelity_up = 1.0 - mean_up;
        p.std_error = runs.size() > 1 ? std::sqrt(var / (n - 1.0)) / std::sqrt(n) : 0.0;
        c.points.push_back(p);
    }
    return c;
}

std::array<double, 4> default_cavity_split() {
    const double khz = 2.0 * kPi * 1e3;
    return {20.0 * khz, -10.0 * khz, 10.0 * khz, -20.0 * khz};
}

ErrorBudget error_budget(const SimulationSetup& setup, const ErrorBudgetOptions& options) {
    if (options.g_points < 2) throw ArgumentError("g fluctuation needs at least 2 points");
    ErrorBudget b;
    b.zeta = options.zeta;
    SimulationSetup nominal = setup;
    nominal.cfg.cavity_split = {};
    nominal.cfg.resonant_only = false;
    const PhysicalConfig ref_cfg = nominal.cfg;

    const GateChannels full = compute_gate_channels(nominal, &ref_cfg);
    b.total = 1.0 - gate_fidelity(full).down;

    SimulationSetup res = nominal;
    res.cfg.resonant_only = true;
    b.distortion = 1.0 - gate_fidelity(compute_gate_channels(res, &ref_cfg)).down;
    b.unwanted = b.total - b.distortion;

    bool any_split = false;
    for (double s : options.cavity_split) any_split = any_split || s != 0.0;
    b.split_used = any_split ? options.cavity_split : default_cavity_split();
    SimulationSetup split = nominal;
    split.cfg.cavity_split = b.split_used;
    b.cavity_split = (1.0 - gate_fidelity(compute_gate_channels(split, &ref_cfg)).down) - b.total;

    double acc = 0.0;
    for (int i = 0; i < options.g_points; ++i) {
        const double x = -options.g_spread + 2.0 * options.g_spread * i / (options.g_points - 1);
        b.g_factors.push_back(1.0 + x);
        if (x == 0.0) {
            acc += b.total;
            continue;
        }
        SimulationSetup gs = nominal;
        gs.cfg.g_ref *= 1.0 + x;
        acc += 1.0 - gate_fidelity(compute_gate_channels(gs, &ref_cfg)).down;
    }
    b.g_fluctuation = acc / options.g_points - b.total;

    SweepSpec noise;
    noise.axis = SweepAxis::NoiseSigma;
    noise.points = {options.zeta};
    noise.repeats = options.noise_repeats;
    noise.seed = options.seed;
    const SweepCurve nc = sweep_mw_noise(full, noise, setup.threads);
    b.mw_noise = nc.points[0].infidelity - b.total;
    b.mw_noise_stderr = nc.points[0].std_error;
    return b;
}

std::vector<PhaseScanRow> phase_scan(const SimulationSetup& setup, AngularLabel L, Spin s, double range_kappa) {
    if (!(range_kappa > 0.0)) throw ArgumentError("phase scan range must be > 0");
    SimulationSetup probe = setup;
    const double kappa = setup.cfg.kappa;
    probe.shape = PulseShape::Gaussian;
    probe.cfg.sigma_omega = 0.5 * range_kappa * kappa;
    // Sample well past the scanned range so the hard spectral edge stays outside it.
    probe.numerics.window_factor = 3.0;
    probe.numerics.scatter_window_kappa = std::max(probe.numerics.scatter_window_kappa, 30.0);
    const FrequencyGrid grid = setup_grid(probe);
    const SpectralAmplitude f = discretize(probe.shape, probe.cfg.sigma_omega, grid);
    const HamiltonianBlocks h = assemble(probe.cfg, grid, Registers::One);
    ScatterWindow w;
    w.arrival = arrival_delay(probe.shape, probe.cfg.sigma_omega);
    w.duration = effective_scatter_window(probe.numerics.scatter_window_kappa / kappa, probe.shape,
                                          probe.cfg.sigma_omega, kappa);
    w.bin_kappa = bin_coupling(kappa, grid.delta_omega);
    const ScatterOutcome o = scatter_photon(L, s, f, h, w, setup_params(probe));
    const auto& out = o.channel(L, s).amplitudes;

    std::vector<int> bins;
    double peak = 0.0;
    for (int m = 0; m < grid.total_bins(); ++m) {
        if (!grid.in_window(m)) continue;
        if (std::abs(grid.frequency(m) - grid.center) > range_kappa * kappa * (1.0 + 1e-12)) continue;
        bins.push_back(m);
        peak = std::max(peak, std::norm(f.amplitudes[m]));
    }
    std::vector<double> wrapped;
    for (int m : bins) wrapped.push_back(std::arg(out[m] / f.amplitudes[m]));
    std::vector<double> numeric = unwrap_phases(wrapped);

    const PhaseModel full{true};
    std::vector<PhaseScanRow> rows;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        PhaseScanRow r;
        const double d = grid.frequency(bins[i]) - grid.center;
        r.detuning_over_kappa = d / kappa;
        r.analytic = scattering_phase(L, s, d, probe.cfg, full);
        r.numeric = numeric[i];
        r.relative_mass = std::norm(f.amplitudes[bins[i]]) / peak;
        rows.push_back(r);
    }
    const std::size_t c = rows.size() / 2;
    const double shift = 2.0 * kPi * std::round((rows[c].analytic - rows[c].numeric) / (2.0 * kPi));
    for (auto& r : rows) r.numeric += shift;
    return rows;
}

}  // namespace cpf
