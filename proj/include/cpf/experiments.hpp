#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cpf/gate.hpp"

namespace cpf {

enum class ChannelSource { TimeDomain, Analytic };

std::string to_string(ChannelSource s);
ChannelSource parse_channel_source(const std::string& name);

struct NumericsConfig {
    int n_bins = 200;
    double window_factor = 1.0;
    double band_over_kappa = 128.0;  // 0 disables band extension
    double dt_kappa = 1e-3;          // step in units of 1/kappa
    Method method = Method::TrotterSplit;
    bool self_converge = false;
    double scatter_window_kappa = 10.0;  // configured window in units of 1/kappa
    ChannelSource source = ChannelSource::TimeDomain;
    bool strict = false;
};

struct SimulationSetup {
    PhysicalConfig cfg;
    PulseShape shape = PulseShape::Gaussian;
    NumericsConfig numerics;
    int threads = 1;
};

// Channels of the simulated model plus the ideal reference on the same grid.
struct GateChannels {
    std::shared_ptr<const ChannelTable> sim;
    std::shared_ptr<const ChannelTable> reference;
    FrequencyGrid grid;
    SpectralAmplitude profile;
    double scatter_window = 0.0;
    double arrival = 0.0;
    double max_leakage = 0.0;
};

FrequencyGrid setup_grid(const SimulationSetup& setup);
EvolutionParams setup_params(const SimulationSetup& setup);

// The reference is built from reference_cfg (defaults to the simulated cfg with cavity
// splits removed) so that perturbed models are compared against the nominal gate.
GateChannels compute_gate_channels(const SimulationSetup& setup, const PhysicalConfig* reference_cfg = nullptr);

// Field that puts the adjacent excited-sublevel splitting at delta (rad/s).
double field_for_delta(double delta);

// 16 single-qudit states: the 4 computational states, then for each pair i < j the
// states (|i> + |j>)/sqrt2 and (|i> + i|j>)/sqrt2. Index k maps to label (-2,-1,+1,+2)[k].
std::vector<QuditState> basis_set_g();

struct GateFidelity {
    double down = 0.0;  // reported F_G
    double up = 0.0;
};

// Mean state fidelity over the 256 product inputs of basis_set_g().
GateFidelity gate_fidelity(const GateEvaluator& ev, const GateOptions& options = {});
GateFidelity gate_fidelity(const GateChannels& ch, const GateOptions& options = {});

enum class SweepAxis { DetuningRatio, Bandwidth, NoiseSigma, GPerturbation, CavitySplit };

std::string to_string(SweepAxis a);
SweepAxis parse_sweep_axis(const std::string& name);

struct SweepSpec {
    SweepAxis axis = SweepAxis::DetuningRatio;
    std::vector<double> points;
    int repeats = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SweepPoint {
    double x = 0.0;
    double infidelity = 0.0;     // down outcome
    double infidelity_up = 0.0;
    double std_error = 0.0;
};

struct SweepCurve {
    std::string label;
    std::vector<SweepPoint> points;
};

// points are Delta/g.
SweepCurve sweep_detuning(const SimulationSetup& setup, const SweepSpec& spec);
// points are sigma/kappa.
SweepCurve sweep_bandwidth(const SimulationSetup& setup, const SweepSpec& spec, PulseShape shape);
// points are zeta; channels reused for every point and repeat.
SweepCurve sweep_mw_noise(const GateChannels& ch, const SweepSpec& spec, int threads = 1);

// Generator for (seed, point, repeat); independent of scheduling.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t repeat);

struct ErrorBudgetOptions {
    double zeta = 0.05;
    int noise_repeats = 50;
    std::uint64_t seed = 0;
    double g_spread = 0.2;
    int g_points = 5;
    // Per-L cavity splits (rad/s); when all zero a default tens-of-kHz pattern is used.
    std::array<double, 4> cavity_split{};
};

struct ErrorBudget {
    double total = 0.0;          // full-model infidelity
    double distortion = 0.0;     // (a)
    double unwanted = 0.0;       // (b)
    double cavity_split = 0.0;   // (c)
    double g_fluctuation = 0.0;  // (d)
    double mw_noise = 0.0;       // (e)
    double mw_noise_stderr = 0.0;
    std::array<double, 4> split_used{};
    std::vector<double> g_factors;
    double zeta = 0.0;
};

std::array<double, 4> default_cavity_split();

struct PhaseScanRow {
    double detuning_over_kappa = 0.0;
    double analytic = 0.0;
    double numeric = 0.0;
    double relative_mass = 0.0;  // |f_m|^2 relative to the peak bin
};

// Reflection phase of channel (L, s) across +-range_kappa: a Gaussian probe spanning the
// range is scattered in the time domain and arg(out/in) is compared with the analytic
// response of the full model. The numeric curve is unwrapped and put on the analytic
// branch at the centre bin.
std::vector<PhaseScanRow> phase_scan(const SimulationSetup& setup, AngularLabel L, Spin s, double range_kappa = 3.0);

ErrorBudget error_budget(const SimulationSetup& setup, const ErrorBudgetOptions& options = {});

}  // namespace cpf
