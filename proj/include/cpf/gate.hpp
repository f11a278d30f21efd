#pragma once

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "cpf/evolution.hpp"
#include "cpf/scattering.hpp"

namespace cpf {

using Amp44 = std::array<std::array<cplx, 4>, 4>;
using Mat22 = std::array<std::array<cplx, 2>, 2>;

struct QuditState {
    std::array<cplx, 4> amps{};  // order (-2, -1, +1, +2)

    static QuditState basis(std::size_t idx);
    double norm2() const;
};

struct ChannelTable {
    std::array<SpectralAmplitude, 8> out;  // indexed by BasisIndex::sector(L, s)
    std::array<double, 8> leakage{};
    std::array<double, 8> mean_phase{};

    const SpectralAmplitude& at(AngularLabel L, Spin s) const { return out[BasisIndex::sector(L, s)]; }
    std::size_t bins() const { return out[0].size(); }
};

// Two-photon state. amps(L1, L2) carries the qudit amplitudes. When spectra are
// attached, the (L1, L2) component is sum_{s1,s2} paths[L1][L2][s1][s2] *
// spectra1.at(L1, s1) (x) spectra2.at(L2, s2).
struct TwoPhotonState {
    Amp44 amps{};
    std::shared_ptr<const ChannelTable> spectra1;
    std::shared_ptr<const ChannelTable> spectra2;
    std::array<std::array<Mat22, 4>, 4> paths{};
    // Dense amplitudes over (L1, m1, L2, m2) for direct-simulation outputs.
    std::vector<cplx> dense;
    int dense_bins = 0;

    static TwoPhotonState product(const QuditState& a, const QuditState& b);
    bool has_spectra() const { return spectra1 != nullptr; }
    bool has_dense() const { return !dense.empty(); }
};

// <x|y>; both states must carry spectra, or neither (pure qudit overlap).
cplx inner(const TwoPhotonState& x, const TwoPhotonState& y);
double norm2(const TwoPhotonState& x);

struct GateResult {
    std::array<TwoPhotonState, 2> outcome_states;  // unnormalised projections, indexed by Spin
    std::array<double, 2> outcome_probs{};
    std::array<double, 2> fidelity{};
    double combined_fidelity = 0.0;
};

struct GateOptions {
    // Multiplicative pulse-area factors of the three rotations.
    std::array<double, 3> area_factors = {1.0, 1.0, 1.0};
    // Apply the outcome-dependent phase correction (sign flip of L1 = +2 on the down outcome).
    bool feed_forward = true;
    bool strict = false;
    double strict_leakage = 1e-2;
};

TwoPhotonState ideal_gate(const TwoPhotonState& input);

// exp(-i sign*area*(pi/4) sigma_x) on (down, up).
std::pair<cplx, cplx> mw_rotation(cplx down, cplx up, int sign, double area_factor = 1.0);
Mat22 mw_rotation_matrix(int sign, double area_factor = 1.0);

// f * exp(i (phi0 + phi1 w)) with the Taylor terms of the analytic phase.
ChannelTable ideal_channels(const PhysicalConfig& cfg, const FrequencyGrid& grid, const SpectralAmplitude& profile,
                            PhaseModel model = {});

// Steady-state response r(w) * f of the full model (no time evolution).
ChannelTable analytic_channels(const PhysicalConfig& cfg, const FrequencyGrid& grid, const SpectralAmplitude& profile);

// Time-domain scattering of all 8 channels.
ChannelTable compute_channels(const HamiltonianBlocks& h, const SpectralAmplitude& profile, const ScatterWindow& window,
                              const EvolutionParams& params, int threads = 1);

GateResult run_gate_channel(const TwoPhotonState& input, const ChannelTable& channels, const ChannelTable& reference,
                            const GateOptions& options = {});

// Channel composition with the per-label Gram matrices computed once; use for many inputs.
class GateEvaluator {
public:
    GateEvaluator(std::shared_ptr<const ChannelTable> channels, std::shared_ptr<const ChannelTable> reference);

    GateResult run(const TwoPhotonState& input, const GateOptions& options = {}) const;
    // Fidelity of the given outcome only, skipping state construction.
    double fidelity(const QuditState& a, const QuditState& b, Spin outcome, const GateOptions& options = {}) const;

    const ChannelTable& channels() const { return *channels_; }
    const ChannelTable& reference() const { return *reference_; }

private:
    std::shared_ptr<const ChannelTable> channels_;
    std::shared_ptr<const ChannelTable> reference_;
    // gram_[pair][L][t][s] = <A_{L,t}|B_{L,s}> for pairs (sim,sim), (ref,sim), (ref,ref).
    std::array<std::array<Mat22, 4>, 3> gram_{};
};

// Path weights of the outcome projection: c[s1][s2] for photon-1 branch s1 and photon-2 branch s2.
Mat22 outcome_paths(Spin outcome, const std::array<double, 3>& area_factors);

struct DirectSetup {
    PhysicalConfig cfg;
    FrequencyGrid grid;
    SpectralAmplitude profile;
    double scatter_window = 0.0;
    double arrival = 0.0;
    EvolutionParams params;
    int max_bins = 8;
};

// Brute-force propagation of the projected two-excitation space through the full
// schedule; the reference channels define the ideal output.
GateResult run_gate_direct(const TwoPhotonState& input, const DirectSetup& setup, const ChannelTable& reference,
                           const GateOptions& options = {});

struct TruthTable {
    std::array<double, 16> fidelity{};       // input index 4*i + j
    std::array<double, 16> prob_down{};
    std::array<std::array<double, 16>, 16> populations{};  // [input][output], down outcome
    std::array<std::array<double, 16>, 16> signed_amplitude{};
    double mean_fidelity = 0.0;
};

TruthTable truth_table(const ChannelTable& channels, const ChannelTable& reference, const GateOptions& options = {});

}  // namespace cpf
