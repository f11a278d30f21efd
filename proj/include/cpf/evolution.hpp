#pragma once

#include <array>
#include <functional>
#include <iosfwd>

#include "cpf/hamiltonian.hpp"
#include "cpf/pulses.hpp"

namespace cpf {

enum class Method { TrotterSplit, KrylovExp };

std::string to_string(Method m);
Method parse_method(const std::string& name);

using Observer = std::function<void(double time, const StateVector& state)>;

struct EvolutionParams {
    double dt = 0.0;
    Method method = Method::TrotterSplit;
    double tolerance = 1e-9;  // allowed norm drift per evolve call
    bool strict = false;
    // Halve dt until two successive runs differ by less than converge_tol.
    bool self_converge = false;
    double converge_tol = 1e-7;
    int max_halvings = 6;
    double krylov_tol = 1e-13;
    Observer observer;
    int observe_every = 100;
};

// Propagates with controls that are constant over the whole duration.
void evolve_constant(StateVector& state, const HamiltonianBlocks& h, const Controls& c, double duration,
                     const EvolutionParams& params, double t0 = 0.0);

// U(t_b, t_a) state, following the piecewise-constant controls of the schedule.
StateVector evolve(StateVector state, const HamiltonianBlocks& h, const PulseSchedule& schedule, double t_a,
                   double t_b, const EvolutionParams& params);

struct ScatterWindow {
    double duration = 0.0;
    double arrival = 0.0;    // pulse peak reaches the cavity this long after the window opens
    double bin_kappa = 0.0;  // photon-cavity coupling per bin during the window
    int reg = 0;

    static ScatterWindow from_schedule(const PulseSchedule& s, int reg, double arrival);
};

struct ScatterOutcome {
    // Indexed by BasisIndex::sector(L, s). Expressed in the input-profile frame: for a
    // perfect reflector with coefficient r the entry for the injected channel is r * profile.
    std::array<SpectralAmplitude, 8> out_spectrum;
    double leakage = 0.0;
    std::array<double, 2> ion_branch_norms{};  // squared norms of the down / up photon branches
    double input_norm = 0.0;

    const SpectralAmplitude& channel(AngularLabel L, Spin s) const { return out_spectrum[BasisIndex::sector(L, s)]; }
};

ScatterOutcome scatter_photon(AngularLabel L, Spin s, const SpectralAmplitude& profile, const HamiltonianBlocks& h,
                              const ScatterWindow& window, const EvolutionParams& params);

// Same, for an arbitrary initial photon state given per sector (linearity tests).
ScatterOutcome scatter_state(const std::array<SpectralAmplitude, 8>& input, const HamiltonianBlocks& h,
                             const ScatterWindow& window, const EvolutionParams& params);

// Observer writing time and the squared norm per sector (cavity+excited, bins) as CSV.
Observer trajectory_csv_observer(std::ostream& os, const HamiltonianBlocks& h);

}  // namespace cpf
