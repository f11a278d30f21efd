#pragma once

#include <string>
#include <vector>

#include "cpf/core_model.hpp"

namespace cpf {

enum class PulseShape { Gaussian, Sech, Lorentzian };

std::string to_string(PulseShape s);
PulseShape parse_pulse_shape(const std::string& name);

// Uniform grid. The first n_bins bins (the pulse window) are centred on w_c; band
// extension adds empty bins at the same spacing on both sides so the cavity sees a
// continuum much wider than its linewidth.
struct FrequencyGrid {
    int n_bins = 0;             // window bins N
    int n_extra = 0;            // extra bins per side
    double delta_omega = 0.0;   // rad/s
    double center = 0.0;
    double window_halfwidth = 0.0;  // N * delta_omega / 2

    int total_bins() const { return n_bins + 2 * n_extra; }
    // Frequency of bin m in 0..total_bins()-1; window bins are n_extra..n_extra+N-1.
    double frequency(int m) const;
    std::vector<double> frequencies() const;
    bool in_window(int m) const { return m >= n_extra && m < n_extra + n_bins; }
};

// window_factor scales the sampled window to +-window_factor*sigma; band is the
// half-width of the full grid (0 means no extension).
FrequencyGrid make_grid(int n_bins, double sigma, double window_factor = 1.0, double band = 0.0);

struct SpectralAmplitude {
    std::vector<cplx> amplitudes;
    double captured_fraction = 1.0;  // pre-rescale mass inside the window

    std::size_t size() const { return amplitudes.size(); }
    double norm() const;
};

double profile_value(PulseShape shape, double sigma, double detuning);

// Samples on the window bins (zeros elsewhere) and rescales to unit discrete norm.
SpectralAmplitude discretize(PulseShape shape, double sigma, const FrequencyGrid& grid);

// Fraction of the continuum |f|^2 mass inside +-halfwidth.
double captured_mass(PulseShape shape, double sigma, double halfwidth);

struct PulseSchedule {
    std::array<double, 7> t{};  // t[0] = 0, t[1..6]
    double omega0 = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double scatter_window = 0.0;

    double total() const { return t[6]; }
    // Control values on [t[k-1], t[k]] for segment k in 1..6.
    cplx omega_on(int segment) const;
    double kappa1_on(int segment) const;
    double kappa2_on(int segment) const;
    // Segment containing t (ties go to the later segment).
    int segment_at(double time) const;
};

// Bin coupling that reproduces the continuum linewidth kappa.
double bin_coupling(double kappa, double delta_omega);

PulseSchedule build_schedule(const PhysicalConfig& cfg, double scatter_window, double bin_kappa = 0.0);

// Arrival time of the pulse peak after the start of its scattering window, chosen so
// the temporal tail before the window start carries negligible mass.
double arrival_delay(PulseShape shape, double sigma);

// Window long enough for the pulse to arrive, pass, and the cavity to ring down.
double effective_scatter_window(double configured, PulseShape shape, double sigma, double kappa);

}  // namespace cpf
