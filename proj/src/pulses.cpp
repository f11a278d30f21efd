#include "cpf/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cpf/errors.hpp"

namespace cpf {

std::string to_string(PulseShape s) {
    switch (s) {
        case PulseShape::Gaussian: return "gaussian";
        case PulseShape::Sech: return "sech";
        default: return "lorentzian";
    }
}

PulseShape parse_pulse_shape(const std::string& name) {
    std::string n = name;
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    if (n == "gaussian") return PulseShape::Gaussian;
    if (n == "sech") return PulseShape::Sech;
    if (n == "lorentzian") return PulseShape::Lorentzian;
    throw ArgumentError("unknown pulse shape '" + name + "' (expected gaussian, sech or lorentzian)");
}

double FrequencyGrid::frequency(int m) const {
    const int w = m - n_extra + 1;  // 1-based window index, may fall outside 1..N
    return center + (w - 0.5 * (n_bins + 1)) * delta_omega;
}

std::vector<double> FrequencyGrid::frequencies() const {
    std::vector<double> f(total_bins());
    for (int m = 0; m < total_bins(); ++m) f[m] = frequency(m);
    return f;
}

FrequencyGrid make_grid(int n_bins, double sigma, double window_factor, double band) {
    if (n_bins < 2) throw ArgumentError("grid needs at least 2 bins");
    if (!(sigma > 0.0)) throw ArgumentError("sigma must be > 0");
    if (!(window_factor > 0.0)) throw ArgumentError("window_factor must be > 0");
    if (!(band >= 0.0)) throw ArgumentError("band must be >= 0");
    FrequencyGrid g;
    g.n_bins = n_bins;
    g.delta_omega = 2.0 * window_factor * sigma / n_bins;
    g.window_halfwidth = 0.5 * n_bins * g.delta_omega;
    g.n_extra = std::max(0, static_cast<int>(std::ceil(band / g.delta_omega - 0.5 * n_bins - 1e-9)));
    return g;
}

double SpectralAmplitude::norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
}

double profile_value(PulseShape shape, double sigma, double detuning) {
    if (!(sigma > 0.0)) throw ArgumentError("sigma must be > 0");
    switch (shape) {
        case PulseShape::Gaussian:
            return std::exp(-detuning * detuning / (sigma * sigma)) / (sigma * std::sqrt(kPi));
        case PulseShape::Sech:
            return std::sqrt(kPi / (2.0 * sigma)) / std::cosh(kPi * detuning / sigma);
        default:
            return sigma / (kPi * (detuning * detuning + sigma * sigma));
    }
}

namespace {

// Integral of |f|^2 over the whole line.
double continuum_norm2(PulseShape shape, double sigma) {
    switch (shape) {
        case PulseShape::Gaussian: return 1.0 / (sigma * std::sqrt(2.0 * kPi));
        case PulseShape::Sech: return 1.0;
        default: return 1.0 / (2.0 * kPi * sigma);
    }
}

}  // namespace

double captured_mass(PulseShape shape, double sigma, double halfwidth) {
    const double x = halfwidth / sigma;
    switch (shape) {
        case PulseShape::Gaussian: return std::erf(std::sqrt(2.0) * x);
        case PulseShape::Sech: return std::tanh(kPi * x);
        default: return (2.0 / kPi) * (std::atan(x) + x / (1.0 + x * x));
    }
}

SpectralAmplitude discretize(PulseShape shape, double sigma, const FrequencyGrid& grid) {
    if (grid.n_bins < 2 || !(grid.delta_omega > 0.0)) throw ArgumentError("invalid frequency grid");
    SpectralAmplitude out;
    out.amplitudes.assign(grid.total_bins(), cplx(0.0));
    double mass = 0.0;
    for (int m = 0; m < grid.total_bins(); ++m) {
        if (!grid.in_window(m)) continue;
        const double v = profile_value(shape, sigma, grid.frequency(m) - grid.center);
        out.amplitudes[m] = v;
        mass += v * v;
    }
    out.captured_fraction = mass * grid.delta_omega / continuum_norm2(shape, sigma);
    if (out.captured_fraction < 0.5) {
        std::ostringstream os;
        os << "frequency window too narrow: captured norm fraction " << out.captured_fraction << " < 0.5";
        throw WindowTooNarrowError(os.str());
    }
    const double scale = 1.0 / std::sqrt(mass);
    for (auto& a : out.amplitudes) a *= scale;
    return out;
}

cplx PulseSchedule::omega_on(int segment) const {
    switch (segment) {
        case 1:
        case 5: return omega0;
        case 3: return -omega0;
        default: return 0.0;
    }
}

double PulseSchedule::kappa1_on(int segment) const { return segment == 2 ? kappa1 : 0.0; }
double PulseSchedule::kappa2_on(int segment) const { return segment == 4 ? kappa2 : 0.0; }

int PulseSchedule::segment_at(double time) const {
    for (int k = 1; k <= 6; ++k) {
        if (time < t[k]) return k;
    }
    return 6;
}

double bin_coupling(double kappa, double delta_omega) { return std::sqrt(kappa * delta_omega / kPi); }

PulseSchedule build_schedule(const PhysicalConfig& cfg, double scatter_window, double bin_kappa) {
    if (!(cfg.omega0 > 0.0)) throw ArgumentError("omega0 must be > 0 to build a schedule");
    if (!(scatter_window > 0.0)) throw ArgumentError("scatter window must be > 0");
    PulseSchedule s;
    const double rot = kPi / (4.0 * cfg.omega0);
    s.omega0 = cfg.omega0;
    s.kappa1 = bin_kappa;
    s.kappa2 = bin_kappa;
    s.scatter_window = scatter_window;
    s.t[0] = 0.0;
    s.t[1] = rot;
    s.t[2] = s.t[1] + scatter_window;
    s.t[3] = s.t[2] + rot;
    s.t[4] = s.t[3] + scatter_window;
    s.t[5] = s.t[4] + rot;
    s.t[6] = s.t[5];  // measurement is instantaneous
    return s;
}

double arrival_delay(PulseShape shape, double sigma) {
    switch (shape) {
        case PulseShape::Gaussian: return 6.0 / sigma;
        case PulseShape::Sech: return 16.0 / sigma;
        default: return 8.0 / sigma;
    }
}

double effective_scatter_window(double configured, PulseShape shape, double sigma, double kappa) {
    return std::max(configured, 2.0 * arrival_delay(shape, sigma) + 6.0 / kappa);
}

}  // namespace cpf
