#include "cpf/scattering.hpp"

#include <cmath>

#include "cpf/errors.hpp"

namespace cpf {

namespace {

constexpr cplx I(0.0, 1.0);

// arg(d - z) continued along the real axis, minus its value at d -> -inf.
double anchored_angle(double d, cplx z) {
    const double y = -z.imag();
    const double limit = y > 0.0 ? kPi : (y < 0.0 ? -kPi : 0.0);
    return std::atan2(y, d - z.real()) - limit;
}

struct Roots {
    cplx r1, r2;
};

// Roots of (d - a)(d - b) - g^2 in d.
Roots quadratic_roots(cplx a, cplx b, double g) {
    const cplx mid = 0.5 * (a + b);
    const cplx half = 0.5 * (a - b);
    const cplx disc = std::sqrt(half * half + g * g);
    return {mid + disc, mid - disc};
}

struct ChannelParams {
    double g = 0.0;
    double ion = 0.0;
    double split = 0.0;
};

ChannelParams channel_params(AngularLabel L, Spin s, const PhysicalConfig& cfg, PhaseModel model) {
    ChannelParams p;
    p.split = cfg.cavity_split[L.index()];
    const bool resonant = s == Spin::Down && L.value() == 2;
    if (resonant || model.full_detuned_model) {
        const auto table = coupling_table(cfg);
        const auto z = zeeman_shifts(cfg);
        p.g = channel_coupling(cfg, table, s, L);
        p.ion = channel_ion_detuning(z, s, L);
    }
    return p;
}

double continuous_phase(double d, const ChannelParams& p, double kappa, double gamma) {
    if (p.g == 0.0) {
        return anchored_angle(d, cplx(p.split, kappa)) - anchored_angle(d, cplx(p.split, -kappa));
    }
    const cplx b(p.ion, -gamma);
    const Roots zn = quadratic_roots(cplx(p.split, kappa), b, p.g);
    const Roots zd = quadratic_roots(cplx(p.split, -kappa), b, p.g);
    return anchored_angle(d, zn.r1) + anchored_angle(d, zn.r2) - anchored_angle(d, zd.r1) -
           anchored_angle(d, zd.r2);
}

}  // namespace

cplx reflect_bare(double detuning, double kappa) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
    return (I * detuning - kappa) / (I * detuning + kappa);
}

cplx reflect_coupled(double detuning, double ion_detuning, double g, double kappa, double gamma) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
    if (!(g >= 0.0)) throw DomainError("g must be >= 0");
    const double da = detuning - ion_detuning;
    const cplx ion = da + I * gamma;
    const cplx num = (detuning + I * kappa) * ion - g * g;
    const cplx den = (detuning - I * kappa) * ion - g * g;
    if (den == cplx(0.0)) throw DomainError("reflection coefficient has an exact pole");
    return num / den;
}

cplx reflect_physical(double detuning, double ion_detuning, double g, double kappa, double gamma,
                      double cavity_split) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
    const double dc = detuning - cavity_split;
    if (g == 0.0) return (dc - I * kappa) / (dc + I * kappa);
    const cplx ion = (detuning - ion_detuning) + I * gamma;
    const cplx num = (dc - I * kappa) * ion - g * g;
    const cplx den = (dc + I * kappa) * ion - g * g;
    if (den == cplx(0.0)) throw DomainError("reflection coefficient has an exact pole");
    return num / den;
}

double scattering_phase(AngularLabel L, Spin s, double detuning, const PhysicalConfig& cfg, PhaseModel model) {
    return continuous_phase(detuning, channel_params(L, s, cfg, model), cfg.kappa, cfg.gamma);
}

ReflectionResponse reflection_response(AngularLabel L, Spin s, const std::vector<double>& detunings,
                                       const PhysicalConfig& cfg, PhaseModel model) {
    const ChannelParams p = channel_params(L, s, cfg, model);
    ReflectionResponse r;
    r.detunings = detunings;
    r.coefficients.reserve(detunings.size());
    r.phases.reserve(detunings.size());
    for (double d : detunings) {
        r.coefficients.push_back(reflect_physical(d, p.ion, p.g, cfg.kappa, cfg.gamma, p.split));
        r.phases.push_back(continuous_phase(d, p, cfg.kappa, cfg.gamma));
    }
    return r;
}

PhaseTaylor phase_taylor(AngularLabel L, Spin s, const PhysicalConfig& cfg, double step, PhaseModel model) {
    if (!(step > 0.0)) throw ArgumentError("finite-difference step must be > 0");
    const ChannelParams p = channel_params(L, s, cfg, model);
    const double fm = continuous_phase(-step, p, cfg.kappa, cfg.gamma);
    const double f0 = continuous_phase(0.0, p, cfg.kappa, cfg.gamma);
    const double fp = continuous_phase(step, p, cfg.kappa, cfg.gamma);
    return {f0, (fp - fm) / (2.0 * step), (fp - 2.0 * f0 + fm) / (step * step)};
}

double wrap_phase(double x) {
    double y = std::remainder(x, 2.0 * kPi);
    if (y <= -kPi) y += 2.0 * kPi;
    return y;
}

std::vector<double> unwrap_phases(const std::vector<double>& wrapped) {
    std::vector<double> out(wrapped.size());
    if (wrapped.empty()) return out;
    out[0] = wrapped[0];
    for (std::size_t i = 1; i < wrapped.size(); ++i) {
        out[i] = out[i - 1] + wrap_phase(wrapped[i] - wrapped[i - 1]);
    }
    return out;
}

}  // namespace cpf
