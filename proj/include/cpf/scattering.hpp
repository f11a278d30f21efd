#pragma once

#include <vector>

#include "cpf/core_model.hpp"

namespace cpf {

struct ReflectionResponse {
    std::vector<double> detunings;
    std::vector<cplx> coefficients;
    std::vector<double> phases;  // unwrapped, anchored to 0 at detuning -> -inf
};

// Printed forms: (i d - k)/(i d + k) and ((d + i k)(da + i gam) - g^2)/((d - i k)(da + i gam) - g^2).
cplx reflect_bare(double detuning, double kappa);
cplx reflect_coupled(double detuning, double ion_detuning, double g, double kappa, double gamma);

// Response of the simulated (e^{-iHt}) system; the complex conjugate of the printed
// forms at gamma = 0. cavity_split shifts the cavity resonance.
cplx reflect_physical(double detuning, double ion_detuning, double g, double kappa, double gamma,
                      double cavity_split = 0.0);

struct PhaseModel {
    // Non-resonant channels use their own coupled response instead of the bare cavity.
    bool full_detuned_model = false;
};

// Continuous phase of the simulated reflection for channel (L, s).
double scattering_phase(AngularLabel L, Spin s, double detuning, const PhysicalConfig& cfg,
                        PhaseModel model = {});

ReflectionResponse reflection_response(AngularLabel L, Spin s, const std::vector<double>& detunings,
                                       const PhysicalConfig& cfg, PhaseModel model = {});

struct PhaseTaylor {
    double phi0 = 0.0;
    double phi1 = 0.0;  // group delay
    double phi2 = 0.0;
};

PhaseTaylor phase_taylor(AngularLabel L, Spin s, const PhysicalConfig& cfg, double step, PhaseModel model = {});

// Nearest-branch continuation along a sequence.
std::vector<double> unwrap_phases(const std::vector<double>& wrapped);

// Wraps into (-pi, pi].
double wrap_phase(double x);

}  // namespace cpf
