#include <cmath>

#include "cpf/scattering.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cpf;

namespace {
constexpr cplx I(0.0, 1.0);
}

TEST_SUITE("analytic_scattering") {
    TEST_CASE("bare cavity values") {
        const double k = cpft::kKappa;
        CHECK(std::abs(reflect_bare(0.0, k) - cplx(-1.0)) < 1e-15);
        CHECK(std::abs(reflect_bare(k, k) - I) < 1e-15);
        CHECK(std::abs(reflect_bare(1e9 * k, k) - cplx(1.0)) < 1e-8);
        CHECK(std::abs(reflect_bare(-1e9 * k, k) - cplx(1.0)) < 1e-8);
    }

    TEST_CASE("coupled cavity values") {
        const double k = cpft::kKappa;
        CHECK(std::abs(reflect_coupled(0.0, 0.0, 3 * k, k, 0.0) - cplx(1.0)) < 1e-15);
        const cplx r = reflect_coupled(k, 0.0, 3 * k, k, 0.0);
        CHECK(std::abs(r) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::arg(r) == doctest::Approx(-0.24870998909352288).epsilon(1e-12));
        for (double d : {-2.0, -0.3, 0.7, 4.0})
            CHECK(std::abs(reflect_coupled(d * k, 0.5 * k, 0.0, k, 0.0) - reflect_bare(d * k, k)) < 1e-14);
    }

    TEST_CASE("unitarity and symmetry over a dense grid") {
        const double k = cpft::kKappa;
        for (int i = 0; i < 1000; ++i) {
            const double d = (-10.0 + 20.0 * i / 999.0) * k;
            CHECK(std::abs(std::abs(reflect_bare(d, k)) - 1.0) < 1e-12);
            CHECK(std::abs(std::abs(reflect_coupled(d, 2.0 * k, 3 * k, k, 0.0)) - 1.0) < 1e-12);
            CHECK(std::abs(reflect_bare(-d, k) - std::conj(reflect_bare(d, k))) < 1e-14);
            CHECK(std::abs(reflect_coupled(d, 0.3 * k, 1e-6 * k, k, 0.0) - reflect_bare(d, k)) < 1e-9);
        }
    }

    TEST_CASE("simulated response is the conjugate") {
        const double k = cpft::kKappa;
        for (double d : {-1.5, 0.0, 0.4, 2.0})
            CHECK(std::abs(reflect_physical(d * k, 0.2 * k, 3 * k, k, 0.0) -
                           std::conj(reflect_coupled(d * k, 0.2 * k, 3 * k, k, 0.0))) < 1e-14);
    }

    TEST_CASE("channel phases at resonance") {
        const PhysicalConfig c = cpft::default_cfg();
        CHECK(std::abs(wrap_phase(scattering_phase(AngularLabel(2), Spin::Down, 0.0, c))) < 1e-12);
        CHECK(std::abs(std::abs(wrap_phase(scattering_phase(AngularLabel(-1), Spin::Down, 0.0, c))) - kPi) < 1e-12);
        CHECK(std::abs(std::abs(wrap_phase(scattering_phase(AngularLabel(2), Spin::Up, 0.0, c))) - kPi) < 1e-12);
        CHECK(std::abs(std::abs(wrap_phase(scattering_phase(AngularLabel(-2), Spin::Down, 0.0, c))) - kPi) < 1e-12);
        CHECK(std::abs(std::abs(wrap_phase(scattering_phase(AngularLabel(1), Spin::Down, 0.0, c))) - kPi) < 1e-12);
    }

    TEST_CASE("phases are continuous and anchored") {
        const PhysicalConfig c = cpft::default_cfg();
        std::vector<double> d;
        for (int i = 0; i < 601; ++i) d.push_back((-3.0 + 0.01 * i) * c.kappa);
        for (Spin s : kSpins)
            for (const AngularLabel& L : AngularLabel::all()) {
                const ReflectionResponse r = reflection_response(L, s, d, c, PhaseModel{true});
                for (std::size_t i = 1; i < d.size(); ++i) CHECK(std::abs(r.phases[i] - r.phases[i - 1]) < 0.5);
                for (std::size_t i = 0; i < d.size(); ++i)
                    CHECK(std::abs(wrap_phase(r.phases[i] - std::arg(r.coefficients[i]))) < 1e-9);
            }
        CHECK(std::abs(scattering_phase(AngularLabel(-1), Spin::Up, -1e6 * c.kappa, c)) < 1e-5);
    }

    TEST_CASE("group delays") {
        const PhysicalConfig c = cpft::default_cfg();
        const double k = c.kappa;
        const PhaseTaylor bare = phase_taylor(AngularLabel(1), Spin::Up, c, 1e-4 * k);
        CHECK(std::abs(bare.phi1) == doctest::Approx(2.0 / k).epsilon(1e-6));
        const double g5 = c.g_ref * std::sqrt(3.0 / 5.0);
        const PhaseTaylor res = phase_taylor(AngularLabel(2), Spin::Down, c, 1e-4 * k);
        CHECK(std::abs(wrap_phase(res.phi0)) < 1e-12);
        CHECK(std::abs(res.phi1) == doctest::Approx(2.0 * k / (g5 * g5)).epsilon(1e-6));
        // Consistent with the simulated response.
        const double h = 1e-5 * k;
        const double num = std::arg(reflect_physical(h, 0.0, g5, k, 0.0) / reflect_physical(-h, 0.0, g5, k, 0.0)) / (2 * h);
        CHECK(res.phi1 == doctest::Approx(num).epsilon(1e-6));
    }

    TEST_CASE("unwrap and wrap") {
        CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
        CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
        CHECK(wrap_phase(3 * kPi / 2) == doctest::Approx(-kPi / 2));
        const auto u = unwrap_phases({3.0, -3.0, -2.5});
        CHECK(u[1] == doctest::Approx(-3.0 + 2 * kPi));
        CHECK(u[2] == doctest::Approx(-2.5 + 2 * kPi));
    }
}
