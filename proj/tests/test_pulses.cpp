#include <cmath>

#include "cpf/errors.hpp"
#include "cpf/pulses.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cpf;

TEST_SUITE("pulses") {
    TEST_CASE("profile peak values") {
        const double s = 1.7;
        CHECK(profile_value(PulseShape::Gaussian, s, 0.0) == doctest::Approx(1.0 / (s * std::sqrt(kPi))));
        CHECK(profile_value(PulseShape::Sech, s, 0.0) == doctest::Approx(std::sqrt(kPi / (2.0 * s))));
        CHECK(profile_value(PulseShape::Lorentzian, s, 0.0) == doctest::Approx(1.0 / (kPi * s)));
    }

    TEST_CASE("shape names round-trip") {
        for (PulseShape s : {PulseShape::Gaussian, PulseShape::Sech, PulseShape::Lorentzian})
            CHECK(parse_pulse_shape(to_string(s)) == s);
        CHECK_THROWS(parse_pulse_shape("square"));
    }

    TEST_CASE("grid is symmetric with the window spacing") {
        const double sigma = cpft::kKappa;
        const FrequencyGrid g = make_grid(200, sigma);
        CHECK(g.delta_omega == doctest::Approx(2.0 * sigma / 200));
        CHECK(g.total_bins() == 200);
        for (int m = 0; m < 200; ++m) CHECK(g.frequency(m) == doctest::Approx(-g.frequency(199 - m)));
        CHECK(g.frequency(0) == doctest::Approx(-sigma + 0.5 * g.delta_omega));
        const FrequencyGrid g4 = make_grid(200, sigma, 4.0);
        CHECK(g4.delta_omega == doctest::Approx(8.0 * sigma / 200));
        const FrequencyGrid gb = make_grid(200, sigma, 1.0, 10.0 * sigma);
        CHECK(gb.n_extra > 0);
        CHECK(gb.delta_omega == doctest::Approx(g.delta_omega));
        CHECK(gb.frequency(gb.n_extra) == doctest::Approx(g.frequency(0)));
        CHECK(gb.frequency(gb.total_bins() - 1) >= 10.0 * sigma - gb.delta_omega);
        CHECK_FALSE(gb.in_window(0));
        CHECK(gb.in_window(gb.n_extra));
    }

    TEST_CASE("discretize normalises every shape") {
        const double sigma = cpft::kKappa;
        const FrequencyGrid g = make_grid(200, sigma);
        for (PulseShape s : {PulseShape::Gaussian, PulseShape::Sech, PulseShape::Lorentzian}) {
            const SpectralAmplitude f = discretize(s, sigma, g);
            REQUIRE(f.size() == 200);
            CHECK(std::abs(f.norm() - 1.0) < 1e-12);
            // Rescaling an already normalised profile changes nothing.
            double n2 = 0.0;
            for (auto a : f.amplitudes) n2 += std::norm(a);
            CHECK(std::abs(n2 - 1.0) < 1e-12);
        }
        const SpectralAmplitude f = discretize(PulseShape::Gaussian, sigma, g);
        for (int m = 0; m < 200; ++m) CHECK(std::abs(f.amplitudes[m] - f.amplitudes[199 - m]) < 1e-15);
    }

    TEST_CASE("band bins carry no amplitude") {
        const double sigma = cpft::kKappa;
        const FrequencyGrid g = make_grid(20, sigma, 1.0, 5.0 * sigma);
        const SpectralAmplitude f = discretize(PulseShape::Gaussian, sigma, g);
        REQUIRE(static_cast<int>(f.size()) == g.total_bins());
        for (int m = 0; m < g.total_bins(); ++m)
            if (!g.in_window(m)) CHECK(f.amplitudes[m] == cplx(0.0));
    }

    TEST_CASE("captured mass") {
        const double sigma = cpft::kKappa;
        CHECK(captured_mass(PulseShape::Gaussian, sigma, sigma) == doctest::Approx(0.9544997361036416).epsilon(1e-10));
        const FrequencyGrid g = make_grid(200, sigma);
        CHECK(discretize(PulseShape::Gaussian, sigma, g).captured_fraction == doctest::Approx(0.9545).epsilon(1e-3));
        CHECK(captured_mass(PulseShape::Gaussian, sigma, 4.0 * sigma) > 0.999999);
    }

    TEST_CASE("schedule at defaults") {
        const PhysicalConfig c = cpft::default_cfg();
        const double k = c.kappa;
        const PulseSchedule s = build_schedule(c, 10.0 / k);
        CHECK(s.t[1] == doctest::Approx(kPi / (20.0 * k)));
        CHECK(s.total() == doctest::Approx(3.0 * kPi / (20.0 * k) + 20.0 / k));
        CHECK(s.t[2] - s.t[1] == doctest::Approx(10.0 / k));
        CHECK(s.t[4] - s.t[3] == doctest::Approx(10.0 / k));
        for (int i = 1; i <= 5; ++i) CHECK(s.t[i] > s.t[i - 1]);
        CHECK(s.t[6] == s.t[5]);
        // Rotation areas.
        for (int seg : {1, 3, 5})
            CHECK(std::abs(s.omega_on(seg)) * (s.t[seg] - s.t[seg - 1]) == doctest::Approx(kPi / 4.0));
        CHECK(s.omega_on(3).real() == doctest::Approx(-c.omega0));
        CHECK(s.omega_on(2) == cplx(0.0));
        CHECK(s.omega_on(4) == cplx(0.0));
        CHECK(s.kappa1_on(1) == 0.0);
        CHECK(s.kappa2_on(2) == 0.0);
        CHECK(s.segment_at(0.0) == 1);
        CHECK(s.segment_at(s.t[1]) == 2);
    }

    TEST_CASE("fast rotations shrink to the scattering windows") {
        PhysicalConfig c = cpft::default_cfg();
        c.omega0 = 1e9 * c.kappa;
        const PulseSchedule s = build_schedule(c, 10.0 / c.kappa);
        CHECK(s.total() == doctest::Approx(20.0 / c.kappa).epsilon(1e-8));
    }

    TEST_CASE("bin coupling") {
        CHECK(bin_coupling(2.0, kPi / 2.0) == doctest::Approx(1.0));
    }
}
