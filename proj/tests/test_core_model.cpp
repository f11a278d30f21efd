#include <cmath>
#include <random>

#include "cpf/core_model.hpp"
#include "cpf/errors.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cpf;

TEST_SUITE("core_model") {
    TEST_CASE("angular labels are the four nonzero values") {
        CHECK_THROWS_AS(AngularLabel(0), ArgumentError);
        CHECK_THROWS(AngularLabel(3));
        const auto& all = AngularLabel::all();
        REQUIRE(all.size() == 4);
        const int expect[] = {-2, -1, 1, 2};
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(all[i].value() == expect[i]);
            CHECK(all[i].index() == i);
            CHECK(AngularLabel::from_index(i) == all[i]);
        }
    }

    TEST_CASE("ion levels map to m_J") {
        CHECK(IonLevel::ground(Spin::Down).mj() == -0.5);
        CHECK(IonLevel::ground(Spin::Up).mj() == 0.5);
        for (int j = 1; j <= 6; ++j) CHECK(IonLevel::excited(j).mj() == doctest::Approx(-3.5 + j));
    }

    TEST_CASE("3j frozen values") {
        CHECK(wigner_3j(0.5, 2, 2.5, -0.5, 2, -1.5) == doctest::Approx(std::sqrt(30.0) / 30.0).epsilon(1e-14));
        CHECK(wigner_3j(1, 1, 1, 1, -1, 0) == doctest::Approx(std::sqrt(6.0) / 6.0).epsilon(1e-14));
        CHECK(wigner_3j(2, 2, 2, 0, 0, 0) == doctest::Approx(-std::sqrt(70.0) / 35.0).epsilon(1e-14));
        CHECK(wigner_3j(1.5, 1, 2.5, 0.5, 0, -0.5) == doctest::Approx(-std::sqrt(10.0) / 10.0).epsilon(1e-14));
        CHECK(wigner_3j(0, 0, 0, 0, 0, 0) == 1.0);
        CHECK(wigner_3j(0.5, 2, 2.5, -0.5, 2, -0.5) == 0.0);
        CHECK(wigner_3j(1, 1, 3, 0, 0, 0) == 0.0);
    }

    TEST_CASE("3j column symmetries") {
        std::mt19937_64 rng(7);
        int tested = 0;
        for (int it = 0; it < 2000 && tested < 200; ++it) {
            const double j1 = 0.5 * static_cast<int>(rng() % 7), j2 = 0.5 * static_cast<int>(rng() % 7);
            const double lo = std::abs(j1 - j2), hi = j1 + j2;
            const int nj3 = static_cast<int>(std::lround(hi - lo)) + 1;
            const double j3 = lo + static_cast<int>(rng() % nj3);
            const double m1 = -j1 + static_cast<int>(rng() % static_cast<int>(2 * j1 + 1));
            const double m2 = -j2 + static_cast<int>(rng() % static_cast<int>(2 * j2 + 1));
            const double m3 = -m1 - m2;
            if (std::abs(m3) > j3) continue;
            ++tested;
            const double v = wigner_3j(j1, j2, j3, m1, m2, m3);
            CHECK(wigner_3j(j2, j3, j1, m2, m3, m1) == doctest::Approx(v).epsilon(1e-12));
            CHECK(wigner_3j(j3, j1, j2, m3, m1, m2) == doctest::Approx(v).epsilon(1e-12));
            const double sign = (static_cast<long>(std::lround(j1 + j2 + j3)) % 2 == 0) ? 1.0 : -1.0;
            CHECK(wigner_3j(j2, j1, j3, m2, m1, m3) == doctest::Approx(sign * v).epsilon(1e-12));
        }
        CHECK(tested > 50);
    }

    TEST_CASE("3j orthogonality sums") {
        for (double j1 : {0.5, 1.0, 1.5, 2.0, 2.5})
            for (double j2 : {0.5, 1.0, 2.0}) {
                for (double j3 = std::abs(j1 - j2); j3 <= j1 + j2 + 1e-9; j3 += 1.0) {
                    for (double m3 = -j3; m3 <= j3 + 1e-9; m3 += 1.0) {
                        double sum = 0.0;
                        for (double m1 = -j1; m1 <= j1 + 1e-9; m1 += 1.0) {
                            const double m2 = -m3 - m1;
                            if (std::abs(m2) > j2 + 1e-9) continue;
                            const double w = wigner_3j(j1, j2, j3, m1, m2, m3);
                            sum += (2 * j3 + 1) * w * w;
                        }
                        CHECK(std::abs(sum - 1.0) < 1e-12);
                    }
                }
            }
    }

    TEST_CASE("coupling ratios") {
        PhysicalConfig c = cpft::default_cfg();
        const double g = c.g_ref;
        const CouplingTable t = coupling_table(c);
        CHECK(std::abs(t.g_down(1) / g - 1.0 / std::sqrt(6.0)) < 1e-12);
        CHECK(std::abs(t.g_down(2) / g - std::sqrt(2.0 / 3.0)) < 1e-12);
        CHECK(t.g_down(3) == g);
        CHECK(std::abs(t.g_down(4) / g - std::sqrt(3.0) / 2.0) < 1e-12);
        CHECK(std::abs(t.g_down(5) / g - std::sqrt(3.0 / 5.0)) < 1e-12);
        for (int j = 1; j <= 5; ++j) {
            CHECK(t.g_down(j) > 0.0);
            CHECK(t.g_down(j) / g <= 1.1);
        }
        for (int j = 2; j <= 6; ++j) {
            CHECK(t.g_up(j) > 0.0);
            CHECK(t.g_up(j) / g <= 1.1);
            // Mirror symmetry of the two branches.
            CHECK(std::abs(t.g_up(j) - t.g_down(7 - j)) < 1e-12 * g);
        }
        c.use_cg_scaling = false;
        const CouplingTable flat = coupling_table(c);
        for (int j = 1; j <= 5; ++j) CHECK(flat.g_down(j) == g);
        for (int j = 2; j <= 6; ++j) CHECK(flat.g_up(j) == g);
    }

    TEST_CASE("zeeman shifts") {
        PhysicalConfig c = cpft::default_cfg();
        c.B = 35.0;
        const ZeemanShifts z = zeeman_shifts(c);
        CHECK(z.delta_m2 == doctest::Approx(392e6).epsilon(1e-14));
        CHECK(z.delta == doctest::Approx(588e6).epsilon(1e-14));
        CHECK(z.ground_split == doctest::Approx(980e6).epsilon(1e-14));
        CHECK(z.offset(5) == 0.0);
        for (int j = 1; j <= 6; ++j) CHECK(z.offset(j) == doctest::Approx((IonLevel::excited(j).mj() - 1.5) * z.delta));
        c.B = 70.0;
        const ZeemanShifts z2 = zeeman_shifts(c);
        CHECK(z2.delta == doctest::Approx(2 * z.delta));
        CHECK(z2.ground_split == doctest::Approx(2 * z.ground_split));
        c.B = 0.0;
        const ZeemanShifts z0 = zeeman_shifts(c);
        CHECK(z0.delta == 0.0);
        CHECK(z0.delta_m2 == 0.0);
        CHECK(z0.ground_split == 0.0);
    }

    TEST_CASE("config validation") {
        PhysicalConfig c = cpft::default_cfg();
        CHECK_NOTHROW(c.validate());
        c.kappa = -1.0;
        CHECK_THROWS_AS(c.validate(), ArgumentError);
        c = cpft::default_cfg();
        c.sigma_omega = 0.0;
        CHECK_THROWS(c.validate());
        c = cpft::default_cfg();
        c.B = -1.0;
        CHECK_THROWS(c.validate());
    }

    TEST_CASE("excited partners") {
        CHECK(excited_level(Spin::Down, AngularLabel(2)) == 5);
        CHECK(excited_level(Spin::Down, AngularLabel(-2)) == 1);
        CHECK(excited_level(Spin::Up, AngularLabel(2)) == 6);
        CHECK(excited_level(Spin::Up, AngularLabel(-2)) == 2);
    }
}
