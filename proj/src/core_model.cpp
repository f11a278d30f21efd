#include "cpf/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cpf/errors.hpp"

namespace cpf {

const char* to_string(Spin s) { return s == Spin::Down ? "down" : "up"; }

AngularLabel::AngularLabel(int value) : value_(value) {
    if (value != -2 && value != -1 && value != 1 && value != 2) {
        throw ArgumentError("angular label must be one of -2, -1, +1, +2, got " + std::to_string(value));
    }
}

AngularLabel AngularLabel::from_index(std::size_t idx) {
    if (idx >= 4) throw ArgumentError("angular label index out of range");
    return all()[idx];
}

const std::array<AngularLabel, 4>& AngularLabel::all() {
    static const std::array<AngularLabel, 4> labels = {AngularLabel(-2), AngularLabel(-1), AngularLabel(1),
                                                       AngularLabel(2)};
    return labels;
}

std::size_t AngularLabel::index() const {
    switch (value_) {
        case -2: return 0;
        case -1: return 1;
        case 1: return 2;
        default: return 3;
    }
}

IonLevel IonLevel::ground(Spin s) {
    return IonLevel{s == Spin::Down ? Kind::GroundDown : Kind::GroundUp, 0};
}

IonLevel IonLevel::excited(int j) {
    if (j < 1 || j > 6) throw ArgumentError("excited sublevel index must be in 1..6");
    return IonLevel{Kind::Excited, j};
}

double IonLevel::mj() const {
    switch (kind) {
        case Kind::GroundDown: return -0.5;
        case Kind::GroundUp: return 0.5;
        default: return j - 3.5;
    }
}

void PhysicalConfig::validate() const {
    auto bad = [](const char* what) { throw ArgumentError(std::string("invalid physical config: ") + what); };
    if (!(kappa > 0.0)) bad("kappa must be > 0");
    if (!(sigma_omega > 0.0)) bad("sigma_omega must be > 0");
    if (!(g_ref >= 0.0)) bad("g_ref must be >= 0");
    if (!(gamma >= 0.0)) bad("gamma must be >= 0");
    if (!(B >= 0.0)) bad("B must be >= 0");
    if (!(omega0 >= 0.0)) bad("omega0 must be >= 0");
    for (double s : cavity_split) {
        if (!std::isfinite(s)) bad("cavity_split must be finite");
    }
}

double CouplingTable::g_down(int j) const {
    if (j < 1 || j > 5) throw ArgumentError("down coupling index must be in 1..5");
    return down[j];
}

double CouplingTable::g_up(int j) const {
    if (j < 2 || j > 6) throw ArgumentError("up coupling index must be in 2..6");
    return up[j];
}

double ZeemanShifts::offset(int j) const {
    if (j < 1 || j > 6) throw ArgumentError("excited sublevel index must be in 1..6");
    return excited_offsets[j];
}

namespace {

// Twice the argument as an integer; rejects values that are not multiples of 1/2.
int twice(double x) {
    double t = 2.0 * x;
    double r = std::round(t);
    if (!std::isfinite(x) || std::abs(t - r) > 1e-9) {
        std::ostringstream os;
        os << "argument " << x << " is not a multiple of 1/2";
        throw ArgumentError(os.str());
    }
    return static_cast<int>(r);
}

long double factorial(int n) {
    static const auto table = [] {
        std::array<long double, 171> t{};
        t[0] = 1.0L;
        for (int i = 1; i < 171; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    if (n < 0 || n > 170) throw ArgumentError("factorial argument out of range");
    return table[n];
}

}  // namespace

double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3) {
    const int J1 = twice(j1), J2 = twice(j2), J3 = twice(j3);
    const int M1 = twice(m1), M2 = twice(m2), M3 = twice(m3);
    if (J1 < 0 || J2 < 0 || J3 < 0) throw ArgumentError("angular momenta must be non-negative");
    if (std::abs(M1) > J1 || std::abs(M2) > J2 || std::abs(M3) > J3) {
        throw ArgumentError("|m| must not exceed j");
    }
    if (((J1 + M1) % 2) != 0 || ((J2 + M2) % 2) != 0 || ((J3 + M3) % 2) != 0) {
        throw ArgumentError("j and m must both be integer or both half-integer");
    }
    if (M1 + M2 + M3 != 0) return 0.0;
    if (J3 > J1 + J2 || J3 < std::abs(J1 - J2)) return 0.0;
    if (((J1 + J2 + J3) % 2) != 0) return 0.0;

    // Half-sums below are all integers once the parity checks pass.
    const int a = (J1 + J2 - J3) / 2;
    const int b = (J1 - J2 + J3) / 2;
    const int c = (-J1 + J2 + J3) / 2;
    const int s = (J1 + J2 + J3) / 2;
    const long double tri = factorial(a) * factorial(b) * factorial(c) / factorial(s + 1);
    const long double pref = std::sqrt(tri * factorial((J1 + M1) / 2) * factorial((J1 - M1) / 2) *
                                       factorial((J2 + M2) / 2) * factorial((J2 - M2) / 2) *
                                       factorial((J3 + M3) / 2) * factorial((J3 - M3) / 2));

    const int t1 = (J3 - J2 + M1) / 2;   // j3 - j2 + m1
    const int t2 = (J3 - J1 - M2) / 2;   // j3 - j1 - m2
    const int t3 = a;                    // j1 + j2 - j3
    const int t4 = (J1 - M1) / 2;        // j1 - m1
    const int t5 = (J2 + M2) / 2;        // j2 + m2
    const int kmin = std::max({0, -t1, -t2});
    const int kmax = std::min({t3, t4, t5});
    long double sum = 0.0L;
    for (int k = kmin; k <= kmax; ++k) {
        long double den = factorial(k) * factorial(t1 + k) * factorial(t2 + k) * factorial(t3 - k) *
                          factorial(t4 - k) * factorial(t5 - k);
        sum += ((k % 2) ? -1.0L : 1.0L) / den;
    }
    const int phase2 = J1 - J2 - M3;  // twice (j1 - j2 - m3), always even here
    const long double sign = ((phase2 / 2) % 2 == 0) ? 1.0L : -1.0L;
    return static_cast<double>(sign * pref * sum);
}

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
    const int phase2 = twice(j1) - twice(j2) + twice(M);
    const double sign = ((phase2 / 2) % 2 == 0) ? 1.0 : -1.0;
    return sign * std::sqrt(2.0 * J + 1.0) * wigner_3j(j1, j2, J, m1, m2, -M);
}

CouplingTable coupling_table(const PhysicalConfig& cfg) {
    CouplingTable t;
    const double g = cfg.g_ref;
    if (!cfg.use_cg_scaling) {
        for (int j = 1; j <= 5; ++j) t.down[j] = g;
        for (int j = 2; j <= 6; ++j) t.up[j] = g;
        return t;
    }
    // Ratios relative to the Delta m = 0 transition; the up table mirrors the down table.
    const std::array<double, 6> ratio = {0.0, 1.0 / std::sqrt(6.0), std::sqrt(2.0 / 3.0), 1.0, std::sqrt(3.0) / 2.0,
                                         std::sqrt(3.0 / 5.0)};
    for (int j = 1; j <= 5; ++j) t.down[j] = g * ratio[j];
    for (int j = 2; j <= 6; ++j) t.up[j] = g * ratio[7 - j];
    return t;
}

ZeemanShifts zeeman_shifts(const PhysicalConfig& cfg) {
    ZeemanShifts z;
    const double muB_B = kMuB * cfg.B;
    z.delta = kLandeD * muB_B;
    z.ground_split = kLandeS * muB_B;
    z.delta_m2 = (kLandeS - kLandeD) * muB_B;
    for (int j = 1; j <= 6; ++j) z.excited_offsets[j] = (IonLevel::excited(j).mj() - 1.5) * z.delta;
    return z;
}

int excited_level(Spin s, AngularLabel L) {
    // Down couples to j = 1, 2, 4, 5; up to j = 2, 3, 5, 6 (L = 0 pair excluded).
    static constexpr std::array<int, 4> down = {1, 2, 4, 5};
    static constexpr std::array<int, 4> up = {2, 3, 5, 6};
    return s == Spin::Down ? down[L.index()] : up[L.index()];
}

double channel_coupling(const PhysicalConfig& cfg, const CouplingTable& table, Spin s, AngularLabel L) {
    if (cfg.resonant_only && !(s == Spin::Down && L.value() == 2)) return 0.0;
    const int j = excited_level(s, L);
    return s == Spin::Down ? table.g_down(j) : table.g_up(j);
}

double channel_ion_detuning(const ZeemanShifts& z, Spin s, AngularLabel L) {
    const int j = excited_level(s, L);
    return s == Spin::Down ? z.offset(j) : z.offset(j) - z.ground_split;
}

}  // namespace cpf
