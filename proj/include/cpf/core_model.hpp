#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>

namespace cpf {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Bohr magneton in rad/s per mT, Lande factors of S1/2 and D5/2.
inline constexpr double kMuB = 14.0e6;
inline constexpr double kLandeS = 2.0;
inline constexpr double kLandeD = 1.2;

enum class Spin : int { Down = 0, Up = 1 };

inline constexpr std::array<Spin, 2> kSpins = {Spin::Down, Spin::Up};

const char* to_string(Spin s);

// Photonic qudit label L = s + l, one of -2, -1, +1, +2.
class AngularLabel {
public:
    explicit AngularLabel(int value);

    static AngularLabel from_index(std::size_t idx);
    static const std::array<AngularLabel, 4>& all();

    int value() const { return value_; }
    // Position in the fixed order (-2, -1, +1, +2).
    std::size_t index() const;

    friend bool operator==(AngularLabel a, AngularLabel b) { return a.value_ == b.value_; }

private:
    int value_;
};

struct IonLevel {
    enum class Kind { GroundDown, GroundUp, Excited };
    Kind kind;
    int j = 0;  // 1..6 for excited sublevels

    static IonLevel ground(Spin s);
    static IonLevel excited(int j);
    double mj() const;
};

struct PhysicalConfig {
    double g_ref = 0.0;        // rad/s
    double kappa = 0.0;        // rad/s
    double gamma = 0.0;        // rad/s, analytic use only
    double B = 0.0;            // mT
    double omega0 = 0.0;       // rad/s
    double sigma_omega = 0.0;  // rad/s
    std::array<double, 4> cavity_split{};  // rad/s, indexed by AngularLabel::index()
    bool use_cg_scaling = true;
    // Keep only the resonant |down> <-> |5> transition (pulse-distortion-only model).
    bool resonant_only = false;

    void validate() const;
};

struct CouplingTable {
    std::array<double, 7> down{};  // entries 1..5
    std::array<double, 7> up{};    // entries 2..6

    double g_down(int j) const;
    double g_up(int j) const;
};

struct ZeemanShifts {
    double delta = 0.0;
    double delta_m2 = 0.0;
    double ground_split = 0.0;
    std::array<double, 7> excited_offsets{};  // entries 1..6, relative to |5>

    double offset(int j) const;
};

// Racah closed form. Arguments must be multiples of 1/2.
double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3);

// <j1 m1; j2 m2 | J M> from the 3j symbol.
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

CouplingTable coupling_table(const PhysicalConfig& cfg);
ZeemanShifts zeeman_shifts(const PhysicalConfig& cfg);

// Excited sublevel reached from ground branch s by a photon with label L.
int excited_level(Spin s, AngularLabel L);

// Coupling of the (s, L) channel; zero for disabled transitions.
double channel_coupling(const PhysicalConfig& cfg, const CouplingTable& table, Spin s, AngularLabel L);

// Energy of the excited partner of (s, L) in the simulation frame, relative to w_c.
// Up-branch partners carry -ground_split because the up branch lives in the drive frame.
double channel_ion_detuning(const ZeemanShifts& z, Spin s, AngularLabel L);

}  // namespace cpf
