#include "cpf/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cpf/errors.hpp"
#include "cpf/krylov.hpp"
#include "cpf/log.hpp"

namespace cpf {

std::string to_string(Method m) { return m == Method::TrotterSplit ? "trotter" : "krylov"; }

Method parse_method(const std::string& name) {
    if (name == "trotter") return Method::TrotterSplit;
    if (name == "krylov") return Method::KrylovExp;
    throw ArgumentError("unknown evolution method '" + name + "' (expected trotter or krylov)");
}

namespace {

constexpr cplx I(0.0, 1.0);

double squared_norm(const StateVector& s) {
    double n = 0.0;
    for (const auto& x : s) n += std::norm(x);
    return n;
}

// One symmetric step: D/2 Omega/2 Star Omega/2 D/2, every factor exact.
class StrangKernel {
public:
    StrangKernel(const HamiltonianBlocks& h, const Controls& c, double dt, const StateVector& state)
        : h_(h), N_(h.basis.n_bins()), regs_(h.basis.registers()), dt_(dt) {
        kap_ = {c.kappa1, c.kappa2};
        for (int r = regs_; r < 2; ++r) kap_[r] = 0.0;

        bin_half_.resize(N_);
        bin_full_.resize(N_);
        for (int m = 0; m < N_; ++m) {
            bin_half_[m] = std::polar(1.0, -h.ph_diag[m] * dt * 0.5);
            bin_full_[m] = bin_half_[m] * bin_half_[m];
        }
        for (std::size_t k = 0; k < 8; ++k) {
            ic_half_[k] = std::polar(1.0, -h.a_static[k] * dt * 0.5);
            ic_half_[8 + k] = std::polar(1.0, -h.d_block[k] * dt * 0.5);
        }
        for (std::size_t k = 0; k < 16; ++k) ic_full_[k] = ic_half_[k] * ic_half_[k];

        const double om = std::abs(c.omega);
        has_omega_ = om > 0.0;
        if (has_omega_) {
            om_cos_ = std::cos(om * dt * 0.5);
            om_sin_ = std::sin(om * dt * 0.5);
            om_phase_ = c.omega / om;
        }
        for (std::size_t k = 0; k < 8; ++k) {
            const double g = h.b_block[k];
            const double l2 = g * g + N_ * (kap_[0] * kap_[0] + kap_[1] * kap_[1]);
            lambda_[k] = std::sqrt(l2);
            star_cos_[k] = std::cos(lambda_[k] * dt);
            star_sin_[k] = std::sin(lambda_[k] * dt);
        }
        for (std::size_t k = 0; k < 8; ++k) active_[k] = sector_nonzero(state, k);
        if (has_omega_) {
            for (std::size_t k = 0; k < 8; k += 2) {
                const bool a = active_[k] || active_[k + 1];
                active_[k] = active_[k + 1] = a;
            }
        }
    }

    void run(StateVector& s, int steps, const Observer& observer, int every, double t0) {
        if (!observer) {
            diag(s, true);
            for (int i = 0; i < steps; ++i) {
                omega(s);
                star(s);
                omega(s);
                diag(s, i + 1 == steps);
            }
            return;
        }
        for (int i = 0; i < steps; ++i) {
            diag(s, true);
            omega(s);
            star(s);
            omega(s);
            diag(s, true);
            if ((i + 1) % every == 0 || i + 1 == steps) observer(t0 + (i + 1) * dt_, s);
        }
    }

private:
    bool sector_nonzero(const StateVector& s, std::size_t k) const {
        if (s[k] != cplx(0.0) || s[8 + k] != cplx(0.0)) return true;
        for (int r = 0; r < regs_; ++r) {
            const std::size_t base = h_.basis.photon_block(r, k);
            for (int m = 0; m < N_; ++m) {
                if (s[base + m] != cplx(0.0)) return true;
            }
        }
        return false;
    }

    void diag(StateVector& s, bool half) {
        const auto& ic = half ? ic_half_ : ic_full_;
        const auto& bins = half ? bin_half_ : bin_full_;
        for (std::size_t k = 0; k < 8; ++k) {
            if (!active_[k]) continue;
            s[k] *= ic[k];
            s[8 + k] *= ic[8 + k];
            for (int r = 0; r < regs_; ++r) {
                cplx* p = s.data() + h_.basis.photon_block(r, k);
                for (int m = 0; m < N_; ++m) p[m] *= bins[m];
            }
        }
    }

    void rotate(cplx& dn, cplx& up) const {
        const cplx a = dn, b = up;
        dn = om_cos_ * a - I * om_sin_ * om_phase_ * b;
        up = -I * om_sin_ * std::conj(om_phase_) * a + om_cos_ * b;
    }

    void omega(StateVector& s) {
        if (!has_omega_) return;
        for (std::size_t l = 0; l < 4; ++l) {
            if (!active_[2 * l]) continue;
            rotate(s[2 * l], s[2 * l + 1]);
            for (int r = 0; r < regs_; ++r) {
                cplx* dn = s.data() + h_.basis.photon_block(r, 2 * l);
                cplx* up = s.data() + h_.basis.photon_block(r, 2 * l + 1);
                for (int m = 0; m < N_; ++m) rotate(dn[m], up[m]);
            }
        }
    }

    void star(StateVector& s) {
        for (std::size_t k = 0; k < 8; ++k) {
            if (!active_[k] || lambda_[k] == 0.0) continue;
            const double g = h_.b_block[k];
            const double lam = lambda_[k];
            std::array<cplx, 2> sums{};
            for (int r = 0; r < regs_; ++r) {
                if (kap_[r] == 0.0) continue;
                const cplx* p = s.data() + h_.basis.photon_block(r, k);
                cplx acc = 0.0;
                for (int m = 0; m < N_; ++m) acc += p[m];
                sums[r] = acc;
            }
            const cplx c = s[k];
            const cplx proj = (g * s[8 + k] + kap_[0] * sums[0] + kap_[1] * sums[1]) / lam;
            const cplx c_new = star_cos_[k] * c - I * star_sin_[k] * proj;
            const cplx proj_new = -I * star_sin_[k] * c + star_cos_[k] * proj;
            const cplx delta = (proj_new - proj) / lam;
            s[k] = c_new;
            s[8 + k] += g * delta;
            for (int r = 0; r < regs_; ++r) {
                if (kap_[r] == 0.0) continue;
                const cplx add = kap_[r] * delta;
                cplx* p = s.data() + h_.basis.photon_block(r, k);
                for (int m = 0; m < N_; ++m) p[m] += add;
            }
        }
    }

    const HamiltonianBlocks& h_;
    int N_;
    int regs_;
    double dt_;
    std::array<double, 2> kap_{};
    std::vector<cplx> bin_half_, bin_full_;
    std::array<cplx, 16> ic_half_{}, ic_full_{};
    bool has_omega_ = false;
    double om_cos_ = 1.0, om_sin_ = 0.0;
    cplx om_phase_ = 1.0;
    std::array<double, 8> lambda_{}, star_cos_{}, star_sin_{};
    std::array<bool, 8> active_{};
};

double spectral_radius_bound(const HamiltonianBlocks& h, const Controls& c) {
    double diag = 0.0;
    for (double x : h.a_static) diag = std::max(diag, std::abs(x));
    for (double x : h.d_block) diag = std::max(diag, std::abs(x));
    for (double x : h.ph_diag) diag = std::max(diag, std::abs(x));
    double lam = 0.0;
    const int N = h.basis.n_bins();
    for (double g : h.b_block) {
        lam = std::max(lam, std::sqrt(g * g + N * (c.kappa1 * c.kappa1 + c.kappa2 * c.kappa2)));
    }
    return diag + lam + std::abs(c.omega);
}

void check_norm(double before, double after, const EvolutionParams& params, const char* where) {
    const double drift = std::abs(std::sqrt(after) - std::sqrt(before));
    if (drift > params.tolerance * std::max(1.0, std::sqrt(before))) {
        std::ostringstream os;
        os << where << ": norm drift " << drift << " exceeds tolerance " << params.tolerance
           << " (dt = " << params.dt << "); reduce the time step";
        throw StepSizeError(os.str());
    }
}

double max_abs_diff(const StateVector& a, const StateVector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Runs fn(params) and, if requested, repeats with halved dt until self-consistent.
template <class Fn>
StateVector with_convergence(const EvolutionParams& params, Fn&& fn) {
    StateVector prev = fn(params);
    if (!params.self_converge) return prev;
    EvolutionParams p = params;
    for (int i = 0; i < params.max_halvings; ++i) {
        p.dt *= 0.5;
        StateVector next = fn(p);
        const double diff = max_abs_diff(prev, next);
        prev = std::move(next);
        if (diff < params.converge_tol) return prev;
    }
    std::ostringstream os;
    os << "time step did not self-converge to " << params.converge_tol << " after " << params.max_halvings
       << " halvings";
    if (params.strict) throw StepSizeError(os.str());
    warn(os.str());
    return prev;
}

}  // namespace

void evolve_constant(StateVector& state, const HamiltonianBlocks& h, const Controls& c, double duration,
                     const EvolutionParams& params, double t0) {
    if (state.size() != h.dimension()) throw DimensionError("state length does not match basis dimension");
    if (!(params.dt > 0.0)) throw ArgumentError("dt must be > 0");
    if (duration <= 0.0) return;
    const int steps = std::max(1, static_cast<int>(std::ceil(duration / params.dt - 1e-9)));
    const double dt = duration / steps;
    const double bound = spectral_radius_bound(h, c) * dt;
    if (params.method == Method::KrylovExp) {
        KrylovOptions opt;
        opt.tolerance = params.krylov_tol;
        auto apply = [&](const cplx* in, cplx* out) { apply_hamiltonian(h, c, in, out); };
        for (int i = 0; i < steps; ++i) {
            krylov_expm(apply, state, dt, opt);
            if (params.observer && ((i + 1) % params.observe_every == 0 || i + 1 == steps)) {
                params.observer(t0 + (i + 1) * dt, state);
            }
        }
        return;
    }
    if (bound > 0.3) {
        std::ostringstream os;
        os << "dt * |H| = " << bound << " exceeds 0.3";
        warn(os.str());
    }
    StrangKernel kernel(h, c, dt, state);
    kernel.run(state, steps, params.observer, std::max(1, params.observe_every), t0);
}

StateVector evolve(StateVector state, const HamiltonianBlocks& h, const PulseSchedule& schedule, double t_a,
                   double t_b, const EvolutionParams& params) {
    if (!(t_a < t_b)) throw ArgumentError("evolve needs t_a < t_b");
    if (state.size() != h.dimension()) throw DimensionError("state length does not match basis dimension");
    const double before = squared_norm(state);
    auto run = [&](const EvolutionParams& p) {
        StateVector s = state;
        double t = t_a;
        while (t < t_b) {
            const int seg = schedule.segment_at(t);
            const double end = seg == 6 ? t_b : std::min(t_b, schedule.t[seg]);
            Controls c{schedule.omega_on(seg), schedule.kappa1_on(seg), schedule.kappa2_on(seg)};
            evolve_constant(s, h, c, end - t, p, t);
            if (end <= t) break;
            t = end;
        }
        return s;
    };
    StateVector out = with_convergence(params, run);
    check_norm(before, squared_norm(out), params, "evolve");
    return out;
}

ScatterWindow ScatterWindow::from_schedule(const PulseSchedule& s, int reg, double arrival) {
    ScatterWindow w;
    w.duration = s.scatter_window;
    w.arrival = arrival;
    w.bin_kappa = reg == 0 ? s.kappa1 : s.kappa2;
    w.reg = reg;
    return w;
}

ScatterOutcome scatter_state(const std::array<SpectralAmplitude, 8>& input, const HamiltonianBlocks& h,
                             const ScatterWindow& window, const EvolutionParams& params) {
    const int N = h.basis.n_bins();
    if (window.reg < 0 || window.reg >= h.basis.registers()) throw ArgumentError("scatter register out of range");
    if (!(window.duration > 0.0)) throw ArgumentError("scatter window must be > 0");
    if (h.kappa > 0.0 && window.duration * h.kappa < 10.0 - 1e-9) {
        warn("scatter window shorter than 10/kappa");
    }
    StateVector state(h.dimension(), cplx(0.0));
    for (std::size_t k = 0; k < 8; ++k) {
        const auto& amp = input[k].amplitudes;
        if (amp.empty()) continue;
        if (static_cast<int>(amp.size()) != N) throw DimensionError("profile length does not match grid");
        const std::size_t base = h.basis.photon_block(window.reg, k);
        for (int m = 0; m < N; ++m) state[base + m] = amp[m] * std::polar(1.0, h.ph_diag[m] * window.arrival);
    }
    const double before = squared_norm(state);
    const Controls c{0.0, window.reg == 0 ? window.bin_kappa : 0.0, window.reg == 1 ? window.bin_kappa : 0.0};
    auto run = [&](const EvolutionParams& p) {
        StateVector s = state;
        evolve_constant(s, h, c, window.duration, p);
        return s;
    };
    state = with_convergence(params, run);
    const double after = squared_norm(state);
    check_norm(before, after, params, "scatter_photon");

    ScatterOutcome out;
    out.input_norm = std::sqrt(before);
    for (std::size_t k = 0; k < 16; ++k) out.leakage += std::norm(state[k]);
    for (std::size_t k = 0; k < 8; ++k) {
        auto& spec = out.out_spectrum[k].amplitudes;
        spec.resize(N);
        const std::size_t base = h.basis.photon_block(window.reg, k);
        double branch = 0.0;
        for (int m = 0; m < N; ++m) {
            spec[m] = state[base + m] * std::polar(1.0, h.ph_diag[m] * (window.duration - window.arrival));
            branch += std::norm(spec[m]);
        }
        out.ion_branch_norms[k % 2] += branch;
    }
    if (out.leakage > 1e-2) {
        std::ostringstream os;
        os << "incomplete scattering: leakage " << out.leakage << " left in cavity/ion after the window";
        if (params.strict) throw IncompleteScatteringError(os.str());
        warn(os.str());
    }
    return out;
}

ScatterOutcome scatter_photon(AngularLabel L, Spin s, const SpectralAmplitude& profile, const HamiltonianBlocks& h,
                              const ScatterWindow& window, const EvolutionParams& params) {
    std::array<SpectralAmplitude, 8> input;
    input[BasisIndex::sector(L, s)] = profile;
    return scatter_state(input, h, window, params);
}

Observer trajectory_csv_observer(std::ostream& os, const HamiltonianBlocks& h) {
    os << "time";
    for (AngularLabel L : AngularLabel::all()) {
        for (Spin s : kSpins) {
            os << ",ion_cavity_L" << L.value() << '_' << to_string(s) << ",photon_L" << L.value() << '_' << to_string(s);
        }
    }
    os << '\n';
    return [&os, &h](double t, const StateVector& state) {
        os << std::setprecision(12) << t;
        for (std::size_t k = 0; k < 8; ++k) {
            const double ic = std::norm(state[k]) + std::norm(state[8 + k]);
            double ph = 0.0;
            for (int r = 0; r < h.basis.registers(); ++r) {
                const std::size_t base = h.basis.photon_block(r, k);
                for (int m = 0; m < h.basis.n_bins(); ++m) ph += std::norm(state[base + m]);
            }
            os << ',' << ic << ',' << ph;
        }
        os << '\n';
    };
}

}  // namespace cpf
