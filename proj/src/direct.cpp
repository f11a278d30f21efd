#include <cmath>
#include <sstream>

#include <Eigen/Sparse>

#include "cpf/errors.hpp"
#include "cpf/gate.hpp"
#include "cpf/krylov.hpp"

namespace cpf {

namespace {

// Two-excitation space with both photons tracked explicitly.
//   S0: ion spin s, photon 1 in bin (L1, m1), photon 2 in bin (L2, m2)
//   S1: photon 1 inside the cavity/ion (16 states), photon 2 in bin (L2, m2)
//   S2: photon 2 inside the cavity/ion, photon 1 in bin (L1, m1)
class DirectSpace {
public:
    explicit DirectSpace(int bins) : n_(bins), w_(4 * static_cast<std::size_t>(bins)) {}

    std::size_t photon(int l, int m) const { return static_cast<std::size_t>(l) * n_ + m; }
    std::size_t s0(int s, std::size_t p1, std::size_t p2) const { return s * w_ * w_ + p1 * w_ + p2; }
    std::size_t s1(std::size_t ic, std::size_t p2) const { return 2 * w_ * w_ + ic * w_ + p2; }
    std::size_t s2(std::size_t ic, std::size_t p1) const { return 2 * w_ * w_ + 16 * w_ + ic * w_ + p1; }
    std::size_t dimension() const { return 2 * w_ * w_ + 32 * w_; }
    std::size_t width() const { return w_; }
    int bins() const { return n_; }

private:
    int n_;
    std::size_t w_;
};

using SparseH = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

SparseH build(const DirectSpace& sp, const HamiltonianBlocks& h, cplx omega, double k1, double k2) {
    const int N = sp.bins();
    const std::size_t W = sp.width();
    std::vector<Eigen::Triplet<cplx>> t;
    auto add = [&](std::size_t r, std::size_t c, cplx v) {
        if (v != cplx(0.0)) t.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
    };
    auto freq = [&](std::size_t p) { return h.ph_diag[p % N]; };

    for (std::size_t p1 = 0; p1 < W; ++p1)
        for (std::size_t p2 = 0; p2 < W; ++p2) {
            const int l1 = static_cast<int>(p1 / N), l2 = static_cast<int>(p2 / N);
            const double e = freq(p1) + freq(p2);
            const std::size_t dn = sp.s0(0, p1, p2), up = sp.s0(1, p1, p2);
            add(dn, dn, e);
            add(up, up, e);
            add(dn, up, omega);
            add(up, dn, std::conj(omega));
            for (int s = 0; s < 2; ++s) {
                const std::size_t a = sp.s0(s, p1, p2);
                const std::size_t c1 = sp.s1(2 * l1 + s, p2);
                const std::size_t c2 = sp.s2(2 * l2 + s, p1);
                add(a, c1, k1);
                add(c1, a, k1);
                add(a, c2, k2);
                add(c2, a, k2);
            }
        }

    auto ion_cavity = [&](auto index, std::size_t p) {
        const double e = freq(p);
        for (std::size_t k = 0; k < 8; ++k) {
            add(index(k, p), index(k, p), h.a_static[k] + e);
            add(index(8 + k, p), index(8 + k, p), h.d_block[k] + e);
            add(index(k, p), index(8 + k, p), h.b_block[k]);
            add(index(8 + k, p), index(k, p), h.b_block[k]);
        }
        for (std::size_t l = 0; l < 4; ++l) {
            add(index(2 * l, p), index(2 * l + 1, p), omega);
            add(index(2 * l + 1, p), index(2 * l, p), std::conj(omega));
        }
    };
    for (std::size_t p = 0; p < W; ++p) {
        ion_cavity([&](std::size_t ic, std::size_t q) { return sp.s1(ic, q); }, p);
        ion_cavity([&](std::size_t ic, std::size_t q) { return sp.s2(ic, q); }, p);
    }
    const auto n = static_cast<Eigen::Index>(sp.dimension());
    SparseH H(n, n);
    H.setFromTriplets(t.begin(), t.end());
    return H;
}

void propagate(std::vector<cplx>& psi, const SparseH& H, double duration, const EvolutionParams& params) {
    if (duration <= 0.0) return;
    if (!(params.dt > 0.0)) throw ArgumentError("dt must be > 0");
    const int steps = std::max(1, static_cast<int>(std::ceil(duration / params.dt - 1e-9)));
    const double dt = duration / steps;
    const auto n = static_cast<Eigen::Index>(psi.size());
    auto apply = [&](const cplx* in, cplx* out) {
        Eigen::Map<const Eigen::VectorXcd> x(in, n);
        Eigen::Map<Eigen::VectorXcd> y(out, n);
        y.noalias() = H * x;
    };
    KrylovOptions opt;
    opt.tolerance = params.krylov_tol;
    for (int i = 0; i < steps; ++i) krylov_expm(apply, psi, dt, opt);
}

}  // namespace

GateResult run_gate_direct(const TwoPhotonState& input, const DirectSetup& setup, const ChannelTable& reference,
                           const GateOptions& options) {
    const FrequencyGrid& grid = setup.grid;
    const int N = grid.total_bins();
    if (N > setup.max_bins) {
        std::ostringstream os;
        os << "direct simulation limited to " << setup.max_bins << " bins (requested " << N << ")";
        throw ResourceError(os.str());
    }
    if (static_cast<int>(setup.profile.size()) != N) throw DimensionError("profile length does not match grid");
    if (static_cast<int>(reference.bins()) != N) throw DimensionError("reference table does not match grid");
    double n_in = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) n_in += std::norm(input.amps[i][j]);
    if (std::abs(n_in - 1.0) > 1e-9) throw PreconditionError("input state must be normalised");

    const DirectSpace sp(N);
    const HamiltonianBlocks h = assemble(setup.cfg, grid, Registers::One);
    const double bk = bin_coupling(setup.cfg.kappa, grid.delta_omega);
    const PulseSchedule sched = build_schedule(setup.cfg, setup.scatter_window, bk);
    const double t1 = sched.t[1], t3 = sched.t[3], T = sched.total();
    const double ta = setup.arrival;

    std::vector<cplx> psi(sp.dimension(), cplx(0.0));
    const auto& f = setup.profile.amplitudes;
    for (int l1 = 0; l1 < 4; ++l1)
        for (int l2 = 0; l2 < 4; ++l2) {
            const cplx a = input.amps[l1][l2];
            if (a == cplx(0.0)) continue;
            for (int m1 = 0; m1 < N; ++m1)
                for (int m2 = 0; m2 < N; ++m2) {
                    const double w1 = h.ph_diag[m1], w2 = h.ph_diag[m2];
                    psi[sp.s0(0, sp.photon(l1, m1), sp.photon(l2, m2))] =
                        a * f[m1] * f[m2] * std::polar(1.0, w1 * (t1 + ta) + w2 * (t3 + ta));
                }
        }

    static constexpr std::array<int, 3> rot_segments = {1, 3, 5};
    for (int seg = 1; seg <= 6; ++seg) {
        const double dur = sched.t[seg] - sched.t[seg - 1];
        if (dur <= 0.0) continue;
        cplx om = sched.omega_on(seg);
        for (int r = 0; r < 3; ++r)
            if (rot_segments[r] == seg) om *= options.area_factors[r];
        const SparseH H = build(sp, h, om, sched.kappa1_on(seg), sched.kappa2_on(seg));
        propagate(psi, H, dur, setup.params);
    }

    double leak = 0.0;
    for (std::size_t i = 2 * sp.width() * sp.width(); i < psi.size(); ++i) leak += std::norm(psi[i]);
    if (options.strict && leak > options.strict_leakage) {
        std::ostringstream os;
        os << "direct simulation leakage " << leak << " above strict bound " << options.strict_leakage;
        throw IncompleteScatteringError(os.str());
    }

    auto ref_table = std::make_shared<ChannelTable>(reference);
    GateResult r;
    double total = 0.0;
    for (Spin o : kSpins) {
        const int oi = static_cast<int>(o);
        TwoPhotonState out;
        out.amps = input.amps;
        out.dense_bins = N;
        out.dense.assign(sp.width() * sp.width(), cplx(0.0));
        for (int l1 = 0; l1 < 4; ++l1) {
            const double sgn = (options.feed_forward && o == Spin::Down && l1 == 3) ? -1.0 : 1.0;
            for (int m1 = 0; m1 < N; ++m1)
                for (int l2 = 0; l2 < 4; ++l2)
                    for (int m2 = 0; m2 < N; ++m2) {
                        const std::size_t p1 = sp.photon(l1, m1), p2 = sp.photon(l2, m2);
                        const double w1 = h.ph_diag[m1], w2 = h.ph_diag[m2];
                        out.dense[p1 * sp.width() + p2] = sgn * psi[sp.s0(oi, p1, p2)] *
                                                          std::polar(1.0, w1 * (T - t1 - ta) + w2 * (T - t3 - ta));
                    }
        }
        TwoPhotonState ref;
        ref.amps = input.amps;
        ref.spectra1 = ref.spectra2 = ref_table;
        const Mat22 c = outcome_paths(o, {1.0, 1.0, 1.0});
        for (int l1 = 0; l1 < 4; ++l1) {
            const double sgn = (options.feed_forward && o == Spin::Down && l1 == 3) ? -1.0 : 1.0;
            for (int l2 = 0; l2 < 4; ++l2)
                for (int s1 = 0; s1 < 2; ++s1)
                    for (int s2 = 0; s2 < 2; ++s2) ref.paths[l1][l2][s1][s2] = sgn * c[s1][s2];
        }
        const double ns = norm2(out), nr = norm2(ref);
        const cplx ov = inner(ref, out);
        r.outcome_probs[oi] = ns;
        r.fidelity[oi] = (ns > 0.0 && nr > 0.0) ? std::min(1.0, std::norm(ov) / (ns * nr)) : 0.0;
        total += ns;
        r.outcome_states[oi] = std::move(out);
    }
    r.combined_fidelity = total > 0.0 ? (r.outcome_probs[0] * r.fidelity[0] + r.outcome_probs[1] * r.fidelity[1]) / total : 0.0;
    return r;
}

}  // namespace cpf
