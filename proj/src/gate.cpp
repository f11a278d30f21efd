#include "cpf/gate.hpp"

#include <cmath>
#include <sstream>

#include "cpf/errors.hpp"
#include "cpf/parallel.hpp"

namespace cpf {

namespace {

constexpr cplx I(0.0, 1.0);

cplx dot(const SpectralAmplitude& a, const SpectralAmplitude& b) {
    if (a.size() != b.size()) throw DimensionError("spectral amplitudes on different grids");
    cplx s = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) s += std::conj(a.amplitudes[m]) * b.amplitudes[m];
    return s;
}

Mat22 gram(const ChannelTable& a, const ChannelTable& b, AngularLabel L) {
    Mat22 g{};
    for (Spin t : kSpins) {
        for (Spin s : kSpins) g[static_cast<int>(t)][static_cast<int>(s)] = dot(a.at(L, t), b.at(L, s));
    }
    return g;
}

// sum conj(x[t1][t2]) y[s1][s2] g1[t1][s1] g2[t2][s2]
cplx path_contract(const Mat22& x, const Mat22& y, const Mat22& g1, const Mat22& g2) {
    cplx acc = 0.0;
    for (int t1 = 0; t1 < 2; ++t1)
        for (int t2 = 0; t2 < 2; ++t2) {
            const cplx cx = std::conj(x[t1][t2]);
            if (cx == cplx(0.0)) continue;
            for (int s1 = 0; s1 < 2; ++s1)
                for (int s2 = 0; s2 < 2; ++s2) acc += cx * y[s1][s2] * g1[t1][s1] * g2[t2][s2];
        }
    return acc;
}

std::vector<cplx> to_dense(const TwoPhotonState& x, int bins) {
    if (x.has_dense()) {
        if (x.dense_bins != bins) throw DimensionError("dense states on different grids");
        return x.dense;
    }
    if (!x.has_spectra()) throw ArgumentError("state has no spectral resolution");
    const std::size_t W = 4 * static_cast<std::size_t>(bins);
    std::vector<cplx> d(W * W, cplx(0.0));
    for (std::size_t l1 = 0; l1 < 4; ++l1)
        for (std::size_t l2 = 0; l2 < 4; ++l2) {
            const cplx a = x.amps[l1][l2];
            if (a == cplx(0.0)) continue;
            const AngularLabel L1 = AngularLabel::from_index(l1), L2 = AngularLabel::from_index(l2);
            for (Spin s1 : kSpins)
                for (Spin s2 : kSpins) {
                    const cplx w = a * x.paths[l1][l2][static_cast<int>(s1)][static_cast<int>(s2)];
                    if (w == cplx(0.0)) continue;
                    const auto& f1 = x.spectra1->at(L1, s1).amplitudes;
                    const auto& f2 = x.spectra2->at(L2, s2).amplitudes;
                    for (int m1 = 0; m1 < bins; ++m1) {
                        const cplx w1 = w * f1[m1];
                        cplx* row = d.data() + (l1 * bins + m1) * W + l2 * bins;
                        for (int m2 = 0; m2 < bins; ++m2) row[m2] += w1 * f2[m2];
                    }
                }
        }
    return d;
}

void check_input(const TwoPhotonState& input) {
    double n = 0.0;
    for (const auto& row : input.amps)
        for (const auto& a : row) n += std::norm(a);
    if (std::abs(n - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "input state must be normalised (norm^2 = " << n << ")";
        throw PreconditionError(os.str());
    }
}

double ff_sign(Spin outcome, std::size_t l1, const GateOptions& options) {
    return (options.feed_forward && outcome == Spin::Down && l1 == 3) ? -1.0 : 1.0;
}

void set_paths(TwoPhotonState& st, Spin outcome, const Mat22& c, const GateOptions& options) {
    for (std::size_t l1 = 0; l1 < 4; ++l1) {
        const double sgn = ff_sign(outcome, l1, options);
        for (std::size_t l2 = 0; l2 < 4; ++l2)
            for (int s1 = 0; s1 < 2; ++s1)
                for (int s2 = 0; s2 < 2; ++s2) st.paths[l1][l2][s1][s2] = sgn * c[s1][s2];
    }
}

double fidelity_of(const cplx& ov, double na, double nb) {
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return std::min(1.0, std::norm(ov) / (na * nb));
}

}  // namespace

QuditState QuditState::basis(std::size_t idx) {
    if (idx >= 4) throw ArgumentError("qudit basis index out of range");
    QuditState q;
    q.amps[idx] = 1.0;
    return q;
}

double QuditState::norm2() const {
    double n = 0.0;
    for (const auto& a : amps) n += std::norm(a);
    return n;
}

TwoPhotonState TwoPhotonState::product(const QuditState& a, const QuditState& b) {
    TwoPhotonState s;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) s.amps[i][j] = a.amps[i] * b.amps[j];
    return s;
}

cplx inner(const TwoPhotonState& x, const TwoPhotonState& y) {
    if (x.has_dense() || y.has_dense()) {
        const int bins = x.has_dense() ? x.dense_bins : y.dense_bins;
        const auto dx = to_dense(x, bins);
        const auto dy = to_dense(y, bins);
        cplx s = 0.0;
        for (std::size_t i = 0; i < dx.size(); ++i) s += std::conj(dx[i]) * dy[i];
        return s;
    }
    if (x.has_spectra() != y.has_spectra()) throw ArgumentError("cannot overlap spectral and pure qudit states");
    cplx acc = 0.0;
    if (!x.has_spectra()) {
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) acc += std::conj(x.amps[i][j]) * y.amps[i][j];
        return acc;
    }
    std::array<Mat22, 4> g1, g2;
    for (AngularLabel L : AngularLabel::all()) {
        g1[L.index()] = gram(*x.spectra1, *y.spectra1, L);
        g2[L.index()] = gram(*x.spectra2, *y.spectra2, L);
    }
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const cplx a = std::conj(x.amps[i][j]) * y.amps[i][j];
            if (a == cplx(0.0)) continue;
            acc += a * path_contract(x.paths[i][j], y.paths[i][j], g1[i], g2[j]);
        }
    return acc;
}

double norm2(const TwoPhotonState& x) { return inner(x, x).real(); }

TwoPhotonState ideal_gate(const TwoPhotonState& input) {
    TwoPhotonState out;
    out.amps = input.amps;
    for (std::size_t i = 0; i < 3; ++i) out.amps[i][3] = -out.amps[i][3];
    return out;
}

Mat22 mw_rotation_matrix(int sign, double area_factor) {
    if (sign != 1 && sign != -1) throw ArgumentError("rotation sign must be +1 or -1");
    const double th = area_factor * kPi / 4.0;
    const cplx c = std::cos(th);
    const cplx s = -I * static_cast<double>(sign) * std::sin(th);
    return Mat22{{{c, s}, {s, c}}};
}

std::pair<cplx, cplx> mw_rotation(cplx down, cplx up, int sign, double area_factor) {
    const Mat22 r = mw_rotation_matrix(sign, area_factor);
    return {r[0][0] * down + r[0][1] * up, r[1][0] * down + r[1][1] * up};
}

Mat22 outcome_paths(Spin outcome, const std::array<double, 3>& area_factors) {
    const Mat22 r1 = mw_rotation_matrix(+1, area_factors[0]);
    const Mat22 r2 = mw_rotation_matrix(-1, area_factors[1]);
    const Mat22 r3 = mw_rotation_matrix(+1, area_factors[2]);
    const int o = static_cast<int>(outcome);
    Mat22 c{};
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) c[s1][s2] = r3[o][s2] * r2[s2][s1] * r1[s1][0];
    return c;
}

ChannelTable ideal_channels(const PhysicalConfig& cfg, const FrequencyGrid& grid, const SpectralAmplitude& profile,
                            PhaseModel model) {
    ChannelTable t;
    const double step = grid.delta_omega / 10.0;
    for (AngularLabel L : AngularLabel::all()) {
        for (Spin s : kSpins) {
            const auto k = BasisIndex::sector(L, s);
            const PhaseTaylor tay = phase_taylor(L, s, cfg, step, model);
            auto& out = t.out[k];
            out.amplitudes.resize(profile.size());
            for (std::size_t m = 0; m < profile.size(); ++m) {
                const double w = grid.frequency(static_cast<int>(m)) - grid.center;
                out.amplitudes[m] = profile.amplitudes[m] * std::polar(1.0, tay.phi0 + tay.phi1 * w);
            }
            t.mean_phase[k] = tay.phi0;
        }
    }
    return t;
}

ChannelTable analytic_channels(const PhysicalConfig& cfg, const FrequencyGrid& grid, const SpectralAmplitude& profile) {
    ChannelTable t;
    const auto table = coupling_table(cfg);
    const auto z = zeeman_shifts(cfg);
    for (AngularLabel L : AngularLabel::all()) {
        for (Spin s : kSpins) {
            const auto k = BasisIndex::sector(L, s);
            const double g = channel_coupling(cfg, table, s, L);
            const double ion = channel_ion_detuning(z, s, L);
            auto& out = t.out[k];
            out.amplitudes.resize(profile.size());
            cplx ov = 0.0;
            for (std::size_t m = 0; m < profile.size(); ++m) {
                const double w = grid.frequency(static_cast<int>(m)) - grid.center;
                out.amplitudes[m] =
                    reflect_physical(w, ion, g, cfg.kappa, 0.0, cfg.cavity_split[L.index()]) * profile.amplitudes[m];
                ov += std::conj(profile.amplitudes[m]) * out.amplitudes[m];
            }
            t.mean_phase[k] = std::arg(ov);
        }
    }
    return t;
}

ChannelTable compute_channels(const HamiltonianBlocks& h, const SpectralAmplitude& profile, const ScatterWindow& window,
                              const EvolutionParams& params, int threads) {
    ChannelTable t;
    parallel_for(8, threads, [&](std::size_t k) {
        const AngularLabel L = AngularLabel::from_index(k / 2);
        const Spin s = static_cast<Spin>(k % 2);
        ScatterOutcome o = scatter_photon(L, s, profile, h, window, params);
        t.out[k] = std::move(o.out_spectrum[k]);
        t.leakage[k] = o.leakage;
        t.mean_phase[k] = std::arg(dot(profile, t.out[k]));
    });
    return t;
}

GateEvaluator::GateEvaluator(std::shared_ptr<const ChannelTable> channels, std::shared_ptr<const ChannelTable> reference)
    : channels_(std::move(channels)), reference_(std::move(reference)) {
    if (!channels_ || !reference_) throw ArgumentError("gate evaluator needs channel and reference tables");
    if (channels_->bins() != reference_->bins()) throw DimensionError("channel and reference tables on different grids");
    for (AngularLabel L : AngularLabel::all()) {
        gram_[0][L.index()] = gram(*channels_, *channels_, L);
        gram_[1][L.index()] = gram(*reference_, *channels_, L);
        gram_[2][L.index()] = gram(*reference_, *reference_, L);
    }
}

GateResult GateEvaluator::run(const TwoPhotonState& input, const GateOptions& options) const {
    check_input(input);
    if (options.strict) {
        for (double leak : channels_->leakage) {
            if (leak > options.strict_leakage) {
                std::ostringstream os;
                os << "channel leakage " << leak << " above strict bound " << options.strict_leakage;
                throw IncompleteScatteringError(os.str());
            }
        }
    }
    GateResult r;
    double total = 0.0;
    for (Spin o : kSpins) {
        const int oi = static_cast<int>(o);
        TwoPhotonState sim;
        sim.amps = input.amps;
        sim.spectra1 = sim.spectra2 = channels_;
        set_paths(sim, o, outcome_paths(o, options.area_factors), options);
        TwoPhotonState ref;
        ref.amps = input.amps;
        ref.spectra1 = ref.spectra2 = reference_;
        set_paths(ref, o, outcome_paths(o, {1.0, 1.0, 1.0}), options);

        cplx ov = 0.0;
        double ns = 0.0, nr = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                const double p = std::norm(input.amps[i][j]);
                if (p == 0.0) continue;
                ns += p * path_contract(sim.paths[i][j], sim.paths[i][j], gram_[0][i], gram_[0][j]).real();
                ov += p * path_contract(ref.paths[i][j], sim.paths[i][j], gram_[1][i], gram_[1][j]);
                nr += p * path_contract(ref.paths[i][j], ref.paths[i][j], gram_[2][i], gram_[2][j]).real();
            }
        r.outcome_probs[oi] = ns;
        r.fidelity[oi] = fidelity_of(ov, ns, nr);
        total += ns;
        r.outcome_states[oi] = std::move(sim);
    }
    r.combined_fidelity = total > 0.0 ? (r.outcome_probs[0] * r.fidelity[0] + r.outcome_probs[1] * r.fidelity[1]) / total : 0.0;
    return r;
}

double GateEvaluator::fidelity(const QuditState& a, const QuditState& b, Spin outcome, const GateOptions& options) const {
    const Mat22 cs = outcome_paths(outcome, options.area_factors);
    const Mat22 cr = outcome_paths(outcome, {1.0, 1.0, 1.0});
    cplx ov = 0.0;
    double ns = 0.0, nr = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double pa = std::norm(a.amps[i]);
        if (pa == 0.0) continue;
        // The feed-forward sign multiplies both states and cancels in every contraction.
        for (std::size_t j = 0; j < 4; ++j) {
            const double p = pa * std::norm(b.amps[j]);
            if (p == 0.0) continue;
            ns += p * path_contract(cs, cs, gram_[0][i], gram_[0][j]).real();
            ov += p * path_contract(cr, cs, gram_[1][i], gram_[1][j]);
            nr += p * path_contract(cr, cr, gram_[2][i], gram_[2][j]).real();
        }
    }
    return fidelity_of(ov, ns, nr);
}

GateResult run_gate_channel(const TwoPhotonState& input, const ChannelTable& channels, const ChannelTable& reference,
                            const GateOptions& options) {
    GateEvaluator ev(std::make_shared<ChannelTable>(channels), std::make_shared<ChannelTable>(reference));
    return ev.run(input, options);
}

TruthTable truth_table(const ChannelTable& channels, const ChannelTable& reference, const GateOptions& options) {
    GateEvaluator ev(std::make_shared<ChannelTable>(channels), std::make_shared<ChannelTable>(reference));
    TruthTable tt;
    std::array<cplx, 16> z{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const std::size_t in = 4 * i + j;
            const TwoPhotonState input = TwoPhotonState::product(QuditState::basis(i), QuditState::basis(j));
            const GateResult r = ev.run(input, options);
            tt.fidelity[in] = r.fidelity[0];
            tt.prob_down[in] = r.outcome_probs[0];
            const TwoPhotonState& out = r.outcome_states[0];
            // Component norms per output label pair.
            double total = 0.0;
            std::array<double, 16> comp{};
            for (std::size_t k = 0; k < 4; ++k)
                for (std::size_t l = 0; l < 4; ++l) {
                    TwoPhotonState part = out;
                    part.amps = Amp44{};
                    part.amps[k][l] = out.amps[k][l];
                    comp[4 * k + l] = part.amps[k][l] == cplx(0.0) ? 0.0 : norm2(part);
                    total += comp[4 * k + l];
                }
            for (std::size_t o = 0; o < 16; ++o) tt.populations[in][o] = total > 0.0 ? comp[o] / total : 0.0;

            TwoPhotonState ref;
            ref.amps = input.amps;
            ref.spectra1 = ref.spectra2 = std::make_shared<ChannelTable>(ev.reference());
            set_paths(ref, Spin::Down, outcome_paths(Spin::Down, {1.0, 1.0, 1.0}), options);
            const double sign = ideal_gate(input).amps[i][j].real();
            z[in] = sign * inner(ref, out) / std::sqrt(std::max(1e-300, norm2(ref) * total));
        }
    // Phases relative to the |-2,-2> output, so the printed signs follow the gate pattern.
    const cplx anchor = std::abs(z[0]) > 0.0 ? std::conj(z[0]) / std::abs(z[0]) : cplx(1.0);
    double sum = 0.0;
    for (std::size_t in = 0; in < 16; ++in) {
        tt.signed_amplitude[in][in] = (z[in] * anchor).real();
        sum += tt.fidelity[in];
    }
    tt.mean_fidelity = sum / 16.0;
    return tt;
}

}  // namespace cpf
