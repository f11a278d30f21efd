#include "cpf/hamiltonian.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "cpf/errors.hpp"

namespace cpf {

BasisIndex::BasisIndex(int n_bins, Registers regs) : n_bins_(n_bins), regs_(static_cast<int>(regs)) {
    if (n_bins < 2) throw ArgumentError("basis needs at least 2 bins per block");
    if (regs_ != 1 && regs_ != 2) throw ArgumentError("one or two photon registers supported");
}

BasisLabel BasisIndex::label_of(std::size_t idx) const {
    if (idx >= dimension()) throw DimensionError("basis index out of range");
    BasisLabel b;
    if (idx < 16) {
        const std::size_t sec = idx % 8;
        b.kind = idx < 8 ? BasisLabel::Kind::Cavity : BasisLabel::Kind::Excited;
        b.label = AngularLabel::from_index(sec / 2).value();
        b.spin = static_cast<Spin>(sec % 2);
        if (b.kind == BasisLabel::Kind::Excited) b.excited_j = excited_level(b.spin, AngularLabel(b.label));
        return b;
    }
    std::size_t rest = idx - 16;
    b.kind = BasisLabel::Kind::Photon;
    b.reg = static_cast<int>(rest / (8 * static_cast<std::size_t>(n_bins_)));
    rest %= 8 * static_cast<std::size_t>(n_bins_);
    const std::size_t sec = rest / n_bins_;
    b.bin = static_cast<int>(rest % n_bins_);
    b.label = AngularLabel::from_index(sec / 2).value();
    b.spin = static_cast<Spin>(sec % 2);
    return b;
}

std::size_t BasisIndex::index_of(const BasisLabel& b) const {
    const AngularLabel L(b.label);
    switch (b.kind) {
        case BasisLabel::Kind::Cavity: return cavity(L, b.spin);
        case BasisLabel::Kind::Excited:
            if (b.excited_j != excited_level(b.spin, L)) throw ArgumentError("excited level does not pair with (L, spin)");
            return excited(L, b.spin);
        default:
            if (b.reg < 0 || b.reg >= regs_ || b.bin < 0 || b.bin >= n_bins_) {
                throw ArgumentError("photon label out of range");
            }
            return photon(b.reg, L, b.spin, b.bin);
    }
}

BasisIndex build_basis(int n_bins, Registers regs) { return BasisIndex(n_bins, regs); }

HamiltonianBlocks assemble(const PhysicalConfig& cfg, const FrequencyGrid& grid, const CouplingTable& couplings,
                           const ZeemanShifts& zeeman, Registers regs) {
    cfg.validate();
    if (grid.n_bins < 2 || grid.total_bins() < 2 || !(grid.delta_omega > 0.0)) {
        throw AssemblyError("frequency grid is inconsistent");
    }
    HamiltonianBlocks h;
    h.basis = BasisIndex(grid.total_bins(), regs);
    h.grid = grid;
    for (AngularLabel L : AngularLabel::all()) {
        h.a_drive_pattern[L.index()] = {static_cast<int>(BasisIndex::cavity(L, Spin::Down)),
                                        static_cast<int>(BasisIndex::cavity(L, Spin::Up))};
        for (Spin s : kSpins) {
            const std::size_t k = BasisIndex::sector(L, s);
            h.a_static[k] = cfg.cavity_split[L.index()];
            h.d_block[k] = channel_ion_detuning(zeeman, s, L);
            const double g = channel_coupling(cfg, couplings, s, L);
            if (!(g >= 0.0) || !std::isfinite(g)) throw AssemblyError("coupling table entries must be finite and >= 0");
            h.b_block[k] = g;
        }
    }
    h.ph_diag = grid.frequencies();
    h.kappa = cfg.kappa;
    return h;
}

HamiltonianBlocks assemble(const PhysicalConfig& cfg, const FrequencyGrid& grid, Registers regs) {
    return assemble(cfg, grid, coupling_table(cfg), zeeman_shifts(cfg), regs);
}

void apply_hamiltonian(const HamiltonianBlocks& h, const Controls& c, const cplx* in, cplx* out) {
    const int N = h.basis.n_bins();
    const int regs = h.basis.registers();
    const std::array<double, 2> kap = {c.kappa1, c.kappa2};
    const cplx om = c.omega;
    const cplx omc = std::conj(c.omega);

    for (std::size_t k = 0; k < 8; ++k) {
        const std::size_t cav = k, exc = 8 + k;
        out[cav] = h.a_static[k] * in[cav] + h.b_block[k] * in[exc];
        out[exc] = h.d_block[k] * in[exc] + h.b_block[k] * in[cav];
    }
    for (std::size_t l = 0; l < 4; ++l) {
        out[2 * l] += om * in[2 * l + 1];
        out[2 * l + 1] += omc * in[2 * l];
    }
    for (int r = 0; r < regs; ++r) {
        for (std::size_t k = 0; k < 8; ++k) {
            const std::size_t base = h.basis.photon_block(r, k);
            const std::size_t partner = h.basis.photon_block(r, k ^ 1u);
            const cplx w = (k % 2 == 0) ? om : omc;
            const double kp = kap[r];
            const cplx cav = in[k];
            cplx sum = 0.0;
            for (int m = 0; m < N; ++m) {
                const cplx x = in[base + m];
                out[base + m] = h.ph_diag[m] * x + w * in[partner + m] + kp * cav;
                sum += x;
            }
            out[k] += kp * sum;
        }
    }
}

StateVector apply_hamiltonian(const HamiltonianBlocks& h, const Controls& c, const StateVector& state) {
    if (state.size() != h.dimension()) {
        throw DimensionError("state length " + std::to_string(state.size()) + " does not match basis dimension " +
                             std::to_string(h.dimension()));
    }
    StateVector out(state.size());
    apply_hamiltonian(h, c, state.data(), out.data());
    return out;
}

std::vector<Triplet> hamiltonian_triplets(const HamiltonianBlocks& h, const Controls& c) {
    std::vector<Triplet> t;
    const auto& B = h.basis;
    const int N = B.n_bins();
    auto add = [&](std::size_t r, std::size_t col, cplx v) {
        if (v != cplx(0.0)) t.push_back({r, col, v});
    };
    for (AngularLabel L : AngularLabel::all()) {
        for (Spin s : kSpins) {
            const std::size_t k = BasisIndex::sector(L, s);
            add(B.cavity(L, s), B.cavity(L, s), h.a_static[k]);
            add(B.excited(L, s), B.excited(L, s), h.d_block[k]);
            add(B.cavity(L, s), B.excited(L, s), h.b_block[k]);
            add(B.excited(L, s), B.cavity(L, s), h.b_block[k]);
        }
        add(B.cavity(L, Spin::Down), B.cavity(L, Spin::Up), c.omega);
        add(B.cavity(L, Spin::Up), B.cavity(L, Spin::Down), std::conj(c.omega));
        for (int r = 0; r < B.registers(); ++r) {
            const double kp = r == 0 ? c.kappa1 : c.kappa2;
            for (int m = 0; m < N; ++m) {
                const std::size_t dn = B.photon(r, L, Spin::Down, m);
                const std::size_t up = B.photon(r, L, Spin::Up, m);
                add(dn, dn, h.ph_diag[m]);
                add(up, up, h.ph_diag[m]);
                add(dn, up, c.omega);
                add(up, dn, std::conj(c.omega));
                for (Spin s : kSpins) {
                    const std::size_t p = B.photon(r, L, s, m);
                    add(p, B.cavity(L, s), kp);
                    add(B.cavity(L, s), p, kp);
                }
            }
        }
    }
    return t;
}

void write_triplets(std::ostream& os, const std::vector<Triplet>& triplets) {
    os << "# row col re im\n";
    os << std::setprecision(17);
    for (const auto& t : triplets) os << t.row << ' ' << t.col << ' ' << t.value.real() << ' ' << t.value.imag() << '\n';
}

Eigen::MatrixXcd dense_hamiltonian(const HamiltonianBlocks& h, const Controls& c) {
    if (h.dimension() > 4096) throw ResourceError("dense assembly limited to dimension 4096");
    const auto n = static_cast<Eigen::Index>(h.dimension());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& t : hamiltonian_triplets(h, c)) {
        m(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.value;
    }
    return m;
}

}  // namespace cpf
