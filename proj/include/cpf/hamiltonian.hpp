#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "cpf/core_model.hpp"
#include "cpf/pulses.hpp"

namespace cpf {

using StateVector = std::vector<cplx>;

enum class Registers : int { One = 1, Two = 2 };

struct BasisLabel {
    enum class Kind { Cavity, Excited, Photon };
    Kind kind = Kind::Cavity;
    int label = 0;    // L value
    Spin spin = Spin::Down;
    int excited_j = 0;  // Excited only
    int reg = 0;        // Photon only: 0 or 1
    int bin = 0;        // Photon only

    friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

// Layout: 8 cavity states |1_L,s> at 2*l+s, 8 excited partners at 8+2*l+s, then for
// each register r the blocks (L,s) of n_bins bins at 16 + r*8N + (2*l+s)*N + m.
class BasisIndex {
public:
    BasisIndex(int n_bins, Registers regs);

    int n_bins() const { return n_bins_; }
    int registers() const { return regs_; }
    std::size_t dimension() const { return 16 + static_cast<std::size_t>(8 * regs_) * n_bins_; }

    static std::size_t sector(AngularLabel L, Spin s) { return 2 * L.index() + static_cast<int>(s); }
    static std::size_t cavity(AngularLabel L, Spin s) { return sector(L, s); }
    static std::size_t excited(AngularLabel L, Spin s) { return 8 + sector(L, s); }
    std::size_t photon(int reg, AngularLabel L, Spin s, int bin) const {
        return 16 + static_cast<std::size_t>(reg) * 8 * n_bins_ + sector(L, s) * n_bins_ + bin;
    }
    std::size_t photon_block(int reg, std::size_t sector_idx) const {
        return 16 + static_cast<std::size_t>(reg) * 8 * n_bins_ + sector_idx * n_bins_;
    }

    BasisLabel label_of(std::size_t idx) const;
    std::size_t index_of(const BasisLabel& label) const;

private:
    int n_bins_;
    int regs_;
};

BasisIndex build_basis(int n_bins, Registers regs);

struct Controls {
    cplx omega = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
};

struct HamiltonianBlocks {
    BasisIndex basis{2, Registers::One};
    FrequencyGrid grid;
    // Cavity-excited diagonal, indexed by sector 2*l+s (includes per-L cavity split).
    std::array<double, 8> a_static{};
    // Pairs coupled by Omega: (|1_L,down>, |1_L,up>).
    std::array<std::array<int, 2>, 4> a_drive_pattern{};
    std::array<double, 8> d_block{};
    std::array<double, 8> b_block{};
    // Bin frequencies w_m - w_c, shared by both registers and spin branches.
    std::vector<double> ph_diag;
    double kappa = 0.0;  // continuum linewidth the bins were built for

    std::size_t dimension() const { return basis.dimension(); }
};

HamiltonianBlocks assemble(const PhysicalConfig& cfg, const FrequencyGrid& grid, const CouplingTable& couplings,
                           const ZeemanShifts& zeeman, Registers regs);

// Convenience: couplings and Zeeman shifts derived from cfg.
HamiltonianBlocks assemble(const PhysicalConfig& cfg, const FrequencyGrid& grid, Registers regs);

void apply_hamiltonian(const HamiltonianBlocks& h, const Controls& c, const cplx* in, cplx* out);
StateVector apply_hamiltonian(const HamiltonianBlocks& h, const Controls& c, const StateVector& state);

struct Triplet {
    std::size_t row;
    std::size_t col;
    cplx value;
};

std::vector<Triplet> hamiltonian_triplets(const HamiltonianBlocks& h, const Controls& c);
void write_triplets(std::ostream& os, const std::vector<Triplet>& triplets);

// Dense matrix for small grids (tests and debugging).
Eigen::MatrixXcd dense_hamiltonian(const HamiltonianBlocks& h, const Controls& c);

}  // namespace cpf
