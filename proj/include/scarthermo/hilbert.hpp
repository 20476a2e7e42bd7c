#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace scarthermo {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

// Basis convention used throughout: a basis index is the bit string of local
// states with site 0 as the least significant bit, local |0> = bit 0.
struct SpinBasis {
    int n_sites = 0;
    std::size_t dimension = 0;
};

SpinBasis make_spin_basis(int n_sites);

// k=0 momentum sector of the one-site translation. Representatives are the
// minimal integers of their cyclic-shift orbits, stored ascending.
struct SectorBasis {
    int n_sites = 0;
    std::size_t full_dimension = 0;
    std::vector<std::uint64_t> representatives;
    std::vector<int> periods;

    std::size_t dimension() const { return representatives.size(); }
};

// Cyclic shift of the bit string: site n -> n+1 mod N.
std::uint64_t rotate_bits(std::uint64_t s, int n_sites);

// T|psi> in the full 2^N basis.
Vector translation_apply(const Vector& psi, int n_sites);

SectorBasis build_k0_sector(int n_sites);

// Columns are normalized equal-weight orbit sums; V^dag V = 1 on the sector.
SparseMatrix sector_isometry(const SectorBasis& sector);

Vector lift_to_full(const Vector& sector_state, const SectorBasis& sector);

// Reduced density matrix on keep_sites (ordering fixes tensor-factor order,
// first listed site least significant).
Matrix partial_trace(const Vector& psi, int n_sites, const std::vector<int>& keep_sites);

// Unhalved Schatten 1-norm of (a - b); in [0, 2] for density matrices.
double trace_distance(const Matrix& a, const Matrix& b);

// Von Neumann entropy (nats) of a probability vector; entries below 1e-14
// contribute zero.
double entropy_from_probabilities(const Eigen::VectorXd& p);

// Half-chain entanglement entropy in nats, cut after site floor(N/2)-1.
double entanglement_entropy(const Vector& psi, int n_sites);

// Throws invalid_input unless rho is Hermitian (1e-12), unit trace (1e-12)
// with eigenvalues >= -1e-10.
void check_density_matrix(const Matrix& rho);

}  // namespace scarthermo
