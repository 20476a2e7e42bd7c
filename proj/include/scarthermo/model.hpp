#pragma once

#include <cstdint>
#include <string>

#include "scarthermo/hilbert.hpp"

namespace scarthermo {

// Two-site Hermitian term. Local pair basis index is b_n + 2*b_{n+1},
// i.e. the lower site of the bond is the less significant bit.
struct LocalTerm {
    enum class Kind { Gue, Xxz, Custom };

    Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();
    Kind kind = Kind::Custom;
    std::uint64_t seed = 0;
    double b = 0.0, j = 0.0, delta = 0.0;
};

// GUE draw: A_ij = (x + i y)/sqrt(2) with x, y standard normal, h = (A + A^dag)/2.
// Deterministic given seed (mt19937_64 + Box-Muller).
LocalTerm sample_gue_term(std::uint64_t seed);

// b (sx x 1 + 1 x sx) + J (sx x sx + sy x sy) + Delta sz x sz, s = sigma/2.
LocalTerm xxz_term(double b, double j, double delta);

// P = 1 - |00><00| on a bond.
Eigen::Matrix4cd scar_projector();

struct ProjectedHamiltonian {
    int n_sites = 0;
    LocalTerm local_term;
    SparseMatrix full_matrix;  // 2^N x 2^N
};

// H = sum_n P_{n,n+1} h_{n,n+1} P_{n,n+1}, periodic boundary conditions.
// Annihilates |0>^N by construction. Requires N >= 3.
ProjectedHamiltonian embed_projected_hamiltonian(const LocalTerm& term, int n_sites);

// Dense V^dag H V on the k=0 sector.
Matrix project_to_sector(const ProjectedHamiltonian& h, const SectorBasis& sector);

std::string to_string(LocalTerm::Kind kind);

}  // namespace scarthermo
