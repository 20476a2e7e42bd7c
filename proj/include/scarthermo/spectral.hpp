#pragma once

#include <vector>

#include "scarthermo/hilbert.hpp"

namespace scarthermo {

struct SpectralData {
    SectorBasis sector;
    Eigen::VectorXd eigenvalues;           // ascending
    Matrix eigenvectors;                   // sector-basis columns
    std::vector<Eigen::Matrix4cd> two_site_rdms;  // on sites {0,1}
    Eigen::VectorXd entropies;             // half-chain, nats

    double min_energy() const { return eigenvalues(0); }
    double max_energy() const { return eigenvalues(eigenvalues.size() - 1); }
    double width() const { return max_energy() - min_energy(); }
    Eigen::Index dimension() const { return eigenvalues.size(); }
};

SpectralData diagonalize(const Matrix& sector_matrix, const SectorBasis& sector);

struct ChaosReport {
    double mean_r = 0.0;
    int n_gaps = 0;
    double window = 0.5;
    int n_degenerate = 0;
};

// Mean gap ratio <min(s_n, s_{n+1}) / max(s_n, s_{n+1})> over the central
// `window` fraction of the spectrum. Gaps below 1e-12 * width are excluded
// and counted as degenerate. Throws insufficient_data with fewer than
// `min_levels` levels in the window.
ChaosReport r_statistic(const Eigen::VectorXd& eigenvalues, double window = 0.5,
                        int min_levels = 50);

// Gibbs energy Tr[sigma(beta) H] over the given spectrum, overflow-shifted.
double gibbs_energy(const Eigen::VectorXd& eigenvalues, double beta);

// Gibbs weights e^{-beta(E - E_ref)} / Z, overflow-shifted.
Eigen::VectorXd gibbs_weights(const Eigen::VectorXd& eigenvalues, double beta);

// Solves Tr[sigma(beta) H] = E for beta; throws invalid_input when E lies
// outside the open spectral interval.
double canonical_beta(const Eigen::VectorXd& eigenvalues, double target_energy);

struct ScarLocation {
    int index = -1;
    double overlap = 0.0;
    double energy = 0.0;
    double rank_fraction = 0.0;  // rank / (dim - 1)
};

// Finds the eigenstate maximizing overlap with the lifted |0>^N; throws
// degenerate_scar when the overlap falls below 0.999.
ScarLocation locate_qmbs(const SpectralData& spec);

// Index of the smallest eigenvalue strictly above 1e-8.
int select_thermal_reference(const SpectralData& spec);

constexpr double kZeroEnergyThreshold = 1e-8;

}  // namespace scarthermo
