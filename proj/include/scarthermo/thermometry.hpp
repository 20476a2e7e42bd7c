#pragma once

#include <utility>
#include <vector>

#include "scarthermo/spectral.hpp"

namespace scarthermo {

struct BetaSearchConfig {
    double range_scale = 40.0;  // search over [-range_scale/W, range_scale/W]
    int grid_points = 256;
    double tolerance = 1e-10;   // relative to the search-range length
};

// sigma_S(beta) = sum_a w_a rho_S(a) with Gibbs weights over the sector
// spectrum; uses the RDMs precomputed in SpectralData.
Eigen::Matrix4cd reduced_canonical_dm(const SpectralData& spec, double beta);

double distance_objective(const SpectralData& spec, const Eigen::Matrix4cd& rho_s, double beta);

struct BetaSearchResult {
    double beta = 0.0;
    double min_distance = 0.0;
    bool boundary_hit = false;
    std::vector<std::pair<double, double>> samples;  // coarse (beta, d1) grid
};

// Coarse grid scan over [beta_lo, beta_hi] followed by golden-section
// refinement of the bracketing interval; keep_samples retains the grid.
BetaSearchResult minimize_distance(const SpectralData& spec, const Eigen::Matrix4cd& rho_s,
                                   double beta_lo, double beta_hi, const BetaSearchConfig& config,
                                   bool keep_samples = false);

// Same with the default range [-range_scale/W, range_scale/W].
BetaSearchResult subsystem_temperature(const SpectralData& spec, const Eigen::Matrix4cd& rho_s,
                                       const BetaSearchConfig& config, bool keep_samples = false);

struct ThermometryResult {
    int eigenstate_index = -1;
    double energy = 0.0;
    double beta_canonical = 0.0;
    double beta_subsystem = 0.0;
    double delta_beta = 0.0;
    double min_distance = 0.0;
    double entropy_half_chain = 0.0;
    bool boundary_hit = false;
    bool computable = true;  // false when E sits at the spectral edge
    std::vector<std::pair<double, double>> objective_samples;
};

ThermometryResult thermometry_for_state(const SpectralData& spec, int eigenstate_index,
                                        const BetaSearchConfig& config, bool keep_samples = false);

}  // namespace scarthermo
