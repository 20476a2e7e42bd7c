#include "scarthermo/thermometry.hpp"

#include <cmath>

#include "scarthermo/errors.hpp"

namespace scarthermo {

Eigen::Matrix4cd reduced_canonical_dm(const SpectralData& spec, double beta) {
    const Eigen::VectorXd w = gibbs_weights(spec.eigenvalues, beta);
    Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
    for (Eigen::Index a = 0; a < spec.dimension(); ++a) {
        out += w(a) * spec.two_site_rdms[a];
    }
    return out;
}

double distance_objective(const SpectralData& spec, const Eigen::Matrix4cd& rho_s, double beta) {
    return trace_distance(rho_s, reduced_canonical_dm(spec, beta));
}

BetaSearchResult minimize_distance(const SpectralData& spec, const Eigen::Matrix4cd& rho_s,
                                   double beta_lo, double beta_hi, const BetaSearchConfig& config,
                                   bool keep_samples) {
    if (!(beta_lo < beta_hi) || !std::isfinite(beta_lo) || !std::isfinite(beta_hi)) {
        throw invalid_input("minimize_distance: invalid beta range");
    }
    if (config.grid_points < 64) {
        throw invalid_input("minimize_distance: grid_points must be >= 64");
    }
    const double range = beta_hi - beta_lo;
    const int n = config.grid_points;

    BetaSearchResult result;
    int best = 0;
    double best_value = 0.0;
    std::vector<double> grid_values(n);
    for (int i = 0; i < n; ++i) {
        const double beta = beta_lo + range * i / (n - 1);
        const double value = distance_objective(spec, rho_s, beta);
        if (!std::isfinite(value)) {
            throw numerical_error("minimize_distance: non-finite objective");
        }
        grid_values[i] = value;
        if (keep_samples) result.samples.emplace_back(beta, value);
        if (i == 0 || value < best_value) {
            best_value = value;
            best = i;
        }
    }
    result.boundary_hit = (best == 0 || best == n - 1);

    // Golden-section refinement inside the grid cells bracketing the minimum.
    double a = beta_lo + range * std::max(best - 1, 0) / (n - 1);
    double b = beta_lo + range * std::min(best + 1, n - 1) / (n - 1);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = distance_objective(spec, rho_s, c);
    double fd = distance_objective(spec, rho_s, d);
    while (b - a > config.tolerance * range) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = distance_objective(spec, rho_s, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = distance_objective(spec, rho_s, d);
        }
    }
    result.beta = 0.5 * (a + b);
    result.min_distance = distance_objective(spec, rho_s, result.beta);
    // keep whichever of scan and refinement came out lower
    if (best_value < result.min_distance) {
        result.beta = beta_lo + range * best / (n - 1);
        result.min_distance = best_value;
    }
    return result;
}

BetaSearchResult subsystem_temperature(const SpectralData& spec, const Eigen::Matrix4cd& rho_s,
                                       const BetaSearchConfig& config, bool keep_samples) {
    const double beta_max = config.range_scale / spec.width();
    return minimize_distance(spec, rho_s, -beta_max, beta_max, config, keep_samples);
}

ThermometryResult thermometry_for_state(const SpectralData& spec, int eigenstate_index,
                                        const BetaSearchConfig& config, bool keep_samples) {
    if (eigenstate_index < 0 || eigenstate_index >= spec.dimension()) {
        throw invalid_input("thermometry_for_state: eigenstate index out of range");
    }
    ThermometryResult result;
    result.eigenstate_index = eigenstate_index;
    result.energy = spec.eigenvalues(eigenstate_index);
    result.entropy_half_chain = spec.entropies(eigenstate_index);

    if (!(result.energy > spec.min_energy() && result.energy < spec.max_energy())) {
        result.computable = false;
        return result;
    }
    result.beta_canonical = canonical_beta(spec.eigenvalues, result.energy);
    BetaSearchResult search = subsystem_temperature(
        spec, spec.two_site_rdms[eigenstate_index], config, keep_samples);
    result.beta_subsystem = search.beta;
    result.min_distance = search.min_distance;
    result.boundary_hit = search.boundary_hit;
    result.delta_beta = result.beta_subsystem - result.beta_canonical;
    result.objective_samples = std::move(search.samples);
    return result;
}

}  // namespace scarthermo
