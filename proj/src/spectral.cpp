#include "scarthermo/spectral.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "scarthermo/errors.hpp"

namespace scarthermo {

SpectralData diagonalize(const Matrix& sector_matrix, const SectorBasis& sector) {
    if (sector_matrix.rows() != sector_matrix.cols() ||
        static_cast<std::size_t>(sector_matrix.rows()) != sector.dimension()) {
        throw invalid_input("diagonalize: matrix does not match sector dimension");
    }
    if ((sector_matrix - sector_matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw invalid_input("diagonalize: input not Hermitian within 1e-10");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sector_matrix);
    if (solver.info() != Eigen::Success) {
        throw numerical_error("diagonalize: eigensolver failed to converge");
    }

    SpectralData spec;
    spec.sector = sector;
    spec.eigenvalues = solver.eigenvalues();
    spec.eigenvectors = solver.eigenvectors();

    const Eigen::Index dim = spec.eigenvalues.size();
    spec.two_site_rdms.resize(dim);
    spec.entropies.resize(dim);
    for (Eigen::Index a = 0; a < dim; ++a) {
        const Vector full = lift_to_full(spec.eigenvectors.col(a), sector);
        spec.two_site_rdms[a] = partial_trace(full, sector.n_sites, {0, 1});
        spec.entropies(a) = entanglement_entropy(full, sector.n_sites);
    }
    return spec;
}

ChaosReport r_statistic(const Eigen::VectorXd& eigenvalues, double window, int min_levels) {
    const Eigen::Index dim = eigenvalues.size();
    const Eigen::Index lo = static_cast<Eigen::Index>(std::floor(dim * (1.0 - window) / 2.0));
    const Eigen::Index hi = static_cast<Eigen::Index>(std::ceil(dim * (1.0 + window) / 2.0));
    if (hi - lo < min_levels) {
        throw insufficient_data("r_statistic: too few levels in the window");
    }
    const double width = eigenvalues(dim - 1) - eigenvalues(0);
    const double degenerate_cut = 1e-12 * width;

    ChaosReport report;
    report.window = window;
    double sum = 0.0;
    for (Eigen::Index a = lo; a + 2 < hi; ++a) {
        const double s0 = eigenvalues(a + 1) - eigenvalues(a);
        const double s1 = eigenvalues(a + 2) - eigenvalues(a + 1);
        if (s0 < degenerate_cut || s1 < degenerate_cut) {
            ++report.n_degenerate;
            continue;
        }
        sum += std::min(s0, s1) / std::max(s0, s1);
        ++report.n_gaps;
    }
    if (report.n_gaps == 0) {
        throw insufficient_data("r_statistic: no usable gap pairs");
    }
    report.mean_r = sum / report.n_gaps;
    return report;
}

Eigen::VectorXd gibbs_weights(const Eigen::VectorXd& eigenvalues, double beta) {
    if (!std::isfinite(beta)) {
        throw invalid_input("gibbs_weights: beta must be finite");
    }
    const double e_ref = beta >= 0.0 ? eigenvalues.minCoeff() : eigenvalues.maxCoeff();
    Eigen::VectorXd w = (-beta * (eigenvalues.array() - e_ref)).exp();
    w /= w.sum();
    return w;
}

double gibbs_energy(const Eigen::VectorXd& eigenvalues, double beta) {
    return gibbs_weights(eigenvalues, beta).dot(eigenvalues);
}

double canonical_beta(const Eigen::VectorXd& eigenvalues, double target_energy) {
    const double e_min = eigenvalues.minCoeff();
    const double e_max = eigenvalues.maxCoeff();
    if (!(target_energy > e_min && target_energy < e_max)) {
        throw invalid_input("canonical_beta: energy outside the open spectral interval");
    }
    const double width = e_max - e_min;
    auto f = [&](double beta) { return gibbs_energy(eigenvalues, beta) - target_energy; };

    // f is strictly decreasing; expand [-1, 1]/width until it brackets zero.
    double lo = -1.0 / width;
    double hi = 1.0 / width;
    double f_lo = f(lo);
    double f_hi = f(hi);
    while (f_lo < 0.0) {
        hi = lo;
        f_hi = f_lo;
        lo *= 2.0;
        f_lo = f(lo);
    }
    while (f_hi > 0.0) {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = f(hi);
    }

    // Bisection with a secant step when it stays inside the bracket.
    for (int iter = 0; iter < 200; ++iter) {
        const double tol = std::max(1e-12, 1e-10 * std::max(std::abs(lo), std::abs(hi)));
        if (hi - lo < tol) break;
        double mid = 0.5 * (lo + hi);
        if (f_hi != f_lo) {
            const double secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
            if (secant > lo + 0.1 * (hi - lo) && secant < hi - 0.1 * (hi - lo)) {
                mid = secant;
            }
        }
        const double f_mid = f(mid);
        if (f_mid > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    return 0.5 * (lo + hi);
}

ScarLocation locate_qmbs(const SpectralData& spec) {
    // |0>^N is a singleton orbit with representative 0, the first sector
    // coordinate; its overlap with eigenvector a is |v_0a|.
    const Eigen::Index dim = spec.dimension();
    ScarLocation loc;
    for (Eigen::Index a = 0; a < dim; ++a) {
        const double overlap = std::abs(spec.eigenvectors(0, a));
        if (overlap > loc.overlap) {
            loc.overlap = overlap;
            loc.index = static_cast<int>(a);
        }
    }
    loc.energy = spec.eigenvalues(loc.index);
    loc.rank_fraction = static_cast<double>(loc.index) / static_cast<double>(dim - 1);
    if (loc.overlap < 0.999) {
        throw degenerate_scar("locate_qmbs: zero-energy subspace appears degenerate");
    }
    return loc;
}

int select_thermal_reference(const SpectralData& spec) {
    for (Eigen::Index a = 0; a < spec.dimension(); ++a) {
        if (spec.eigenvalues(a) > kZeroEnergyThreshold) return static_cast<int>(a);
    }
    throw insufficient_data("select_thermal_reference: no strictly positive eigenvalue");
}

}  // namespace scarthermo
