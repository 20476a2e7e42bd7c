#include "scarthermo/hilbert.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "scarthermo/errors.hpp"

namespace scarthermo {

SpinBasis make_spin_basis(int n_sites) {
    if (n_sites < 1 || n_sites > 62) {
        throw invalid_input("n_sites must be in [1, 62]");
    }
    return SpinBasis{n_sites, std::size_t{1} << n_sites};
}

std::uint64_t rotate_bits(std::uint64_t s, int n_sites) {
    const std::uint64_t mask = (std::uint64_t{1} << n_sites) - 1;
    return ((s << 1) | (s >> (n_sites - 1))) & mask;
}

Vector translation_apply(const Vector& psi, int n_sites) {
    const std::size_t dim = std::size_t{1} << n_sites;
    if (static_cast<std::size_t>(psi.size()) != dim) {
        throw invalid_input("translation_apply: state dimension does not match basis");
    }
    Vector out(psi.size());
    for (std::uint64_t s = 0; s < dim; ++s) {
        out(rotate_bits(s, n_sites)) = psi(s);
    }
    return out;
}

SectorBasis build_k0_sector(int n_sites) {
    if (n_sites < 2) {
        throw invalid_input("build_k0_sector: need at least 2 sites");
    }
    const std::size_t dim = std::size_t{1} << n_sites;
    SectorBasis sector;
    sector.n_sites = n_sites;
    sector.full_dimension = dim;
    for (std::uint64_t s = 0; s < dim; ++s) {
        std::uint64_t t = s;
        int period = 0;
        bool is_rep = true;
        for (int shift = 1; shift <= n_sites; ++shift) {
            t = rotate_bits(t, n_sites);
            if (t < s) {
                is_rep = false;
                break;
            }
            if (t == s) {
                period = shift;
                break;
            }
        }
        if (is_rep) {
            sector.representatives.push_back(s);
            sector.periods.push_back(period);
        }
    }
    return sector;
}

SparseMatrix sector_isometry(const SectorBasis& sector) {
    SparseMatrix v(static_cast<Eigen::Index>(sector.full_dimension),
                   static_cast<Eigen::Index>(sector.dimension()));
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(sector.full_dimension);
    for (std::size_t j = 0; j < sector.dimension(); ++j) {
        const double amp = 1.0 / std::sqrt(static_cast<double>(sector.periods[j]));
        std::uint64_t s = sector.representatives[j];
        for (int t = 0; t < sector.periods[j]; ++t) {
            triplets.emplace_back(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j), amp);
            s = rotate_bits(s, sector.n_sites);
        }
    }
    v.setFromTriplets(triplets.begin(), triplets.end());
    return v;
}

Vector lift_to_full(const Vector& sector_state, const SectorBasis& sector) {
    if (static_cast<std::size_t>(sector_state.size()) != sector.dimension()) {
        throw invalid_input("lift_to_full: state dimension does not match sector");
    }
    Vector out = Vector::Zero(static_cast<Eigen::Index>(sector.full_dimension));
    for (std::size_t j = 0; j < sector.dimension(); ++j) {
        const Complex amp = sector_state(static_cast<Eigen::Index>(j)) /
                            std::sqrt(static_cast<double>(sector.periods[j]));
        std::uint64_t s = sector.representatives[j];
        for (int t = 0; t < sector.periods[j]; ++t) {
            out(static_cast<Eigen::Index>(s)) = amp;
            s = rotate_bits(s, sector.n_sites);
        }
    }
    return out;
}

Matrix partial_trace(const Vector& psi, int n_sites, const std::vector<int>& keep_sites) {
    const std::size_t dim = std::size_t{1} << n_sites;
    if (static_cast<std::size_t>(psi.size()) != dim) {
        throw invalid_input("partial_trace: state dimension does not match basis");
    }
    std::uint64_t seen = 0;
    for (int site : keep_sites) {
        if (site < 0 || site >= n_sites) {
            throw invalid_input("partial_trace: site index out of range");
        }
        if (seen & (std::uint64_t{1} << site)) {
            throw invalid_input("partial_trace: repeated site index");
        }
        seen |= std::uint64_t{1} << site;
    }
    const int n_keep = static_cast<int>(keep_sites.size());
    std::vector<int> env_sites;
    for (int site = 0; site < n_sites; ++site) {
        if (!(seen & (std::uint64_t{1} << site))) env_sites.push_back(site);
    }

    // Reshape psi into M(kept, env); rho = M M^dag.
    const Eigen::Index keep_dim = Eigen::Index{1} << n_keep;
    const Eigen::Index env_dim = Eigen::Index{1} << env_sites.size();
    Matrix m(keep_dim, env_dim);
    for (std::uint64_t s = 0; s < dim; ++s) {
        std::uint64_t ik = 0;
        for (int b = 0; b < n_keep; ++b) {
            ik |= ((s >> keep_sites[b]) & 1u) << b;
        }
        std::uint64_t ie = 0;
        for (std::size_t b = 0; b < env_sites.size(); ++b) {
            ie |= ((s >> env_sites[b]) & 1u) << b;
        }
        m(static_cast<Eigen::Index>(ik), static_cast<Eigen::Index>(ie)) = psi(s);
    }
    return m * m.adjoint();
}

double trace_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw invalid_input("trace_distance: dimension mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a - b, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
}

double entropy_from_probabilities(const Eigen::VectorXd& p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) > 1e-14) s -= p(i) * std::log(p(i));
    }
    return s;
}

double entanglement_entropy(const Vector& psi, int n_sites) {
    const std::size_t dim = std::size_t{1} << n_sites;
    if (static_cast<std::size_t>(psi.size()) != dim) {
        throw invalid_input("entanglement_entropy: state dimension does not match basis");
    }
    const int half = n_sites / 2;
    const Eigen::Index rows = Eigen::Index{1} << half;
    const Eigen::Index cols = Eigen::Index{1} << (n_sites - half);
    Eigen::Map<const Matrix> m(psi.data(), rows, cols);
    // Schmidt spectrum from the smaller Gram matrix
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m * m.adjoint(), Eigen::EigenvaluesOnly);
    Eigen::VectorXd p = solver.eigenvalues().cwiseMax(0.0);
    return entropy_from_probabilities(p);
}

void check_density_matrix(const Matrix& rho) {
    if (rho.rows() != rho.cols()) {
        throw invalid_input("density matrix must be square");
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw invalid_input("density matrix not Hermitian within 1e-12");
    }
    if (std::abs(rho.trace() - 1.0) > 1e-12) {
        throw invalid_input("density matrix trace not 1 within 1e-12");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
        throw invalid_input("density matrix has eigenvalue below -1e-10");
    }
}

}  // namespace scarthermo
