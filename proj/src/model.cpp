#include "scarthermo/model.hpp"

#include <cmath>
#include <random>

#include "scarthermo/errors.hpp"

namespace scarthermo {

namespace {

// Box-Muller on mt19937_64 uniforms; avoids the implementation-defined
// std::normal_distribution so streams are portable across standard libraries.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform_(rng_);
        } while (u1 <= 0.0);
        const double u2 = uniform_(rng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace

LocalTerm sample_gue_term(std::uint64_t seed) {
    GaussianStream gauss(seed);
    Eigen::Matrix4cd a;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double x = gauss.next();
            const double y = gauss.next();
            a(i, j) = Complex(x, y) * inv_sqrt2;
        }
    }
    LocalTerm term;
    term.matrix = 0.5 * (a + a.adjoint());
    term.kind = LocalTerm::Kind::Gue;
    term.seed = seed;
    return term;
}

LocalTerm xxz_term(double b, double j, double delta) {
    Eigen::Matrix2cd sx, sy, sz, id;
    sx << 0.0, 0.5, 0.5, 0.0;
    sy << 0.0, Complex(0.0, -0.5), Complex(0.0, 0.5), 0.0;
    sz << 0.5, 0.0, 0.0, -0.5;
    id.setIdentity();

    // kron with the lower site of the bond as the less significant bit:
    // (A on site n, B on site n+1) -> kron(B, A) in Eigen's convention.
    auto two_site = [](const Eigen::Matrix2cd& on_low, const Eigen::Matrix2cd& on_high) {
        Eigen::Matrix4cd out;
        for (int ih = 0; ih < 2; ++ih)
            for (int il = 0; il < 2; ++il)
                for (int jh = 0; jh < 2; ++jh)
                    for (int jl = 0; jl < 2; ++jl)
                        out(il + 2 * ih, jl + 2 * jh) = on_low(il, jl) * on_high(ih, jh);
        return out;
    };

    LocalTerm term;
    term.matrix = b * (two_site(sx, id) + two_site(id, sx)) +
                  j * (two_site(sx, sx) + two_site(sy, sy)) + delta * two_site(sz, sz);
    term.kind = LocalTerm::Kind::Xxz;
    term.b = b;
    term.j = j;
    term.delta = delta;
    return term;
}

Eigen::Matrix4cd scar_projector() {
    Eigen::Matrix4cd p = Eigen::Matrix4cd::Identity();
    p(0, 0) = 0.0;
    return p;
}

ProjectedHamiltonian embed_projected_hamiltonian(const LocalTerm& term, int n_sites) {
    if (n_sites < 3) {
        throw invalid_input("embed_projected_hamiltonian: need N >= 3 (single bond double-counted at N=2)");
    }
    if ((term.matrix - term.matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-14) {
        throw invalid_input("embed_projected_hamiltonian: local term not Hermitian");
    }
    const Eigen::Matrix4cd p = scar_projector();
    const Eigen::Matrix4cd g = p * term.matrix * p;

    const std::size_t dim = std::size_t{1} << n_sites;
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(dim * n_sites * 4);
    for (int bond = 0; bond < n_sites; ++bond) {
        const int low = bond;
        const int high = (bond + 1) % n_sites;
        for (std::uint64_t s = 0; s < dim; ++s) {
            const int col = static_cast<int>(((s >> low) & 1u) + 2 * ((s >> high) & 1u));
            const std::uint64_t cleared =
                s & ~((std::uint64_t{1} << low) | (std::uint64_t{1} << high));
            for (int row = 0; row < 4; ++row) {
                if (g(row, col) == Complex(0.0, 0.0)) continue;
                const std::uint64_t sp = cleared | (std::uint64_t(row & 1) << low) |
                                         (std::uint64_t((row >> 1) & 1) << high);
                triplets.emplace_back(static_cast<Eigen::Index>(sp),
                                      static_cast<Eigen::Index>(s), g(row, col));
            }
        }
    }
    ProjectedHamiltonian h;
    h.n_sites = n_sites;
    h.local_term = term;
    h.full_matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    h.full_matrix.setFromTriplets(triplets.begin(), triplets.end());
    return h;
}

Matrix project_to_sector(const ProjectedHamiltonian& h, const SectorBasis& sector) {
    if (sector.n_sites != h.n_sites) {
        throw invalid_input("project_to_sector: sector built for a different N");
    }
    const SparseMatrix v = sector_isometry(sector);
    SparseMatrix hv = h.full_matrix * v;
    Matrix out = Matrix(v.adjoint() * hv);
    // symmetrize rounding noise from the sparse products
    out = 0.5 * (out + out.adjoint().eval());
    return out;
}

std::string to_string(LocalTerm::Kind kind) {
    switch (kind) {
        case LocalTerm::Kind::Gue: return "gue";
        case LocalTerm::Kind::Xxz: return "xxz";
        default: return "custom";
    }
}

}  // namespace scarthermo
