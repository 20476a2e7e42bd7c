// End-to-end acceptance gate: one pass/fail line per criterion, nonzero exit
// on any failure. Criterion 9 shells out to the CLI binary (path in argv[1]).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "scarthermo/ensemble.hpp"
#include "scarthermo/errors.hpp"
#include "scarthermo/io.hpp"

namespace fs = std::filesystem;
using namespace scarthermo;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++g_failures;
}

struct Instance {
    ProjectedHamiltonian h;
    SectorBasis sector;
    SpectralData spec;
};

Instance gue_instance(std::uint64_t seed, int n_sites) {
    Instance inst;
    inst.sector = build_k0_sector(n_sites);
    inst.h = embed_projected_hamiltonian(sample_gue_term(seed), n_sites);
    inst.spec = diagonalize(project_to_sector(inst.h, inst.sector), inst.sector);
    return inst;
}

ChaosReport chaos_of(const SpectralData& spec, double window = 0.5) {
    int min_levels = 50;
    if (static_cast<double>(spec.dimension()) * window < 50.0) {
        window = 1.0;
        min_levels = std::min<int>(50, static_cast<int>(spec.dimension()));
    }
    return r_statistic(spec.eigenvalues, window, min_levels);
}

// 1. Product-state zero mode: H annihilates |0...0> and the scar carries no
//    half-chain entanglement, over 100+ accepted random instances.
void criterion_1() {
    const FilterConfig filter;
    double max_norm = 0.0, max_entropy = 0.0;
    int accepted_total = 0;
    bool ok = true;
    for (int n_sites : {8, 10, 12}) {
        int accepted = 0;
        for (std::uint64_t seed = 1000; accepted < 34 && seed < 1800; ++seed) {
            const Instance inst = gue_instance(seed, n_sites);
            ScarLocation loc;
            try {
                loc = locate_qmbs(inst.spec);
            } catch (const degenerate_scar&) {
                continue;
            }
            if (!acceptance_filter(chaos_of(inst.spec), loc.rank_fraction, n_sites, filter).first) {
                continue;
            }
            ++accepted;
            Vector zero = Vector::Zero(inst.h.full_matrix.rows());
            zero(0) = 1.0;
            const double norm = (inst.h.full_matrix * zero).norm();
            const double entropy = inst.spec.entropies(loc.index);
            max_norm = std::max(max_norm, norm);
            max_entropy = std::max(max_entropy, entropy);
            ok = ok && norm < 1e-12 && entropy < 1e-10;
        }
        accepted_total += accepted;
    }
    ok = ok && accepted_total >= 100;
    std::ostringstream detail;
    detail << accepted_total << " accepted, max |H zero| = " << max_norm
           << ", max scar entropy = " << max_entropy;
    report(1, "scar exactness at N in {8,10,12}", ok, detail.str());
}

// 2. Cross-implementation oracle at N=6: weighted-RDM canonical state versus
//    a dense full-space Gibbs construction; sector spectrum as a subset of
//    the full spectrum.
void criterion_2() {
    const Instance inst = gue_instance(14, 6);

    double max_dm_err = 0.0;
    for (double beta : {-1.0, 0.3, 2.0}) {
        const Matrix dense = Matrix(inst.h.full_matrix);
        Eigen::SelfAdjointEigenSolver<Matrix> solver(dense);
        const Matrix q = Matrix(sector_isometry(inst.sector) *
                                sector_isometry(inst.sector).adjoint());
        const Eigen::VectorXd evals = solver.eigenvalues();
        const double e_ref = beta >= 0.0 ? evals.minCoeff() : evals.maxCoeff();
        Matrix gibbs = Matrix::Zero(dense.rows(), dense.cols());
        for (Eigen::Index a = 0; a < evals.size(); ++a) {
            gibbs += std::exp(-beta * (evals(a) - e_ref)) * solver.eigenvectors().col(a) *
                     solver.eigenvectors().col(a).adjoint();
        }
        Matrix projected = q * gibbs * q;
        projected /= projected.trace();
        Eigen::Matrix4cd oracle = Eigen::Matrix4cd::Zero();
        const std::uint64_t dim = std::uint64_t{1} << 6;
        for (std::uint64_t i = 0; i < dim; ++i) {
            for (std::uint64_t j = 0; j < dim; ++j) {
                if ((i >> 2) != (j >> 2)) continue;
                oracle(i & 3, j & 3) += projected(i, j);
            }
        }
        const Eigen::Matrix4cd fast = reduced_canonical_dm(inst.spec, beta);
        max_dm_err = std::max(max_dm_err, (fast - oracle).cwiseAbs().maxCoeff());
    }

    Eigen::SelfAdjointEigenSolver<Matrix> full(Matrix(inst.h.full_matrix), Eigen::EigenvaluesOnly);
    double max_subset_err = 0.0;
    for (Eigen::Index a = 0; a < inst.spec.dimension(); ++a) {
        double best = 1e9;
        for (Eigen::Index b = 0; b < full.eigenvalues().size(); ++b) {
            best = std::min(best, std::abs(full.eigenvalues()(b) - inst.spec.eigenvalues(a)));
        }
        max_subset_err = std::max(max_subset_err, best);
    }

    const bool ok = max_dm_err < 1e-9 && max_subset_err < 1e-10;
    std::ostringstream detail;
    detail << "max dm error = " << max_dm_err << ", max subset error = " << max_subset_err;
    report(2, "dense Gibbs oracle equivalence at N=6", ok, detail.str());
}

// 3. Canonical-temperature solver: analytic two-level value, beta -> E ->
//    beta round trips, and monotonicity of beta_C(E).
void criterion_3() {
    bool ok = true;
    Eigen::VectorXd two_level(2);
    two_level << 0.0, 1.0;
    ok = ok && std::abs(canonical_beta(two_level, 0.25) - std::log(3.0)) < 1e-9;

    double max_roundtrip = 0.0;
    for (std::uint64_t seed : {51, 52}) {
        const Instance inst = gue_instance(seed, 8);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uniform(-20.0, 20.0);
        for (int trial = 0; trial < 50; ++trial) {
            const double beta = uniform(rng) / inst.spec.width();
            const double energy = gibbs_energy(inst.spec.eigenvalues, beta);
            const double back = canonical_beta(inst.spec.eigenvalues, energy);
            const double err = std::abs(back - beta) / std::max(1.0, std::abs(beta));
            max_roundtrip = std::max(max_roundtrip, err);
        }
        double prev = canonical_beta(inst.spec.eigenvalues,
                                     inst.spec.min_energy() + 0.01 * inst.spec.width());
        for (int i = 1; i < 100; ++i) {
            const double e =
                inst.spec.min_energy() + inst.spec.width() * (0.01 + 0.98 * i / 99.0);
            const double beta = canonical_beta(inst.spec.eigenvalues, e);
            ok = ok && beta < prev;
            prev = beta;
        }
    }
    ok = ok && max_roundtrip < 1e-8;
    std::ostringstream detail;
    detail << "max round-trip error = " << max_roundtrip;
    report(3, "canonical temperature solver", ok, detail.str());
}

// 4. Planted-solution thermometry at N=10.
void criterion_4() {
    const Instance inst = gue_instance(61, 10);
    BetaSearchConfig config;
    const double beta_max = config.range_scale / inst.spec.width();
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> uniform(-0.8, 0.8);
    double max_beta_err = 0.0, max_distance = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double beta_star = uniform(rng) * beta_max;
        const auto result = subsystem_temperature(
            inst.spec, reduced_canonical_dm(inst.spec, beta_star), config);
        max_beta_err = std::max(max_beta_err, std::abs(result.beta - beta_star));
        max_distance = std::max(max_distance, result.min_distance);
    }
    const bool ok = max_beta_err < 1e-6 && max_distance < 1e-8;
    std::ostringstream detail;
    detail << "max beta error = " << max_beta_err << ", max min_d1 = " << max_distance;
    report(4, "planted subsystem-temperature recovery at N=10", ok, detail.str());
}

// 5. Chaos-filter calibration against dense GUE and Poisson surrogates, plus
//    the r window of accepted chain instances (records from criterion 6).
void criterion_5(const std::vector<InstanceRecord>& n12_records) {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> normal;
    const int dim = 500, draws = 100;
    double gue_sum = 0.0;
    for (int k = 0; k < draws; ++k) {
        Matrix a(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(normal(rng), normal(rng));
        const Matrix h = 0.5 * (a + a.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
        gue_sum += r_statistic(solver.eigenvalues()).mean_r;
    }
    const double gue_mean = gue_sum / draws;

    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Eigen::VectorXd poisson(100000);
    for (Eigen::Index i = 0; i < poisson.size(); ++i) poisson(i) = uniform(rng);
    std::sort(poisson.data(), poisson.data() + poisson.size());
    const double poisson_mean = r_statistic(poisson).mean_r;

    double chain_lo = 1.0, chain_hi = 0.0;
    long n_accepted = 0;
    for (const InstanceRecord& rec : n12_records) {
        if (!rec.accepted) continue;
        ++n_accepted;
        chain_lo = std::min(chain_lo, rec.chaos.mean_r);
        chain_hi = std::max(chain_hi, rec.chaos.mean_r);
    }

    const bool ok = std::abs(gue_mean - 0.5996) < 0.01 && std::abs(poisson_mean - 0.386) < 0.01 &&
                    n_accepted > 0 && chain_lo >= 0.58 && chain_hi <= 0.62;
    std::ostringstream detail;
    detail << "GUE mean_r = " << gue_mean << ", Poisson mean_r = " << poisson_mean
           << ", accepted chain r in [" << chain_lo << ", " << chain_hi << "]";
    report(5, "chaos filter calibration", ok, detail.str());
}

// Shared N=12 ensemble backing criteria 5, 6, and 8; grows until at least
// 300 instances pass the filter.
std::vector<InstanceRecord> run_n12_ensemble() {
    const PipelineConfig config;
    std::vector<InstanceRecord> records = run_ensemble(1, 12, 480, config, 1);
    long accepted = 0;
    for (const auto& rec : records) accepted += rec.accepted ? 1 : 0;
    std::uint64_t next_seed = 1 + records.size();
    while (accepted < 300 && records.size() < 3000) {
        auto extra = run_ensemble(next_seed, 12, 120, config, 1);
        for (auto& rec : extra) {
            rec.instance_id = static_cast<long>(records.size());
            accepted += rec.accepted ? 1 : 0;
            records.push_back(std::move(rec));
        }
        next_seed += 120;
    }
    return records;
}

// 6. Ensemble statistics at N=12 with >= 300 accepted instances: unbiased
//    scar delta_beta with a gaussian tail, exponential thermal tail, smaller
//    thermal variance, stronger thermal correlation.
EnsembleStats criterion_6(const std::vector<InstanceRecord>& records) {
    const EnsembleStats stats = aggregate_stats(records);
    const bool mean_ok =
        std::abs(stats.scar.mean_delta_beta) < 3.0 * stats.scar.stderr_delta_beta;
    const bool scar_tail_ok = stats.scar.tail_fit.best_model == "gaussian";
    const bool thermal_tail_ok = stats.thermal.tail_fit.best_model == "exponential";
    const bool variance_ok =
        stats.thermal.variance_delta_beta < stats.scar.variance_delta_beta;
    const bool pearson_ok = stats.thermal.pearson && stats.scar.pearson &&
                            *stats.thermal.pearson > *stats.scar.pearson;
    const bool ok = stats.n_accepted >= 300 && mean_ok && scar_tail_ok && thermal_tail_ok &&
                    variance_ok && pearson_ok;
    std::ostringstream detail;
    detail << stats.n_accepted << " accepted; scar mean db = " << stats.scar.mean_delta_beta
           << " (stderr " << stats.scar.stderr_delta_beta << "); tails " << stats.scar.tail_fit.best_model
           << "/" << stats.thermal.tail_fit.best_model << "; var "
           << stats.scar.variance_delta_beta << "/" << stats.thermal.variance_delta_beta
           << "; pearson " << stats.scar.pearson.value_or(0.0) << "/"
           << stats.thermal.pearson.value_or(0.0);
    report(6, "ensemble delta_beta statistics at N=12", ok, detail.str());
    return stats;
}

// 7. Size trends over N in {8,...,13}: thermal medians decay, scar distance
//    stays flat and well separated.
void criterion_7() {
    // seed budgets sized so each N yields enough accepted instances for
    // stable medians (acceptance rates run 10-25%)
    const std::vector<int> n_range{8, 9, 10, 11, 12, 13};
    const std::vector<int> seed_budget{700, 700, 1000, 600, 500, 350};
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < n_range.size(); ++i) {
        SweepConfig config;
        config.seeds_per_n = seed_budget[i];
        rows.push_back(scaling_sweep({n_range[i]}, config, 1).front());
    }

    bool enough = true, thermal_db_dec = true, thermal_d1_dec = true;
    double scar_lo = 1e300, scar_hi = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        enough = enough && rows[i].n_accepted + rows[i].n_rejected >= 100 &&
                 rows[i].n_accepted >= 50;
        scar_lo = std::min(scar_lo, rows[i].scar_min_distance);
        scar_hi = std::max(scar_hi, rows[i].scar_min_distance);
        if (i > 0) {
            thermal_db_dec =
                thermal_db_dec && rows[i].thermal_abs_delta_beta < rows[i - 1].thermal_abs_delta_beta;
            thermal_d1_dec =
                thermal_d1_dec && rows[i].thermal_min_distance < rows[i - 1].thermal_min_distance;
        }
    }
    const SweepRow& last = rows.back();
    const bool band_ok = scar_hi <= 1.5 * scar_lo;
    const bool separated = last.scar_min_distance > 5.0 * last.thermal_min_distance;
    const bool ok = enough && thermal_db_dec && thermal_d1_dec && band_ok && separated;

    std::ostringstream detail;
    detail << "accepted per N:";
    for (const SweepRow& row : rows) detail << ' ' << row.n_accepted;
    detail << "; thermal |db| dec " << (thermal_db_dec ? "yes" : "no") << ", thermal min_d1 dec "
           << (thermal_d1_dec ? "yes" : "no") << ", scar band [" << scar_lo << ", " << scar_hi
           << "], separation at N=13 = "
           << last.scar_min_distance / std::max(last.thermal_min_distance, 1e-300) << "x";
    report(7, "size trends over N in {8,...,13}", ok, detail.str());
}

// 8. Distance distributions at N=12: scar mean above 1, thermal mean below
//    0.5 with a decaying positive tail.
void criterion_8(const std::vector<InstanceRecord>& records, const EnsembleStats& stats) {
    std::vector<double> thermal_d1;
    for (const InstanceRecord& rec : records) {
        if (rec.accepted && rec.thermal.computable) thermal_d1.push_back(rec.thermal.min_distance);
    }
    const double n = static_cast<double>(thermal_d1.size());
    double mean = 0.0;
    for (double d : thermal_d1) mean += d;
    mean /= n;
    double m2 = 0.0, m3 = 0.0;
    for (double d : thermal_d1) {
        m2 += (d - mean) * (d - mean);
        m3 += (d - mean) * (d - mean) * (d - mean);
    }
    m2 /= n;
    m3 /= n;
    const double skewness = m3 / std::pow(m2, 1.5);

    // counts above the modal bin split into halves: near tail outweighs far tail
    const auto& hist = stats.thermal.distance_histogram;
    std::size_t peak = 0;
    for (std::size_t b = 1; b < hist.counts.size(); ++b) {
        if (hist.counts[b] > hist.counts[peak]) peak = b;
    }
    long near = 0, far = 0;
    const std::size_t mid = peak + 1 + (hist.counts.size() - peak - 1) / 2;
    for (std::size_t b = peak + 1; b < hist.counts.size(); ++b) {
        (b < mid ? near : far) += hist.counts[b];
    }
    const bool tail_ok = skewness > 0.0 && near > far;

    const bool ok = stats.scar.mean_min_distance > 1.0 && mean < 0.5 && tail_ok;
    std::ostringstream detail;
    detail << "scar mean min_d1 = " << stats.scar.mean_min_distance
           << ", thermal mean min_d1 = " << mean << ", skewness = " << skewness
           << ", tail counts " << near << " -> " << far;
    report(8, "distance distribution separation at N=12", ok, detail.str());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// 9. Byte-identical ensemble CSVs across worker counts, through the CLI.
void criterion_9(const std::string& cli_path) {
    if (cli_path.empty()) {
        report(9, "CLI ensemble determinism across worker counts", false, "no CLI path given");
        return;
    }
    const fs::path base = fs::temp_directory_path() / "scarthermo_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    bool ok = true;
    for (const auto& [tag, workers] : {std::pair{"w1", 1}, std::pair{"w8", 8}}) {
        std::ostringstream cmd;
        cmd << '"' << cli_path << '"' << " ensemble --seed 7 --sites 10 --instances 24 --workers "
            << workers << " --out " << (base / tag).string() << " > /dev/null";
        ok = ok && std::system(cmd.str().c_str()) == 0;
    }
    bool identical = true;
    for (const char* name : {"instances.csv", "states.csv"}) {
        const std::string a = read_file(base / "w1" / name);
        identical = identical && !a.empty() && a == read_file(base / "w8" / name);
    }
    ok = ok && identical;
    fs::remove_all(base);
    report(9, "CLI ensemble determinism across worker counts", ok,
           identical ? "instances.csv and states.csv byte-identical" : "output mismatch");
}

}  // namespace

int main(int argc, char** argv) {
    std::cout << std::setprecision(6);
    try {
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();
        const std::vector<InstanceRecord> n12_records = run_n12_ensemble();
        criterion_5(n12_records);
        const EnsembleStats n12_stats = criterion_6(n12_records);
        criterion_7();
        criterion_8(n12_records, n12_stats);
        criterion_9(argc > 1 ? argv[1] : "");
    } catch (const std::exception& e) {
        std::cout << "[FAIL] unexpected exception: " << e.what() << std::endl;
        return 1;
    }
    std::cout << (g_failures == 0 ? "acceptance: all criteria passed"
                                  : "acceptance: FAILURES present")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
