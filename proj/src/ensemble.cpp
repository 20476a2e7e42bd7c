#include "scarthermo/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "scarthermo/errors.hpp"

namespace scarthermo {

double FilterConfig::effective_r_lo(int n_sites) const {
    if (r_lo) return *r_lo;
    return n_sites >= 10 ? 0.58 : 0.5596;
}

double FilterConfig::effective_r_hi(int n_sites) const {
    if (r_hi) return *r_hi;
    return n_sites >= 10 ? 0.62 : 0.6396;
}

std::pair<bool, std::string> acceptance_filter(const ChaosReport& chaos,
                                               double scar_rank_fraction, int n_sites,
                                               const FilterConfig& filter) {
    if (chaos.mean_r < filter.effective_r_lo(n_sites) ||
        chaos.mean_r > filter.effective_r_hi(n_sites)) {
        return {false, "r-statistic"};
    }
    if (scar_rank_fraction < filter.scar_position_lo ||
        scar_rank_fraction > filter.scar_position_hi) {
        return {false, "scar-position"};
    }
    return {true, ""};
}

namespace {

InstanceRecord run_pipeline(const LocalTerm& term, std::uint64_t seed, int n_sites,
                            const PipelineConfig& config, const SectorBasis& sector) {
    InstanceRecord record;
    record.seed = seed;
    record.n_sites = n_sites;
    record.model_kind = term.kind;

    const ProjectedHamiltonian h = embed_projected_hamiltonian(term, n_sites);
    const Matrix sector_matrix = project_to_sector(h, sector);
    const SpectralData spec = diagonalize(sector_matrix, sector);
    // Small sectors cannot fill 50 levels into the central-half window; widen
    // the window before relaxing the level minimum.
    double window = config.r_window;
    int min_levels = 50;
    if (static_cast<double>(spec.dimension()) * window < 50.0) {
        window = 1.0;
        min_levels = std::min<int>(50, static_cast<int>(spec.dimension()));
    }
    record.chaos = r_statistic(spec.eigenvalues, window, min_levels);

    ScarLocation scar_loc;
    try {
        scar_loc = locate_qmbs(spec);
    } catch (const degenerate_scar&) {
        record.accepted = false;
        record.reject_reason = "degenerate-scar";
        return record;
    }
    record.scar_overlap = scar_loc.overlap;
    record.scar_rank_fraction = scar_loc.rank_fraction;

    auto [accepted, reason] =
        acceptance_filter(record.chaos, record.scar_rank_fraction, n_sites, config.filter);
    record.accepted = accepted;
    record.reject_reason = reason;

    record.scar = thermometry_for_state(spec, scar_loc.index, config.beta_search,
                                        config.keep_objective_samples);
    try {
        const int thermal_index = select_thermal_reference(spec);
        record.thermal = thermometry_for_state(spec, thermal_index, config.beta_search,
                                               config.keep_objective_samples);
    } catch (const insufficient_data&) {
        // scar at the spectral edge leaves no positive eigenvalue; such
        // instances are rejected by the scar-position filter
        record.thermal.computable = false;
    }
    if (record.scar.computable) {
        auto [ec, es] = fraction_of_spectrum(spec, record.scar);
        record.scar_fraction = {ec, es};
    }
    if (record.thermal.computable) {
        auto [ec, es] = fraction_of_spectrum(spec, record.thermal);
        record.thermal_fraction = {ec, es};
    }

    if (config.thermometry_on_band) {
        const Eigen::Index dim = spec.dimension();
        for (Eigen::Index a = 0; a < dim; ++a) {
            const double rank = static_cast<double>(a) / static_cast<double>(dim - 1);
            if (rank < config.band_lo || rank > config.band_hi) continue;
            if (a == scar_loc.index) continue;
            record.excited_band.push_back(
                thermometry_for_state(spec, static_cast<int>(a), config.beta_search, false));
        }
    }
    return record;
}

}  // namespace

InstanceRecord run_instance(std::uint64_t seed, int n_sites, const PipelineConfig& config) {
    const SectorBasis sector = build_k0_sector(n_sites);
    return run_pipeline(sample_gue_term(seed), seed, n_sites, config, sector);
}

InstanceRecord run_instance_with_term(const LocalTerm& term, int n_sites,
                                      const PipelineConfig& config) {
    const SectorBasis sector = build_k0_sector(n_sites);
    return run_pipeline(term, term.seed, n_sites, config, sector);
}

std::vector<InstanceRecord> run_ensemble(std::uint64_t base_seed, int n_sites, int n_instances,
                                         const PipelineConfig& config, int workers) {
    if (n_instances < 0) throw invalid_input("run_ensemble: negative instance count");
    const SectorBasis sector = build_k0_sector(n_sites);
    std::vector<InstanceRecord> records(n_instances);

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_instances || failed.load()) break;
            try {
                records[i] = run_pipeline(sample_gue_term(base_seed + i), base_seed + i,
                                          n_sites, config, sector);
                records[i].instance_id = i;
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
            }
        }
    };

    workers = std::max(1, workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return records;
}

double median(std::vector<double> values) {
    if (values.empty()) throw insufficient_data("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Histogram build_histogram(std::vector<double> samples) {
    if (samples.empty()) throw insufficient_data("build_histogram: no samples");
    std::sort(samples.begin(), samples.end());
    const double lo = samples.front();
    const double hi = samples.back();
    const std::size_t n = samples.size();
    const double q1 = samples[n / 4];
    const double q3 = samples[(3 * n) / 4];
    const double iqr = q3 - q1;
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));

    Histogram hist;
    if (width <= 0.0 || hi <= lo) {
        hist.edges = {lo, std::nextafter(hi, hi + 1.0)};
        hist.counts = {static_cast<long>(n)};
        return hist;
    }
    const int n_bins = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
    hist.counts.assign(n_bins, 0);
    for (int b = 0; b <= n_bins; ++b) hist.edges.push_back(lo + (hi - lo) * b / n_bins);
    for (double x : samples) {
        int b = static_cast<int>((x - lo) / (hi - lo) * n_bins);
        b = std::clamp(b, 0, n_bins - 1);
        ++hist.counts[b];
    }
    return hist;
}

TailFit fit_tail(const Histogram& hist, double variance) {
    if (variance <= 0.0) throw invalid_input("fit_tail: variance must be positive");
    const double sigma = std::sqrt(variance);

    // populated bins with centers within 3 sigma of zero; bins are weighted
    // by their counts since var(log c) ~ 1/c under Poisson noise
    std::vector<double> x, logc, weight;
    double total_weight = 0.0;
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        if (hist.counts[b] <= 0) continue;
        const double center = 0.5 * (hist.edges[b] + hist.edges[b + 1]);
        if (std::abs(center) > 3.0 * sigma) continue;
        x.push_back(center);
        logc.push_back(std::log(static_cast<double>(hist.counts[b])));
        weight.push_back(static_cast<double>(hist.counts[b]));
        total_weight += weight.back();
    }
    if (x.size() < 8) {
        throw insufficient_data("fit_tail: fewer than 8 populated bins near the peak");
    }
    const std::size_t m = x.size();

    TailFit fit;
    fit.variance = variance;

    // gaussian: log c = a - x^2 / (2 v), amplitude a is the only free parameter
    {
        double a = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            a += weight[i] * (logc[i] + x[i] * x[i] / (2.0 * variance));
        }
        a /= total_weight;
        double ss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = logc[i] - (a - x[i] * x[i] / (2.0 * variance));
            ss += weight[i] * r * r;
        }
        fit.resid_gaussian = std::sqrt(ss / total_weight);
    }

    // exponential: log c = a - lambda |x| / sigma, linear least squares in (a, lambda)
    {
        double su = 0.0, suu = 0.0, sy = 0.0, suy = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double u = std::abs(x[i]) / sigma;
            su += weight[i] * u;
            suu += weight[i] * u * u;
            sy += weight[i] * logc[i];
            suy += weight[i] * u * logc[i];
        }
        const double det = total_weight * suu - su * su;
        double lambda = 0.0, a = sy / total_weight;
        if (std::abs(det) > 1e-30) {
            lambda = -(total_weight * suy - su * sy) / det;
            a = (sy + lambda * su) / total_weight;
        }
        fit.lambda = lambda;
        double ss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = logc[i] - (a - lambda * std::abs(x[i]) / sigma);
            ss += weight[i] * r * r;
        }
        fit.resid_exponential = std::sqrt(ss / total_weight);
    }

    fit.best_model = fit.resid_gaussian <= fit.resid_exponential ? "gaussian" : "exponential";
    return fit;
}

std::optional<double> pearson_corr(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw invalid_input("pearson_corr: length mismatch");
    if (x.size() < 2) throw insufficient_data("pearson_corr: need at least 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::pair<double, double> fraction_of_spectrum(const SpectralData& spec,
                                               const ThermometryResult& result) {
    const double width = spec.width();
    if (width <= 0.0) throw invalid_input("fraction_of_spectrum: zero spectral width");
    if (!std::isfinite(result.beta_subsystem)) {
        throw invalid_input("fraction_of_spectrum: non-finite beta_S");
    }
    const double e_c = (result.energy - spec.min_energy()) / width;
    const double gibbs = gibbs_energy(spec.eigenvalues, result.beta_subsystem);
    const double e_s = (gibbs - spec.min_energy()) / width;
    return {e_c, e_s};
}

namespace {

FamilyStats family_stats(const std::vector<double>& delta_beta,
                         const std::vector<double>& min_distance,
                         const std::vector<double>& beta_c, const std::vector<double>& beta_s,
                         std::vector<std::array<double, 2>> fraction_pairs) {
    FamilyStats stats;
    stats.count = static_cast<long>(delta_beta.size());
    const double n = static_cast<double>(delta_beta.size());
    stats.mean_delta_beta =
        std::accumulate(delta_beta.begin(), delta_beta.end(), 0.0) / n;
    double ss = 0.0;
    for (double d : delta_beta) ss += (d - stats.mean_delta_beta) * (d - stats.mean_delta_beta);
    stats.variance_delta_beta = n > 1 ? ss / (n - 1.0) : 0.0;
    stats.stderr_delta_beta = std::sqrt(stats.variance_delta_beta / n);
    stats.mean_min_distance =
        std::accumulate(min_distance.begin(), min_distance.end(), 0.0) / n;
    stats.median_min_distance = median(min_distance);
    std::vector<double> abs_db(delta_beta.size());
    std::transform(delta_beta.begin(), delta_beta.end(), abs_db.begin(),
                   [](double d) { return std::abs(d); });
    stats.median_abs_delta_beta = median(abs_db);
    stats.delta_beta_histogram = build_histogram(delta_beta);
    stats.distance_histogram = build_histogram(min_distance);
    if (stats.variance_delta_beta > 0.0) {
        try {
            stats.tail_fit = fit_tail(stats.delta_beta_histogram, stats.variance_delta_beta);
        } catch (const insufficient_data&) {
            stats.tail_fit.best_model = "insufficient-data";
        }
    } else {
        stats.tail_fit.best_model = "degenerate";
    }
    stats.pearson = pearson_corr(beta_c, beta_s);
    stats.fraction_pairs = std::move(fraction_pairs);
    return stats;
}

}  // namespace

EnsembleStats aggregate_stats(const std::vector<InstanceRecord>& records) {
    EnsembleStats stats;
    std::vector<double> scar_db, scar_d1, scar_bc, scar_bs;
    std::vector<double> th_db, th_d1, th_bc, th_bs;
    std::vector<std::array<double, 2>> scar_frac, th_frac;
    for (const InstanceRecord& rec : records) {
        if (!rec.accepted) {
            ++stats.n_rejected;
            continue;
        }
        ++stats.n_accepted;
        if (rec.scar.computable) {
            scar_db.push_back(rec.scar.delta_beta);
            scar_d1.push_back(rec.scar.min_distance);
            scar_bc.push_back(rec.scar.beta_canonical);
            scar_bs.push_back(rec.scar.beta_subsystem);
            scar_frac.push_back(rec.scar_fraction);
        }
        if (rec.thermal.computable) {
            th_db.push_back(rec.thermal.delta_beta);
            th_d1.push_back(rec.thermal.min_distance);
            th_bc.push_back(rec.thermal.beta_canonical);
            th_bs.push_back(rec.thermal.beta_subsystem);
            th_frac.push_back(rec.thermal_fraction);
        }
    }
    if (stats.n_accepted < 2) {
        throw insufficient_data("aggregate_stats: need at least 2 accepted records");
    }
    stats.scar = family_stats(scar_db, scar_d1, scar_bc, scar_bs, std::move(scar_frac));
    stats.thermal = family_stats(th_db, th_d1, th_bc, th_bs, std::move(th_frac));
    return stats;
}

std::vector<SweepRow> scaling_sweep(const std::vector<int>& n_range, const SweepConfig& config,
                                    int workers) {
    std::vector<SweepRow> rows;
    for (int n_sites : n_range) {
        PipelineConfig pipeline = config.pipeline;
        pipeline.thermometry_on_band = false;
        const std::vector<InstanceRecord> records =
            run_ensemble(config.base_seed, n_sites, config.seeds_per_n, pipeline, workers);
        const EnsembleStats stats = aggregate_stats(records);

        SweepRow row;
        row.n_sites = n_sites;
        row.n_accepted = stats.n_accepted;
        row.n_rejected = stats.n_rejected;
        row.scar_abs_delta_beta = stats.scar.median_abs_delta_beta;
        row.scar_min_distance = stats.scar.median_min_distance;
        row.thermal_abs_delta_beta = stats.thermal.median_abs_delta_beta;
        row.thermal_min_distance = stats.thermal.median_min_distance;
        row.variance_delta_beta_scar = stats.scar.variance_delta_beta;
        row.variance_delta_beta_thermal = stats.thermal.variance_delta_beta;
        row.pearson_scar = stats.scar.pearson.value_or(0.0);
        row.pearson_thermal = stats.thermal.pearson.value_or(0.0);

        PipelineConfig xxz_pipeline = config.pipeline;
        xxz_pipeline.thermometry_on_band = true;
        const InstanceRecord xxz = run_instance_with_term(
            xxz_term(config.xxz_b, config.xxz_j, config.xxz_delta), n_sites, xxz_pipeline);
        row.xxz_scar_abs_delta_beta = std::abs(xxz.scar.delta_beta);
        row.xxz_scar_min_distance = xxz.scar.min_distance;
        std::vector<double> band_db, band_d1;
        for (const ThermometryResult& r : xxz.excited_band) {
            if (!r.computable) continue;
            band_db.push_back(std::abs(r.delta_beta));
            band_d1.push_back(r.min_distance);
        }
        if (!band_db.empty()) {
            row.xxz_band_abs_delta_beta = median(band_db);
            row.xxz_band_min_distance = median(band_d1);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace scarthermo
