#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scarthermo/model.hpp"
#include "scarthermo/thermometry.hpp"

namespace scarthermo {

struct FilterConfig {
    // r-statistic acceptance band; defaults depend on N (wider below 10 sites).
    std::optional<double> r_lo;
    std::optional<double> r_hi;
    double scar_position_lo = 0.25;
    double scar_position_hi = 0.75;

    double effective_r_lo(int n_sites) const;
    double effective_r_hi(int n_sites) const;
};

struct PipelineConfig {
    FilterConfig filter;
    BetaSearchConfig beta_search;
    double r_window = 0.5;
    bool thermometry_on_band = false;  // central excited band, rank in [0.45, 0.55]
    double band_lo = 0.45;
    double band_hi = 0.55;
    bool keep_objective_samples = false;
};

struct InstanceRecord {
    long instance_id = 0;
    std::uint64_t seed = 0;
    int n_sites = 0;
    LocalTerm::Kind model_kind = LocalTerm::Kind::Gue;
    bool accepted = false;
    std::string reject_reason;  // "r-statistic" | "scar-position" | "degenerate-scar"
    ChaosReport chaos;
    double scar_overlap = 0.0;
    double scar_rank_fraction = 0.0;
    ThermometryResult scar;
    ThermometryResult thermal;
    std::vector<ThermometryResult> excited_band;
    // fraction-of-the-spectrum pairs (e_C, e_S)
    std::array<double, 2> scar_fraction{0.0, 0.0};
    std::array<double, 2> thermal_fraction{0.0, 0.0};
};

// accept/reject with reason ("" when accepted)
std::pair<bool, std::string> acceptance_filter(const ChaosReport& chaos,
                                               double scar_rank_fraction, int n_sites,
                                               const FilterConfig& filter);

// Full per-instance pipeline for a random GUE term drawn from `seed`.
InstanceRecord run_instance(std::uint64_t seed, int n_sites, const PipelineConfig& config);

// Same pipeline for a fixed local term (e.g. the XXZ chain).
InstanceRecord run_instance_with_term(const LocalTerm& term, int n_sites,
                                      const PipelineConfig& config);

// Instances with per-instance seeds base_seed + i, executed on `workers`
// threads; output is ordered by instance_id regardless of scheduling.
std::vector<InstanceRecord> run_ensemble(std::uint64_t base_seed, int n_sites, int n_instances,
                                         const PipelineConfig& config, int workers = 1);

struct Histogram {
    std::vector<double> edges;  // size counts.size() + 1
    std::vector<long> counts;
};

// Freedman-Diaconis binning; falls back to a single bin for degenerate data.
Histogram build_histogram(std::vector<double> samples);

struct TailFit {
    std::string best_model;  // "gaussian" | "exponential"
    double lambda = 0.0;     // exponential decay rate (per unit delta_beta / std)
    double variance = 0.0;   // sample variance backing the gaussian model
    double resid_gaussian = 0.0;
    double resid_exponential = 0.0;
};

// Count-weighted least-squares fit of log-counts near the peak to gaussian
// and exponential decay models; requires >= 8 populated bins.
TailFit fit_tail(const Histogram& hist, double variance);

std::optional<double> pearson_corr(const std::vector<double>& x, const std::vector<double>& y);

// (e_C, e_S): energy and Gibbs energy at beta_S, rescaled to [0, 1] across
// the spectrum.
std::pair<double, double> fraction_of_spectrum(const SpectralData& spec,
                                               const ThermometryResult& result);

struct FamilyStats {
    long count = 0;
    double mean_delta_beta = 0.0;
    double variance_delta_beta = 0.0;
    double stderr_delta_beta = 0.0;
    double mean_min_distance = 0.0;
    double median_min_distance = 0.0;
    double median_abs_delta_beta = 0.0;
    Histogram delta_beta_histogram;
    Histogram distance_histogram;
    TailFit tail_fit;
    std::optional<double> pearson;
    std::vector<std::array<double, 2>> fraction_pairs;
};

struct EnsembleStats {
    long n_accepted = 0;
    long n_rejected = 0;
    FamilyStats scar;
    FamilyStats thermal;
};

EnsembleStats aggregate_stats(const std::vector<InstanceRecord>& records);

struct SweepRow {
    int n_sites = 0;
    long n_accepted = 0;
    long n_rejected = 0;
    // medians over accepted random instances
    double scar_abs_delta_beta = 0.0;
    double scar_min_distance = 0.0;
    double thermal_abs_delta_beta = 0.0;
    double thermal_min_distance = 0.0;
    double variance_delta_beta_scar = 0.0;
    double variance_delta_beta_thermal = 0.0;
    double pearson_scar = 0.0;
    double pearson_thermal = 0.0;
    // fixed XXZ chain at this N
    double xxz_scar_abs_delta_beta = 0.0;
    double xxz_scar_min_distance = 0.0;
    double xxz_band_abs_delta_beta = 0.0;  // median over the central band
    double xxz_band_min_distance = 0.0;
};

struct SweepConfig {
    PipelineConfig pipeline;
    std::uint64_t base_seed = 1;
    int seeds_per_n = 150;
    double xxz_b = 0.5, xxz_j = 1.0, xxz_delta = 0.9;
};

std::vector<SweepRow> scaling_sweep(const std::vector<int>& n_range, const SweepConfig& config,
                                    int workers = 1);

double median(std::vector<double> values);

}  // namespace scarthermo
