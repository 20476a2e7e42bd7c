#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scarthermo/ensemble.hpp"

namespace scarthermo {

struct RunConfig {
    std::string model = "gue";  // "gue" | "xxz"
    double xxz_b = 0.5, xxz_j = 1.0, xxz_delta = 0.9;
    int n_sites = 12;
    std::vector<int> n_range;  // sweep sizes; defaults to {8,...,12} when empty
    std::uint64_t base_seed = 1;
    int n_instances = 100;
    int workers = 1;
    double beta_range_scale = 40.0;
    int beta_grid_points = 256;
    double beta_tolerance = 1e-10;
    double r_band_lo = -1.0;  // negative = N-dependent default
    double r_band_hi = -1.0;
    double scar_position_lo = 0.25;
    double scar_position_hi = 0.75;
    double r_window = 0.5;
    bool include_band = false;
    bool emit_objective_samples = false;
    std::string out_dir = "out";

    void validate() const;  // throws invalid_input naming the offending field
    PipelineConfig pipeline() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

// 17 significant digits, shortest form ("%.17g").
std::string format_double(double value);

// RFC 4180 field quoting (only applied when needed).
std::string csv_escape(const std::string& field);

void write_text_file(const std::filesystem::path& path, const std::string& content);

std::string instances_csv(const std::vector<InstanceRecord>& records);
std::string states_csv(const std::vector<InstanceRecord>& records);
std::string histogram_csv(const Histogram& hist);
std::string scatter_csv(const std::vector<InstanceRecord>& records, bool scar_family);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string stats_json(const EnsembleStats& stats);
std::string manifest_json(const RunConfig& config, const LocalTerm* fixed_term);

inline constexpr const char* kRngIdentifier = "mt19937_64+box-muller";
inline constexpr const char* kCodeVersion = "0.1.0";

}  // namespace scarthermo
