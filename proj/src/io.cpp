#include "scarthermo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scarthermo/errors.hpp"

namespace scarthermo {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kEol = "\r\n";

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream stream(s);
    while (std::getline(stream, item, sep)) out.push_back(item);
    return out;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw invalid_input("config field '" + key + "': expected true or false");
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string flags_string(const ThermometryResult& r, const char* family) {
    std::string flags = family;
    if (!r.computable) flags += ";not-computable";
    if (r.boundary_hit) flags += ";boundary-hit";
    return flags;
}

void append_state_row(std::ostringstream& out, long instance_id, const ThermometryResult& r,
                      const char* family) {
    out << instance_id << ',' << r.eigenstate_index << ',' << format_double(r.energy) << ','
        << format_double(r.beta_canonical) << ',' << format_double(r.beta_subsystem) << ','
        << format_double(r.delta_beta) << ',' << format_double(r.min_distance) << ','
        << format_double(r.entropy_half_chain) << ',' << csv_escape(flags_string(r, family))
        << kEol;
}

json histogram_json(const Histogram& hist) {
    return json{{"edges", hist.edges}, {"counts", hist.counts}};
}

json tail_fit_json(const TailFit& fit) {
    return json{{"best_model", fit.best_model},
                {"lambda", fit.lambda},
                {"variance", fit.variance},
                {"resid_gaussian", fit.resid_gaussian},
                {"resid_exponential", fit.resid_exponential}};
}

json family_json(const FamilyStats& stats) {
    json j{{"count", stats.count},
           {"mean_delta_beta", stats.mean_delta_beta},
           {"variance_delta_beta", stats.variance_delta_beta},
           {"stderr_delta_beta", stats.stderr_delta_beta},
           {"mean_min_d1", stats.mean_min_distance},
           {"median_min_d1", stats.median_min_distance},
           {"median_abs_delta_beta", stats.median_abs_delta_beta},
           {"delta_beta_histogram", histogram_json(stats.delta_beta_histogram)},
           {"min_d1_histogram", histogram_json(stats.distance_histogram)},
           {"tail_fit", tail_fit_json(stats.tail_fit)}};
    if (stats.pearson) {
        j["pearson"] = *stats.pearson;
    } else {
        j["pearson"] = nullptr;
        j["pearson_degenerate"] = true;
    }
    return j;
}

}  // namespace

void RunConfig::validate() const {
    if (model != "gue" && model != "xxz") {
        throw invalid_input("config field 'model': must be gue or xxz");
    }
    if (n_sites < 3) throw invalid_input("config field 'n_sites': must be >= 3");
    for (int n : n_range) {
        if (n < 3) throw invalid_input("config field 'n_range': entries must be >= 3");
    }
    if (n_instances < 1) throw invalid_input("config field 'n_instances': must be >= 1");
    if (workers < 1) throw invalid_input("config field 'workers': must be >= 1");
    if (beta_grid_points < 64) {
        throw invalid_input("config field 'beta_grid_points': must be >= 64");
    }
    if (!(beta_range_scale > 0.0) || !std::isfinite(beta_range_scale)) {
        throw invalid_input("config field 'beta_range_scale': must be finite and positive");
    }
    if (!(beta_tolerance > 0.0) || !std::isfinite(beta_tolerance)) {
        throw invalid_input("config field 'beta_tolerance': must be finite and positive");
    }
    if (!(r_window > 0.0 && r_window <= 1.0)) {
        throw invalid_input("config field 'r_window': must be in (0, 1]");
    }
    if (out_dir.empty()) throw invalid_input("config field 'out_dir': must be non-empty");
}

PipelineConfig RunConfig::pipeline() const {
    PipelineConfig config;
    if (r_band_lo >= 0.0) config.filter.r_lo = r_band_lo;
    if (r_band_hi >= 0.0) config.filter.r_hi = r_band_hi;
    config.filter.scar_position_lo = scar_position_lo;
    config.filter.scar_position_hi = scar_position_hi;
    config.beta_search.range_scale = beta_range_scale;
    config.beta_search.grid_points = beta_grid_points;
    config.beta_search.tolerance = beta_tolerance;
    config.r_window = r_window;
    config.thermometry_on_band = include_band;
    config.keep_objective_samples = emit_objective_samples;
    return config;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw invalid_input("config line " + std::to_string(line_no) +
                                ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "model") config.model = value;
            else if (key == "xxz_b") config.xxz_b = std::stod(value);
            else if (key == "xxz_j") config.xxz_j = std::stod(value);
            else if (key == "xxz_delta") config.xxz_delta = std::stod(value);
            else if (key == "n_sites") config.n_sites = std::stoi(value);
            else if (key == "n_range") {
                config.n_range.clear();
                for (const std::string& item : split(value, ',')) {
                    config.n_range.push_back(std::stoi(trim(item)));
                }
            }
            else if (key == "base_seed") config.base_seed = std::stoull(value);
            else if (key == "n_instances") config.n_instances = std::stoi(value);
            else if (key == "workers") config.workers = std::stoi(value);
            else if (key == "beta_range_scale") config.beta_range_scale = std::stod(value);
            else if (key == "beta_grid_points") config.beta_grid_points = std::stoi(value);
            else if (key == "beta_tolerance") config.beta_tolerance = std::stod(value);
            else if (key == "r_band_lo") config.r_band_lo = std::stod(value);
            else if (key == "r_band_hi") config.r_band_hi = std::stod(value);
            else if (key == "scar_position_lo") config.scar_position_lo = std::stod(value);
            else if (key == "scar_position_hi") config.scar_position_hi = std::stod(value);
            else if (key == "r_window") config.r_window = std::stod(value);
            else if (key == "include_band") config.include_band = parse_bool(value, key);
            else if (key == "emit_objective_samples") {
                config.emit_objective_samples = parse_bool(value, key);
            }
            else if (key == "out_dir") config.out_dir = value;
            else throw invalid_input("config field '" + key + "': unknown key");
        } catch (const std::invalid_argument& e) {
            if (dynamic_cast<const invalid_input*>(&e)) throw;
            throw invalid_input("config field '" + key + "': cannot parse value '" + value + "'");
        } catch (const std::out_of_range&) {
            throw invalid_input("config field '" + key + "': value out of range");
        }
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw io_error("cannot open config file: " + path.string());
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_config_text(buffer.str());
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream out;
    out << "model = " << config.model << '\n';
    out << "xxz_b = " << format_double(config.xxz_b) << '\n';
    out << "xxz_j = " << format_double(config.xxz_j) << '\n';
    out << "xxz_delta = " << format_double(config.xxz_delta) << '\n';
    out << "n_sites = " << config.n_sites << '\n';
    if (!config.n_range.empty()) {
        out << "n_range = ";
        for (std::size_t i = 0; i < config.n_range.size(); ++i) {
            if (i) out << ',';
            out << config.n_range[i];
        }
        out << '\n';
    }
    out << "base_seed = " << config.base_seed << '\n';
    out << "n_instances = " << config.n_instances << '\n';
    out << "workers = " << config.workers << '\n';
    out << "beta_range_scale = " << format_double(config.beta_range_scale) << '\n';
    out << "beta_grid_points = " << config.beta_grid_points << '\n';
    out << "beta_tolerance = " << format_double(config.beta_tolerance) << '\n';
    out << "r_band_lo = " << format_double(config.r_band_lo) << '\n';
    out << "r_band_hi = " << format_double(config.r_band_hi) << '\n';
    out << "scar_position_lo = " << format_double(config.scar_position_lo) << '\n';
    out << "scar_position_hi = " << format_double(config.scar_position_hi) << '\n';
    out << "r_window = " << format_double(config.r_window) << '\n';
    out << "include_band = " << (config.include_band ? "true" : "false") << '\n';
    out << "emit_objective_samples = " << (config.emit_objective_samples ? "true" : "false")
        << '\n';
    out << "out_dir = " << config.out_dir << '\n';
    return out.str();
}

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw io_error("cannot open for writing: " + path.string());
    file << content;
    if (!file) throw io_error("write failed: " + path.string());
}

std::string instances_csv(const std::vector<InstanceRecord>& records) {
    std::ostringstream out;
    out << "instance_id,seed,n_sites,model,accepted,reject_reason,mean_r,n_gaps,"
           "n_degenerate,scar_overlap,scar_rank_fraction"
        << kEol;
    for (const InstanceRecord& rec : records) {
        out << rec.instance_id << ',' << rec.seed << ',' << rec.n_sites << ','
            << to_string(rec.model_kind) << ',' << (rec.accepted ? "true" : "false") << ','
            << csv_escape(rec.reject_reason) << ',' << format_double(rec.chaos.mean_r) << ','
            << rec.chaos.n_gaps << ',' << rec.chaos.n_degenerate << ','
            << format_double(rec.scar_overlap) << ',' << format_double(rec.scar_rank_fraction)
            << kEol;
    }
    return out.str();
}

std::string states_csv(const std::vector<InstanceRecord>& records) {
    std::ostringstream out;
    out << "instance_id,state_index,energy,beta_C,beta_S,delta_beta,min_d1,entropy,flags" << kEol;
    for (const InstanceRecord& rec : records) {
        if (rec.reject_reason == "degenerate-scar") continue;
        append_state_row(out, rec.instance_id, rec.scar, "scar");
        append_state_row(out, rec.instance_id, rec.thermal, "thermal");
        for (const ThermometryResult& r : rec.excited_band) {
            append_state_row(out, rec.instance_id, r, "band");
        }
    }
    return out.str();
}

std::string histogram_csv(const Histogram& hist) {
    std::ostringstream out;
    out << "bin_lo,bin_hi,count" << kEol;
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        out << format_double(hist.edges[b]) << ',' << format_double(hist.edges[b + 1]) << ','
            << hist.counts[b] << kEol;
    }
    return out.str();
}

std::string scatter_csv(const std::vector<InstanceRecord>& records, bool scar_family) {
    std::ostringstream out;
    out << "instance_id,beta_C,beta_S,e_C,e_S" << kEol;
    for (const InstanceRecord& rec : records) {
        if (!rec.accepted) continue;
        const ThermometryResult& r = scar_family ? rec.scar : rec.thermal;
        const auto& frac = scar_family ? rec.scar_fraction : rec.thermal_fraction;
        if (!r.computable) continue;
        out << rec.instance_id << ',' << format_double(r.beta_canonical) << ','
            << format_double(r.beta_subsystem) << ',' << format_double(frac[0]) << ','
            << format_double(frac[1]) << kEol;
    }
    return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "n_sites,n_accepted,n_rejected,scar_abs_delta_beta,scar_min_d1,"
           "thermal_abs_delta_beta,thermal_min_d1,variance_delta_beta_scar,"
           "variance_delta_beta_thermal,pearson_scar,pearson_thermal,"
           "xxz_scar_abs_delta_beta,xxz_scar_min_d1,xxz_band_abs_delta_beta,xxz_band_min_d1"
        << kEol;
    for (const SweepRow& row : rows) {
        out << row.n_sites << ',' << row.n_accepted << ',' << row.n_rejected << ','
            << format_double(row.scar_abs_delta_beta) << ','
            << format_double(row.scar_min_distance) << ','
            << format_double(row.thermal_abs_delta_beta) << ','
            << format_double(row.thermal_min_distance) << ','
            << format_double(row.variance_delta_beta_scar) << ','
            << format_double(row.variance_delta_beta_thermal) << ','
            << format_double(row.pearson_scar) << ',' << format_double(row.pearson_thermal)
            << ',' << format_double(row.xxz_scar_abs_delta_beta) << ','
            << format_double(row.xxz_scar_min_distance) << ','
            << format_double(row.xxz_band_abs_delta_beta) << ','
            << format_double(row.xxz_band_min_distance) << kEol;
    }
    return out.str();
}

std::string stats_json(const EnsembleStats& stats) {
    json j{{"n_accepted", stats.n_accepted},
           {"n_rejected", stats.n_rejected},
           {"scar", family_json(stats.scar)},
           {"thermal", family_json(stats.thermal)}};
    return j.dump(2) + "\n";
}

std::string manifest_json(const RunConfig& config, const LocalTerm* fixed_term) {
    const std::string serialized = serialize_config(config);
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a(serialized)));

    json j;
    j["code_version"] = kCodeVersion;
    j["rng"] = kRngIdentifier;
    j["config_hash"] = hash_hex;
    j["base_seed"] = config.base_seed;
    j["n_sites"] = config.n_sites;
    j["model"] = config.model;
    j["filters"] = {{"r_band_lo", config.r_band_lo < 0.0 ? json("auto") : json(config.r_band_lo)},
                    {"r_band_hi", config.r_band_hi < 0.0 ? json("auto") : json(config.r_band_hi)},
                    {"scar_position_lo", config.scar_position_lo},
                    {"scar_position_hi", config.scar_position_hi}};
    j["beta_search"] = {{"range_scale", config.beta_range_scale},
                        {"grid_points", config.beta_grid_points},
                        {"tolerance", config.beta_tolerance}};
    j["gue_convention"] = "h = (A + A^dag)/2, A_ij = (x + i y)/sqrt(2), x,y ~ N(0,1)";
    j["config"] = serialized;
    if (fixed_term) {
        json entries = json::array();
        for (int i = 0; i < 4; ++i) {
            for (int k = 0; k < 4; ++k) {
                entries.push_back(fixed_term->matrix(i, k).real());
                entries.push_back(fixed_term->matrix(i, k).imag());
            }
        }
        json provenance{{"kind", to_string(fixed_term->kind)}};
        if (fixed_term->kind == LocalTerm::Kind::Gue) {
            provenance["seed"] = fixed_term->seed;
        } else if (fixed_term->kind == LocalTerm::Kind::Xxz) {
            provenance["b"] = fixed_term->b;
            provenance["J"] = fixed_term->j;
            provenance["delta"] = fixed_term->delta;
        }
        j["local_term"] = {{"entries_row_major_re_im", entries}, {"provenance", provenance}};
    }
    return j.dump(2) + "\n";
}

}  // namespace scarthermo
