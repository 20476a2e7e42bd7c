#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "scarthermo/ensemble.hpp"
#include "scarthermo/errors.hpp"
#include "scarthermo/io.hpp"

namespace fs = std::filesystem;
using namespace scarthermo;

namespace {

LocalTerm term_from_config(const RunConfig& config) {
    if (config.model == "xxz") {
        return xxz_term(config.xxz_b, config.xxz_j, config.xxz_delta);
    }
    return sample_gue_term(config.base_seed);
}

void ensure_out_dir(const RunConfig& config) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + config.out_dir);
}

int cmd_single(const RunConfig& config) {
    ensure_out_dir(config);
    const fs::path out(config.out_dir);
    const LocalTerm term = term_from_config(config);
    const PipelineConfig pipeline = config.pipeline();

    const SectorBasis sector = build_k0_sector(config.n_sites);
    const ProjectedHamiltonian h = embed_projected_hamiltonian(term, config.n_sites);
    const SpectralData spec = diagonalize(project_to_sector(h, sector), sector);

    std::ostringstream spectrum;
    spectrum << "state_index,energy,entropy\r\n";
    for (Eigen::Index a = 0; a < spec.dimension(); ++a) {
        spectrum << a << ',' << format_double(spec.eigenvalues(a)) << ','
                 << format_double(spec.entropies(a)) << "\r\n";
    }
    write_text_file(out / "spectrum.csv", spectrum.str());

    std::ostringstream curve;
    curve << "energy,beta_C\r\n";
    const int n_points = 200;
    for (int i = 0; i < n_points; ++i) {
        const double e = spec.min_energy() + spec.width() * (i + 0.5) / n_points;
        curve << format_double(e) << ',' << format_double(canonical_beta(spec.eigenvalues, e))
              << "\r\n";
    }
    write_text_file(out / "beta_curve.csv", curve.str());

    InstanceRecord record = run_instance_with_term(term, config.n_sites, pipeline);
    record.instance_id = 0;
    write_text_file(out / "states.csv", states_csv({record}));
    write_text_file(out / "instances.csv", instances_csv({record}));
    write_text_file(out / "manifest.json", manifest_json(config, &term));

    std::cout << "single: N=" << config.n_sites << " sector_dim=" << sector.dimension()
              << " mean_r=" << record.chaos.mean_r
              << (record.accepted ? " accepted" : " rejected(" + record.reject_reason + ")")
              << "\n";
    return 0;
}

int cmd_ensemble(const RunConfig& config) {
    ensure_out_dir(config);
    const fs::path out(config.out_dir);
    const std::vector<InstanceRecord> records = run_ensemble(
        config.base_seed, config.n_sites, config.n_instances, config.pipeline(), config.workers);

    write_text_file(out / "instances.csv", instances_csv(records));
    write_text_file(out / "states.csv", states_csv(records));
    write_text_file(out / "manifest.json", manifest_json(config, nullptr));

    const EnsembleStats stats = aggregate_stats(records);
    write_text_file(out / "stats.json", stats_json(stats));
    write_text_file(out / "hist_delta_beta_scar.csv",
                    histogram_csv(stats.scar.delta_beta_histogram));
    write_text_file(out / "hist_delta_beta_thermal.csv",
                    histogram_csv(stats.thermal.delta_beta_histogram));
    write_text_file(out / "hist_min_d1_scar.csv", histogram_csv(stats.scar.distance_histogram));
    write_text_file(out / "hist_min_d1_thermal.csv",
                    histogram_csv(stats.thermal.distance_histogram));
    write_text_file(out / "scatter_scar.csv", scatter_csv(records, true));
    write_text_file(out / "scatter_thermal.csv", scatter_csv(records, false));

    std::cout << "ensemble: N=" << config.n_sites << " instances=" << config.n_instances
              << " accepted=" << stats.n_accepted << " rejected=" << stats.n_rejected << "\n";
    return 0;
}

int cmd_sweep(const RunConfig& config) {
    ensure_out_dir(config);
    const fs::path out(config.out_dir);
    std::vector<int> n_range = config.n_range;
    if (n_range.empty()) n_range = {8, 9, 10, 11, 12};

    SweepConfig sweep;
    sweep.pipeline = config.pipeline();
    sweep.base_seed = config.base_seed;
    sweep.seeds_per_n = config.n_instances;
    sweep.xxz_b = config.xxz_b;
    sweep.xxz_j = config.xxz_j;
    sweep.xxz_delta = config.xxz_delta;

    const std::vector<SweepRow> rows = scaling_sweep(n_range, sweep, config.workers);
    write_text_file(out / "sweep.csv", sweep_csv(rows));
    write_text_file(out / "manifest.json", manifest_json(config, nullptr));

    for (const SweepRow& row : rows) {
        std::cout << "sweep: N=" << row.n_sites << " accepted=" << row.n_accepted
                  << " thermal_min_d1=" << row.thermal_min_distance
                  << " scar_min_d1=" << row.scar_min_distance << "\n";
    }
    return 0;
}

int cmd_selftest(const RunConfig& config) {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    Eigen::VectorXd two_level(2);
    two_level << 0.0, 1.0;
    check(std::abs(canonical_beta(two_level, 0.25) - std::log(3.0)) < 1e-9,
          "two-level canonical beta");

    {
        const SectorBasis sector = build_k0_sector(8);
        const auto h = embed_projected_hamiltonian(sample_gue_term(config.base_seed), 8);
        const SpectralData spec = diagonalize(project_to_sector(h, sector), sector);
        const double beta_star = 0.7 / spec.width();
        const auto planted =
            subsystem_temperature(spec, reduced_canonical_dm(spec, beta_star), BetaSearchConfig{});
        check(std::abs(planted.beta - beta_star) < 1e-6 && planted.min_distance < 1e-8,
              "planted subsystem temperature recovery");

        const ScarLocation scar = locate_qmbs(spec);
        check(std::abs(scar.energy) < 1e-8 && spec.entropies(scar.index) < 1e-10,
              "zero-energy product-state scar");
    }

    {
        const PipelineConfig pipeline = config.pipeline();
        const InstanceRecord a = run_instance(config.base_seed, 8, pipeline);
        const InstanceRecord b = run_instance(config.base_seed, 8, pipeline);
        check(instances_csv({a}) == instances_csv({b}) && states_csv({a}) == states_csv({b}),
              "per-instance determinism");
    }

    if (failures != 0) throw numerical_error("selftest failed");
    std::cout << "selftest: all checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenstate thermometry of projector-embedded spin chains"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    int sites = 0, instances = 0, workers = 0;
    std::string out_dir;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Config file (key = value lines)");
        cmd->add_option("--seed", seed, "Base seed");
        cmd->add_option("--sites", sites, "Chain length N");
        cmd->add_option("--instances", instances, "Instance count (seeds per N for sweep)");
        cmd->add_option("--workers", workers, "Worker thread count");
        cmd->add_option("--out", out_dir, "Output directory");
        return cmd;
    };

    CLI::App* single = add_common(app.add_subcommand("single", "One instance: spectrum, "
                                                              "beta_C curve, thermometry"));
    CLI::App* ensemble = add_common(
        app.add_subcommand("ensemble", "Seeded ensemble with aggregate statistics"));
    CLI::App* sweep =
        add_common(app.add_subcommand("sweep", "System-size sweep (random + fixed XXZ)"));
    CLI::App* selftest = add_common(app.add_subcommand("selftest", "Quick internal checks"));

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config;
        if (!config_path.empty()) config = load_config(config_path);

        CLI::App* active = app.get_subcommands().front();
        if (active->count("--seed")) config.base_seed = seed;
        if (active->count("--sites")) config.n_sites = sites;
        if (active->count("--instances")) config.n_instances = instances;
        if (active->count("--out")) config.out_dir = out_dir;
        if (active->count("--workers")) {
            config.workers = workers;
        } else if (const char* env = std::getenv("SCAR_THERMO_WORKERS")) {
            config.workers = std::atoi(env);
        }
        config.validate();

        if (active == single) return cmd_single(config);
        if (active == ensemble) return cmd_ensemble(config);
        if (active == sweep) return cmd_sweep(config);
        if (active == selftest) return cmd_selftest(config);
        return 2;
    } catch (const invalid_input& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}
