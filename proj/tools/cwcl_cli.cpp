// Command-line front end: runs seeded Monte Carlo / analytic RMSE sweeps,
// emits seeded radio layouts, and validates experiment configs.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cwcl/cwcl.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::optional<std::string>& mode,
            const std::optional<std::uint64_t>& seed, const std::optional<std::size_t>& trials,
            const std::optional<std::string>& out) {
    cwcl::ExperimentConfig cfg = cwcl::load_config(config_path);
    if (mode) cfg.mode = cwcl::parse_mode(*mode);
    if (seed) cfg.master_seed = *seed;
    if (trials) cfg.trials = *trials;
    if (out) cfg.output_path = *out;

    const std::vector<cwcl::ResultRow> rows = cwcl::run_sweep(cfg);
    for (const cwcl::ResultRow& r : rows) {
        std::cout << "sweep " << r.sweep_id << ": p_t=" << r.p_t_dbm << " dBm, p_i=" << r.p_i_dbm
                  << " dBm, interferer=(" << r.interferer.x << "," << r.interferer.y << ")";
        if (r.rmse_cyclic_mc) std::cout << ", rmse_cyclic_mc=" << *r.rmse_cyclic_mc;
        if (r.rmse_plain_mc) std::cout << ", rmse_plain_mc=" << *r.rmse_plain_mc;
        if (r.rmse_cyclic_analytic) std::cout << ", rmse_analytic=" << *r.rmse_cyclic_analytic;
        if (!r.mc_error.empty()) std::cout << ", mc_error=" << r.mc_error;
        if (!r.analytic_error.empty()) std::cout << ", analytic_error=" << r.analytic_error;
        std::cout << "\n";
    }
    std::cout << "wrote " << rows.size() << " rows to " << cfg.output_path << "\n";
    return 0;
}

int cmd_layout(std::size_t count, double extent, std::uint64_t seed,
               const std::optional<std::string>& out) {
    const std::string doc = cwcl::layout_json(count, extent, seed);
    if (out) {
        std::ofstream f(*out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file " + *out);
        f << doc;
    } else {
        std::cout << doc;
    }
    return 0;
}

int cmd_validate(const std::string& config_path) {
    cwcl::ExperimentConfig cfg = cwcl::load_config(config_path);
    cwcl::validate_config(cfg);
    std::cout << "config ok: " << cfg.base.radio_positions.size() << " radios, "
              << cwcl::enumerate_sweep(cfg).size() << " sweep points, mode "
              << cwcl::mode_name(cfg.mode) << "\n";

    // definiteness report for the quadratic-form denominator per sweep point
    bool all_pd = true;
    for (const cwcl::SweepPoint& pt : cwcl::enumerate_sweep(cfg)) {
        const cwcl::Scenario centered =
            cwcl::translated_to_origin(cwcl::scenario_for(cfg, pt));
        const cwcl::QuadFormSet qf =
            cwcl::build_quadforms(cwcl::power_vectors(centered), centered.radio_positions);
        const cwcl::PdReport rep = cwcl::check_positive_definite(qf);
        std::cout << "sweep " << pt.sweep_id << ": B_p min eigenvalue " << rep.min_eigenvalue
                  << " (trace " << rep.trace << ") -> "
                  << (rep.positive_definite ? "positive definite" : "NOT positive definite")
                  << "\n";
        all_pd = all_pd && rep.positive_definite;
    }
    if (!all_pd && cfg.mode != cwcl::RunMode::kMonteCarlo)
        std::cout << "warning: analytic mode will refuse sweep points whose B_p is not "
                     "certified positive definite\n";
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"cyclic weighted centroid localization experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> mode_override;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::size_t> trials_override;
    std::optional<std::string> out_override;

    CLI::App* run = app.add_subcommand("run", "run a sweep from a JSON config");
    run->add_option("--config", config_path, "config file path")->required();
    run->add_option("--mode", mode_override, "override mode: mc, analytic or both");
    run->add_option("--seed", seed_override, "override master seed");
    run->add_option("--trials", trials_override, "override trials per sweep point");
    run->add_option("--out", out_override, "override CSV output path");

    std::size_t layout_count = 25;
    double layout_extent = 50.0;
    std::uint64_t layout_seed = 1;
    std::optional<std::string> layout_out;
    CLI::App* layout = app.add_subcommand("layout", "emit a seeded radio placement as JSON");
    layout->add_option("--count", layout_count, "number of radios")->required();
    layout->add_option("--extent", layout_extent, "half-width of the square area in meters")
        ->required();
    layout->add_option("--seed", layout_seed, "placement seed")->required();
    layout->add_option("--out", layout_out, "output file (default: stdout)");

    std::string validate_config_path;
    CLI::App* validate = app.add_subcommand("validate", "check a config and report "
                                                        "denominator definiteness");
    validate->add_option("--config", validate_config_path, "config file path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, mode_override, seed_override, trials_override,
                           out_override);
        if (layout->parsed()) return cmd_layout(layout_count, layout_extent, layout_seed,
                                                layout_out);
        if (validate->parsed()) return cmd_validate(validate_config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int main(int argc, char** argv) { return cli_main(argc, argv); }
