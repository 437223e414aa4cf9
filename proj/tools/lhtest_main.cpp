#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "lht/cli.hpp"
#include "lht/io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    long long seed_override = -1;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_dir, "output directory (default: current)");
    cmd->add_option("--seed", opts.seed_override, "override the config seed");
    cmd->add_option("--threads", opts.threads, "OpenMP thread count (0 = default)");
}

nlohmann::json load_config(const CommonOpts& opts) {
    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(lht::io::read_text_file(opts.config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    if (opts.seed_override >= 0) cfg["seed"] = opts.seed_override;
#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif
    return cfg;
}

void write_outputs(const CommonOpts& opts, const std::string& json_name,
                   const lht::cli::CommandOutput& out) {
    std::filesystem::create_directories(opts.out_dir);
    const auto dir = std::filesystem::path(opts.out_dir);
    lht::io::write_text_file((dir / json_name).string(), out.report.dump(2) + "\n");
    for (const auto& [name, content] : out.csv_files)
        lht::io::write_text_file((dir / name).string(), content);
    std::cout << "wrote " << (dir / json_name).string();
    for (const auto& [name, content] : out.csv_files) std::cout << ", " << (dir / name).string();
    std::cout << "\n";
}

void print_oracle_table(const nlohmann::json& report) {
    std::printf("%-6s %-10s %22s %22s %12s  %s\n", "c", "quantity", "closed_form", "oracle",
                "abs_diff", "pass");
    for (const auto& row : report["rows"]) {
        std::printf("%-6.3f %-10s %22.15g %22.15g %12.3e  %s\n", row["c"].get<double>(),
                    row["quantity"].get<std::string>().c_str(),
                    row["closed_form"].get<double>(), row["oracle"].get<double>(),
                    row["abs_diff"].get<double>(), row["pass"].get<bool>() ? "yes" : "NO");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"corrected linear-hypothesis tests for the identity-covariance hypothesis"};
    app.require_subcommand(1);

    CommonOpts calibrate_opts, test_opts, simulate_opts, power_opts, oracle_opts;
    auto* c_calibrate =
        app.add_subcommand("calibrate", "emit centering/scale constants for a configuration");
    add_common(c_calibrate, calibrate_opts);
    auto* c_test = app.add_subcommand("test", "run the four tests on a data matrix");
    add_common(c_test, test_opts);
    auto* c_simulate = app.add_subcommand("simulate", "Monte Carlo study of the calibrations");
    add_common(c_simulate, simulate_opts);
    auto* c_power = app.add_subcommand("power", "power curves over a spike grid");
    add_common(c_power, power_opts);
    auto* c_oracle =
        app.add_subcommand("oracle-check", "closed forms vs independent quadrature oracles");
    add_common(c_oracle, oracle_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_calibrate->parsed()) {
            const auto out = lht::cli::run_calibrate(load_config(calibrate_opts));
            write_outputs(calibrate_opts, "calibration.json", out);
        } else if (c_test->parsed()) {
            const auto out = lht::cli::run_test(load_config(test_opts));
            write_outputs(test_opts, "test_report.json", out);
        } else if (c_simulate->parsed()) {
            const auto out = lht::cli::run_simulate(load_config(simulate_opts));
            write_outputs(simulate_opts, "summary.json", out);
        } else if (c_power->parsed()) {
            const auto out = lht::cli::run_power(load_config(power_opts));
            write_outputs(power_opts, "power.json", out);
        } else if (c_oracle->parsed()) {
            const auto out = lht::cli::run_oracle_check(load_config(oracle_opts));
            write_outputs(oracle_opts, "oracle_report.json", out);
            print_oracle_table(out.report);
            if (!out.ok) {
                std::cerr << "oracle-check: at least one quantity exceeded tolerance\n";
                return 3;
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "computation failed: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
