#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fris/fris.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_runtime = 3;

struct global_options {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool quiet = false;
};

void report_warnings(const std::vector<std::string>& warnings, bool quiet) {
    if (quiet)
        return;
    for (const std::string& warning : warnings)
        std::cerr << "warning: " << warning << '\n';
}

// validate_now is off for sweep, whose base config may be incomplete until
// the varied key is substituted; each sweep point validates separately.
fris::experiment_config load_config(const std::optional<std::string>& config_path,
                                    const std::vector<std::string>& overrides,
                                    const global_options& global, bool validate_now = true) {
    fris::experiment_config config;
    if (config_path)
        config = fris::parse_config_file(*config_path);
    for (const std::string& entry : overrides) {
        const auto equals = entry.find('=');
        if (equals == std::string::npos)
            throw fris::config_error("--set expects key=value, got '" + entry + "'");
        fris::apply_setting(config, entry.substr(0, equals), entry.substr(equals + 1));
    }
    if (global.seed)
        config.master_seed = *global.seed;
    if (global.out)
        config.out_path = *global.out;
    if (validate_now)
        config.validate();
    return config;
}

int run_command(const fris::experiment_config& config, const global_options& global) {
    std::vector<std::string> warnings;
    const std::vector<fris::result_record> records = fris::run_experiment(config, &warnings);
    report_warnings(warnings, global.quiet);
    fris::write_csv(records, config.out_path);
    if (!global.quiet) {
        std::cout << fris::summarize(records);
        std::cout << "wrote " << records.size() << " records to " << config.out_path << '\n';
    }
    return exit_ok;
}

int oracle_command(const fris::experiment_config& config, const global_options& global,
                   std::uint64_t budget) {
    std::vector<std::string> warnings;
    const fris::surface_grid grid = fris::derive_grid(config, &warnings);
    report_warnings(warnings, global.quiet);

    const fris::correlation_model corr = fris::build_correlation(grid);
    const fris::link_params br{fris::db_to_linear(config.rho_db), config.alpha, config.d_br_m};
    const fris::link_params ru{fris::db_to_linear(config.rho_db), config.alpha, config.d_ru_m};
    const fris::radio_params radio{fris::dbm_to_watt(config.power_dbm),
                                   fris::dbm_to_watt(config.noise_dbm)};

    const std::uint64_t trial_seed = fris::derive_seed(config.master_seed, 0);
    fris::rng_stream channel_rng(fris::derive_seed(trial_seed, 0));
    const fris::channel_realization ch =
        fris::draw_realization(channel_rng, corr, br, ru, config.correlate_both);

    const fris::oracle_result result =
        fris::exhaustive_search(ch, radio, config.m_hat, config.bits, budget);

    std::ostringstream selected;
    for (int i = 0; i < grid.element_count(); ++i)
        if (result.best_xi[i])
            selected << (selected.tellp() > 0 ? " " : "") << i;
    std::cout << "optimum rate " << result.best_rate << " bps/Hz over "
              << result.evaluations << " candidates\n"
              << "selected elements: " << selected.str() << '\n';
    return exit_ok;
}

int sweep_command(fris::experiment_config config, const global_options& global,
                  const std::string& vary) {
    const auto equals = vary.find('=');
    if (equals == std::string::npos)
        throw fris::config_error("--vary expects key=v1,v2,..., got '" + vary + "'");
    const std::string key = vary.substr(0, equals);
    std::vector<std::string> values;
    std::stringstream stream(vary.substr(equals + 1));
    std::string token;
    while (std::getline(stream, token, ','))
        if (!token.empty())
            values.push_back(token);
    if (values.empty())
        throw fris::config_error("--vary " + key + ": no values given");

    std::vector<fris::result_record> all;
    std::vector<std::string> warnings;
    for (const std::string& value : values) {
        fris::experiment_config point = config;
        fris::apply_setting(point, key, value);
        // square surface: sweeping one grid axis moves both
        if (key == "my")
            point.mz = point.my;
        else if (key == "mz")
            point.my = point.mz;
        point.validate();
        const std::vector<fris::result_record> records =
            fris::run_experiment(point, &warnings);
        all.insert(all.end(), records.begin(), records.end());
        if (!global.quiet)
            std::cerr << "sweep " << key << "=" << value << ": " << records.size()
                      << " records\n";
    }
    report_warnings(warnings, global.quiet);
    fris::write_csv(all, config.out_path);
    if (!global.quiet) {
        std::cout << fris::summarize(all);
        std::cout << "wrote " << all.size() << " records to " << config.out_path << '\n';
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fluid reconfigurable surface link simulator"};
    app.require_subcommand(1);

    global_options global;
    std::uint64_t seed_value = 0;
    std::string out_value;
    auto* seed_opt = app.add_option("--seed", seed_value, "override master_seed");
    auto* out_opt = app.add_option("--out", out_value, "override out_path");
    app.add_flag("--quiet", global.quiet, "suppress progress and summary output");

    std::optional<std::string> config_path;
    std::vector<std::string> overrides;
    bool timing = false;

    auto* run = app.add_subcommand("run", "run the configured experiment");
    run->add_option("--config", config_path, "config file (key = value lines)");
    run->add_option("--set", overrides, "override a config key, e.g. --set bits=3");
    run->add_flag("--timing", timing,
                  "record wall-clock per record (makes the CSV non-reproducible)");

    std::uint64_t budget = 1'000'000;
    auto* oracle = app.add_subcommand("oracle", "exhaustive check of one instance");
    oracle->add_option("--config", config_path, "config file (key = value lines)");
    oracle->add_option("--set", overrides, "override a config key");
    oracle->add_option("--budget", budget, "maximum candidates to enumerate");

    std::string vary;
    auto* sweep = app.add_subcommand("sweep", "vary one key over a comma list");
    sweep->add_option("--config", config_path, "config file (key = value lines)");
    sweep->add_option("--set", overrides, "override a config key");
    sweep->add_option("--vary", vary, "key=v1,v2,... to sweep")->required();
    sweep->add_flag("--timing", timing,
                    "record wall-clock per record (makes the CSV non-reproducible)");

    CLI11_PARSE(app, argc, argv);

    if (seed_opt->count() > 0)
        global.seed = seed_value;
    if (out_opt->count() > 0)
        global.out = out_value;

    try {
        const bool is_sweep = app.got_subcommand(sweep);
        fris::experiment_config config =
            load_config(config_path, overrides, global, !is_sweep);
        config.measure_time = timing;
        if (app.got_subcommand(run))
            return run_command(config, global);
        if (app.got_subcommand(oracle))
            return oracle_command(config, global, budget);
        return sweep_command(config, global, vary);
    } catch (const fris::config_error& error) {
        std::cerr << "config error: " << error.what() << '\n';
        return exit_config;
    } catch (const fris::budget_error& error) {
        std::cerr << "error: " << error.what() << '\n';
        return exit_runtime;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return exit_runtime;
    }
}
