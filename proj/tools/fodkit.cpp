// fodkit command-line front end.
//
//   fodkit run --config data/reference_scenario.cfg --output out/
//   fodkit spectra --orders 0.2,0.5,0.8,1 --output out/
//
// Exit codes: 0 ok, 2 parse/usage, 3 precision unreachable, 4 gain unreachable, 5 internal.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fodkit/commands.hpp"
#include "fodkit/config.hpp"

namespace {

constexpr const char* kConfigKeys[] = {"nu",    "target_std", "target_gain", "distance",
                                       "segment", "attenuation", "h0",        "schedule",
                                       "shrink", "slack",      "max_iters",   "degree_cap",
                                       "input", "output"};

struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
    cmd->add_option("-c,--config", flags.config_path, "key=value configuration file");
    for (const char* key : kConfigKeys)
        cmd->add_option("--" + std::string(key), flags.values[key], std::string("override '") + key + "'");
}

fodkit::RunConfig resolve(const CLI::App* cmd, const ConfigFlags& flags) {
    fodkit::RunConfig cfg;
    if (!flags.config_path.empty())
        cfg = fodkit::parse_config(flags.config_path);
    fodkit::RunConfig overrides;
    for (const char* key : kConfigKeys)
        if (cmd->count("--" + std::string(key)) > 0)
            fodkit::set_config_value(overrides, key, flags.values.at(key));
    cfg.merge(overrides);
    return cfg;
}

int finish(const fodkit::cli::CommandResult& result, const fodkit::RunConfig& cfg) {
    const std::string out = cfg.output.value_or("fodkit_out");
    const int code = fodkit::cli::write_result(result, out);
    if (!result.message.empty())
        std::cerr << "fodkit: " << result.message << "\n";
    if (code == fodkit::cli::exit_ok)
        std::cout << "wrote " << out << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional-order differintegral conditioning of multi-sensor data"};
    app.require_subcommand(1);

    ConfigFlags flags;
    auto* stats = app.add_subcommand("stats", "per-sensor statistics");
    auto* fit = app.add_subcommand("fit", "degree selection and model fit");
    auto* calibrate = app.add_subcommand("calibrate", "search the step h for a precision target");
    auto* plan = app.add_subcommand("plan", "number of passes for a gain target");
    auto* run = app.add_subcommand("run", "full pipeline");
    auto* spectra = app.add_subcommand("spectra", "operator amplitude/phase curves");
    for (auto* cmd : {stats, fit, calibrate, plan, run})
        add_config_flags(cmd, flags);

    std::optional<double> k;
    plan->add_option("--k", k, "per-pass amplification (skips the dataset)");

    fodkit::cli::SpectraOptions spectra_opt;
    std::string orders;
    std::string spectra_out = "fodkit_out";
    spectra->add_option("--orders", orders, "comma-separated orders");
    spectra->add_option("--omega-max", spectra_opt.omega_max, "upper frequency");
    spectra->add_option("--points", spectra_opt.points, "frequency samples");
    spectra->add_option("--output", spectra_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fodkit::cli::exit_parse;
    }

    try {
        if (spectra->parsed()) {
            if (!orders.empty())
                spectra_opt.orders = fodkit::parse_number_list(orders);
            fodkit::RunConfig cfg;
            cfg.output = spectra_out;
            return finish(fodkit::cli::cmd_spectra(spectra_opt), cfg);
        }
        for (auto* cmd : {stats, fit, calibrate, plan, run}) {
            if (!cmd->parsed())
                continue;
            const fodkit::RunConfig cfg = resolve(cmd, flags);
            if (cmd == stats) return finish(fodkit::cli::cmd_stats(cfg), cfg);
            if (cmd == fit) return finish(fodkit::cli::cmd_fit(cfg), cfg);
            if (cmd == calibrate) return finish(fodkit::cli::cmd_calibrate(cfg), cfg);
            if (cmd == plan) return finish(fodkit::cli::cmd_plan(cfg, k), cfg);
            return finish(fodkit::cli::cmd_run(cfg), cfg);
        }
    } catch (const fodkit::Error& e) {
        std::cerr << "fodkit: " << e.what() << "\n";
        return fodkit::cli::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "fodkit: " << e.what() << "\n";
        return fodkit::cli::exit_internal;
    }
    return fodkit::cli::exit_internal;
}
