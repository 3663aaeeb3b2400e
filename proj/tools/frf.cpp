// frf.cpp: command-line front end: filtered g2 traces and sweeps, spectra,
// filter transmission, component fractions and the acceptance self-test.
//
// Exit codes: 0 success, 1 configuration error, 2 computation failure
// (per-point errors are recorded in the output), 3 self-test failure.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "frf/acceptance.hpp"
#include "frf/cli/commands.hpp"
#include "frf/cli/config.hpp"
#include "frf/cli/output.hpp"
#include "frf/cli/pool.hpp"

namespace {

enum Exit { ok = 0, config_error = 1, computation_error = 2, selftest_failed = 3 };

struct Flags {
    std::string config_path;
    std::string output_path = "-";
    std::map<std::string, std::string> values; // config key -> flag text
    std::map<std::string, CLI::Option*> options;
    CLI::Option* irf_on = nullptr;
    CLI::Option* irf_off = nullptr;
};

void add_run_options(CLI::App* cmd, Flags& f) {
    cmd->add_option("-c,--config", f.config_path, "config file (key = value, or a previous CSV/JSON output)");
    cmd->add_option("-o,--output", f.output_path, "output file, '-' for stdout");
    for (const auto& k : frf::cli::config_keys) {
        const std::string key(k.key);
        if (key == "irf.enabled") continue;
        f.options[key] = cmd->add_option(std::string(k.flag), f.values[key], std::string(k.help));
    }
    f.irf_on = cmd->add_flag("--irf", "convolve g2 with the detector IRF");
    f.irf_off = cmd->add_flag("--no-irf", "disable the detector IRF")->excludes(f.irf_on);
}

frf::cli::RunConfig resolve(const Flags& f) {
    if (f.options.at("filter.width_over_gamma")->count() > 0 && f.options.at("filter.preset")->count() > 0)
        throw frf::cli::ConfigError("--width and --preset are mutually exclusive");
    frf::cli::ConfigEntries entries;
    if (!f.config_path.empty()) entries = frf::cli::load_config_file(f.config_path);
    for (const auto& [key, opt] : f.options)
        if (opt->count() > 0) {
            // A width flag replaces a preset from the file and vice versa.
            if (key == "filter.width_over_gamma") entries.erase("filter.preset");
            if (key == "filter.preset") entries.erase("filter.width_over_gamma");
            entries[key] = {f.values.at(key), opt->get_name()};
        }
    if (f.irf_on->count() > 0) entries["irf.enabled"] = {"true", "--irf"};
    if (f.irf_off->count() > 0) entries["irf.enabled"] = {"false", "--no-irf"};
    if (entries.count("filter.preset") && entries.count("filter.width_over_gamma") &&
        !entries["filter.preset"].value.empty())
        throw frf::cli::ConfigError(entries["filter.preset"].origin +
                                    ": set either filter.preset or filter.width_over_gamma, not both (width also set at " +
                                    entries["filter.width_over_gamma"].origin + ")");
    return frf::cli::resolve_config(entries);
}

int emit(const frf::cli::ResultTable& t, const frf::cli::RunConfig& c, const std::string& path) {
    auto write = [&](std::ostream& os) {
        if (c.format == frf::cli::OutputFormat::json)
            frf::cli::write_json(os, t);
        else
            frf::cli::write_csv(os, t);
    };
    if (path == "-") {
        write(std::cout);
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            std::cerr << "frf: cannot open output file '" << path << "'\n";
            return config_error;
        }
        write(out);
    }
    if (t.has_failures()) {
        std::size_t n = 0;
        for (const auto& s : t.status) n += s != "ok";
        std::cerr << "frf: " << n << " of " << t.status.size() << " points failed; see the status column\n";
        return computation_error;
    }
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-filtered photon statistics of a resonantly driven two-level emitter"};
    app.require_subcommand(1);
    app.footer("Environment: FRF_WORKERS sets the number of worker threads for sweeps.");

    const char* names[][2] = {{"g2-trace", "filtered g2(tau) at one parameter point"},
                              {"g2-sweep", "filtered g2(0) against filter width or Rabi frequency"},
                              {"spectrum", "emission spectrum and its component decomposition"},
                              {"transmission", "coherent and incoherent filter transmission against filter width"},
                              {"fractions", "fraction of the filtered spectrum from each component"}};
    std::map<std::string, Flags> flags;
    std::map<std::string, CLI::App*> commands;
    for (const auto& [name, help] : names) {
        commands[name] = app.add_subcommand(name, help);
        add_run_options(commands[name], flags[name]);
    }
    int criterion = 0;
    CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance criteria and report pass/fail");
    selftest->add_option("--criterion", criterion, "run a single criterion (1-12)")->check(CLI::Range(1, 12));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    if (selftest->parsed()) {
        bool all = true;
        const auto run = [&](int id) {
            const auto r = frf::acceptance::run_criterion(id);
            std::cout << frf::acceptance::format_line(r) << std::endl;
            all = all && r.passed;
        };
        if (criterion > 0)
            run(criterion);
        else
            for (int id = 1; id <= frf::acceptance::criterion_count; ++id) run(id);
        return all ? ok : selftest_failed;
    }

    for (const auto& [name, cmd] : commands) {
        if (!cmd->parsed()) continue;
        const Flags& f = flags[name];
        try {
            const frf::cli::RunConfig cfg = resolve(f);
            frf::cli::ResultTable t;
            if (name == "g2-trace")
                t = frf::cli::run_g2_trace(cfg);
            else if (name == "g2-sweep")
                t = frf::cli::run_g2_sweep(cfg, frf::cli::worker_count());
            else if (name == "spectrum")
                t = frf::cli::run_spectrum(cfg);
            else if (name == "transmission")
                t = frf::cli::run_transmission(cfg);
            else
                t = frf::cli::run_fractions(cfg, frf::cli::worker_count());
            return emit(t, cfg, f.output_path);
        } catch (const frf::cli::ConfigError& e) {
            std::cerr << "frf: config error: " << e.what() << "\n";
            return config_error;
        } catch (const frf::InvalidArgument& e) {
            std::cerr << "frf: invalid parameters: " << e.what() << "\n";
            return config_error;
        } catch (const std::exception& e) {
            std::cerr << "frf: computation failed: " << e.what() << "\n";
            return computation_error;
        }
    }
    return config_error;
}
