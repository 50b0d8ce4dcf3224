// anharm: command line front end.
//
//   anharm <sweep-g2|spectrum|two-photon-map|levels|validate>
//          [--config FILE] [--out DIR] [--threads N] [--seedless]
//
// Exit codes: 0 success, 1 config error, 2 numerical failure, 3 validation failure.

#include "commands.hpp"

#include "anharm/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace anharm::cli;
    CLI::App app{"Thermal ultra-anharmonic resonator: steady states, photon statistics, filtered spectra"};
    app.require_subcommand(1);

    std::string config_path;
    CommandOptions opt;
    std::string out_dir = ".";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "YAML run configuration (defaults apply when omitted)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", opt.threads, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
        sub->add_flag("--seedless", opt.seedless, "assert that no random numbers are used (none are)");
    };
    struct Entry {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&, const CommandOptions&);
    };
    const Entry entries[] = {
        {"sweep-g2", "g2(0) over a (U, T) grid", run_sweep_g2},
        {"spectrum", "one-photon sensor spectrum and peak table", run_spectrum},
        {"two-photon-map", "frequency-resolved g2(w1; w2) map", run_two_photon_map},
        {"levels", "energy levels versus U", run_levels},
        {"validate", "oracle cross-checks with a pass/fail report", run_validate},
    };
    std::vector<CLI::App*> subs;
    for (const auto& e : entries) {
        subs.push_back(app.add_subcommand(e.name, e.help));
        add_common(subs.back());
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    opt.out = out_dir;

    try {
        const RunConfig cfg = config_path.empty() ? parse_config("", "<defaults>") : load_config(config_path);
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (subs[i]->parsed()) return entries[i].run(cfg, opt);
        }
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
