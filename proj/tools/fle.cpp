#include "fle/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    CLI::App app{"Weighted fractional Lane-Emden systems: admissibility, solves, sweeps, operator comparisons"};
    app.set_version_flag("--version", FLE_VERSION);

    std::string command, config;
    std::vector<std::string> sets;
    std::string out = "out";
    app.add_option("command", command, "check | region | solve | sweep | ops-compare | bootstrap | const")
        ->required()
        ->check(CLI::IsMember(fle::cli::command_names()));
    app.add_option("--config", config, "JSON configuration file (defaults are used for missing keys)");
    app.add_option("--set", sets, "override one key, e.g. --set problem.p=2.5 (repeatable)")->take_all();
    app.add_option("--out", out, "output directory (created if missing)");
    app.footer("Exit codes: 0 ok, 1 semantic failure, 2 parse error, 3 not converged, 4 positivity violation.\n"
               "FLE_THREADS caps the number of worker threads (default 1).");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Error& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : fle::cli::Parse;
    }
    return fle::cli::run(command, config, sets, out);
}
