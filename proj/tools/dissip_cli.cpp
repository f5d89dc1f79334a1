#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "dissip/dissip.h"

namespace {

bool slurp(const std::string& path, std::string& out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return false;
    std::ostringstream s;
    s << f.rdbuf();
    out = s.str();
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenvalue experiments for dissipative radial Schroedinger operators"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir, tol_path;
    int refine = -1;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides output_dir)");
    app.add_option("--refine", refine, "confirmation refinement level")->check(CLI::Range(0, 2));
    app.add_option("--seed-tolerances", tol_path, "JSON object of default tolerances")->check(CLI::ExistingFile);
    const std::pair<const char*, const char*> subs[] = {
        {"spectrum", "dense spectrum and confirmed eigenvalues in one sector"},
        {"critical", "critical coupling of the configured well"},
        {"resonance", "zero-energy threshold state and its coupling constants"},
        {"trajectory", "emergent eigenvalue against its leading-order prediction"},
        {"census", "eigenvalue counting laws over the scenarios"},
        {"verify-kernels", "low-energy expansion checks against the Green-function oracle"}};
    for (auto [name, help] : subs) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    std::string config, tolerances;
    if (!config_path.empty() && !slurp(config_path, config)) {
        std::cerr << "error: cannot read " << config_path << "\n";
        return 2;
    }
    if (!tol_path.empty() && !slurp(tol_path, tolerances)) {
        std::cerr << "error: cannot read " << tol_path << "\n";
        return 2;
    }

    dissip_context* ctx = dissip_context_create();
    if (!ctx) return 1;
    int code = 0;
    if (!tolerances.empty() && dissip_set_tolerances(ctx, tolerances.c_str()) != DISSIP_OK) {
        std::cerr << "config error in " << tol_path << " at " << dissip_last_error_pointer(ctx) << ": "
                  << dissip_last_error(ctx) << "\n";
        code = 2;
    } else {
        dissip_status st =
            dissip_run(ctx, sub.c_str(), config.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), refine);
        std::cout << dissip_run_log(ctx);
        if (st == DISSIP_CONFIG_ERROR) {
            std::cerr << "config error at " << (*dissip_last_error_pointer(ctx) ? dissip_last_error_pointer(ctx) : "/")
                      << ": " << dissip_last_error(ctx) << "\n";
            code = 2;
        } else if (st != DISSIP_OK) {
            if (*dissip_last_error(ctx)) std::cerr << "error: " << dissip_last_error(ctx) << "\n";
            code = 1;
        }
    }
    dissip_context_destroy(ctx);
    return code;
}
