#include <CLI11.hpp>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stoplaw/cli.hpp"

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* threads = std::getenv("STOPLAW_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
    CLI::App app{"law-invariant optimal stopping via randomized threshold rules"};
    app.require_subcommand(1);

    stoplaw::CliOptions opt;
    std::string grid_arg;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON run configuration")->required();
        sub->add_option("--out", opt.out_dir, "output directory (default: .)");
        sub->add_option("--seed", opt.seed, "RNG seed override");
        sub->add_option("--paths", opt.paths, "path count override");
        sub->add_flag_callback("--exact-sampling",
                               [&] { opt.exact_sampling = true; },
                               "sample exit laws directly instead of simulating paths");
        sub->add_option("--grid", grid_arg, "threshold grid size, e.g. 200x200");
    };
    for (const char* name : {"embed", "simulate", "optimize-rdu", "optimize-csc", "compare",
                             "scale-info"}) {
        add_common(app.add_subcommand(name));
    }

    CLI11_PARSE(app, argc, argv);
    opt.command = app.get_subcommands().front()->get_name();
    if (!grid_arg.empty()) {
        const auto sep = grid_arg.find('x');
        if (sep == std::string::npos) {
            std::fprintf(stderr, "--grid expects <n_a>x<n_b>\n");
            return 2;
        }
        opt.grid = {std::atoi(grid_arg.substr(0, sep).c_str()),
                    std::atoi(grid_arg.substr(sep + 1).c_str())};
    }
    return stoplaw::run_command(opt);
}
