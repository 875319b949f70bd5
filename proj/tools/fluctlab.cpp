// fluctlab: exact fluctuation-theory quantities for integer-lattice random
// walks, with trend verification of their asymptotic laws.
#include <iostream>

#include "CLI11.hpp"

#include "fluctlab/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fluctlab: lattice random-walk fluctuation laboratory"};
    app.require_subcommand(1);

    fluctlab::CommonArgs c;
    c.threads = fluctlab::default_threads();
    c.cache_dir = fluctlab::default_cache_dir();

    std::int64_t N = 100000, R = 1000, window = 2048, x = 0, y = 0, mc_paths = 1000000;
    double tol = 1e-10;
    int grid_log2 = 22;
    std::string mode = "interval", formula = "T2-1", grid = "1e2:1e4:geometric";
    std::string what_csv = "p_up";
    std::string estimand = "p_up";
    bool quick = false;
    std::string suite_out = "acceptance_out";

    auto add_common = [&](CLI::App* sc, bool needs_dist = true) {
        if (needs_dist)
            sc->add_option("--dist", c.dist_spec, "distribution spec (inline or @file)")
                ->required();
        sc->add_option("--out", c.out, "output path")->required();
        sc->add_option("--seed", c.seed, "rng seed");
        sc->add_option("--threads", c.threads, "worker threads");
        sc->add_option("--cache", c.cache_dir, "cache directory (default $FLUCTLAB_CACHE)");
    };

    auto* ladder = app.add_subcommand("ladder", "ladder-height laws and renewal arrays");
    add_common(ladder);
    ladder->add_option("--N", N, "window size");
    ladder->add_option("--tol", tol, "truncation budget");
    ladder->add_option("--grid-log2", grid_log2, "spectral transform size (log2)");

    auto* green = app.add_subcommand("green", "killed Green functions and kernels");
    add_common(green);
    green->add_option("--mode", mode, "interval | halfline | potential");
    green->add_option("--R", R, "interval right endpoint / potential range");
    green->add_option("--window", window, "half-line truncation window");

    auto* exitc = app.add_subcommand("exit", "two-sided exit laws");
    add_common(exitc);
    exitc->add_option("--R", R, "interval right endpoint")->required();
    exitc->add_option("--x", x, "starting point");
    exitc->add_option("--what", what_csv, "comma list: p_up,p_hit,overshoot,exit_pos");
    exitc->add_option("--mc-paths", mc_paths, "MC cross-check paths (0 = off)");

    auto* verify = app.add_subcommand("verify", "asymptotic formula trend reports");
    add_common(verify);
    verify->add_option("--formula", formula, "formula id (see catalogue)")->required();
    verify->add_option("--grid", grid, "lo:hi:geometric[:per-decade] or comma list");
    verify->add_option("--N", N, "ladder window");
    verify->add_option("--grid-log2", grid_log2, "spectral transform size (log2)");

    auto* mc = app.add_subcommand("mc", "Monte Carlo estimates");
    add_common(mc);
    mc->add_option("--R", R, "interval right endpoint")->required();
    mc->add_option("--x", x, "starting point");
    mc->add_option("--estimand", estimand, "p_up | p_hit | overshoot_cdf | exit_pos_low");
    mc->add_option("--y", y, "event threshold for cdf estimands");
    mc->add_option("--mc-paths", mc_paths, "path count");

    auto* suite = app.add_subcommand("suite", "acceptance suite");
    suite->add_option("--out", suite_out, "output directory");
    suite->add_flag("--quick", quick, "reduced grids");
    suite->add_option("--threads", c.threads, "worker threads");
    suite->add_option("--seed", c.seed, "rng seed");
    suite->add_option("--mc-paths", mc_paths, "paths per MC check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(ladder))
            return fluctlab::run_ladder_cmd(c, N, tol, grid_log2, std::cout);
        if (app.got_subcommand(green)) return fluctlab::run_green_cmd(c, mode, R, window, std::cout);
        if (app.got_subcommand(exitc)) {
            std::vector<std::string> what;
            std::string cur;
            for (char ch : what_csv + ",") {
                if (ch == ',') {
                    if (!cur.empty()) what.push_back(cur);
                    cur.clear();
                } else {
                    cur.push_back(ch);
                }
            }
            return fluctlab::run_exit_cmd(c, R, x, what, mc_paths, std::cout);
        }
        if (app.got_subcommand(verify))
            return fluctlab::run_verify_cmd(c, formula, grid, N, grid_log2, std::cout);
        if (app.got_subcommand(mc))
            return fluctlab::run_mc_cmd(c, R, x, estimand, y, mc_paths, std::cout);
        if (app.got_subcommand(suite)) {
            fluctlab::SuiteOptions so;
            so.quick = quick;
            so.threads = c.threads;
            so.seed = c.seed;
            so.mc_paths = mc_paths;
            so.cache_dir = c.cache_dir;
            auto res = fluctlab::run_suite(so, suite_out, std::cout);
            return res.all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
