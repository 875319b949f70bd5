// Acceptance suite runner: one pass/fail line per criterion, exit code 0 only
// when every criterion holds. FLUCTLAB_ACCEPT_QUICK=1 shrinks the grids for
// smoke runs.
#include <cstdlib>
#include <iostream>

#include "fluctlab/harness.hpp"

int main(int argc, char** argv) {
    fluctlab::SuiteOptions opts;
    opts.threads = fluctlab::default_threads();
    opts.cache_dir = fluctlab::default_cache_dir();
    const char* quick = std::getenv("FLUCTLAB_ACCEPT_QUICK");
    opts.quick = (quick && std::string(quick) == "1");
    std::string out_dir = "acceptance_out";
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--quick") opts.quick = true;
        if (a == "--out" && i + 1 < argc) out_dir = argv[++i];
    }
    auto res = fluctlab::run_suite(opts, out_dir, std::cout);
    int pass = 0;
    for (const auto& c : res.items) pass += c.pass ? 1 : 0;
    std::cout << "\n" << pass << "/" << res.items.size() << " criteria passed"
              << (opts.quick ? " (quick grids)" : "") << "\n";
    return res.all_pass ? 0 : 1;
}
