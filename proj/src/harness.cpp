#include "fluctlab/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "fluctlab/asymptotics.hpp"
#include "fluctlab/exit.hpp"
#include "fluctlab/green.hpp"
#include "fluctlab/util.hpp"

namespace fluctlab {

using nlohmann::json;

std::vector<std::int64_t> parse_grid(const std::string& spec) {
    std::vector<std::int64_t> out;
    if (spec.find(':') == std::string::npos) {
        std::istringstream is(spec);
        std::string item;
        while (std::getline(is, item, ',')) out.push_back(static_cast<std::int64_t>(std::stod(item)));
        if (out.empty()) throw error("parse_grid: empty grid '" + spec + "'");
        return out;
    }
    std::vector<std::string> parts;
    std::istringstream is(spec);
    std::string item;
    while (std::getline(is, item, ':')) parts.push_back(item);
    if (parts.size() < 3) throw error("parse_grid: expected lo:hi:kind[:n], got '" + spec + "'");
    double lo = std::stod(parts[0]), hi = std::stod(parts[1]);
    if (parts[2] == "geometric") {
        int per_decade = parts.size() > 3 ? std::stoi(parts[3]) : 6;
        double f = std::pow(10.0, 1.0 / per_decade);
        std::int64_t prev = -1;
        for (double x = lo; x <= hi * (1.0 + 1e-12); x *= f) {
            auto xi = static_cast<std::int64_t>(std::llround(x));
            if (xi != prev) out.push_back(xi);
            prev = xi;
        }
        if (out.empty() || out.back() != static_cast<std::int64_t>(std::llround(hi)))
            out.push_back(static_cast<std::int64_t>(std::llround(hi)));
    } else if (parts[2] == "linear") {
        int n = parts.size() > 3 ? std::stoi(parts[3]) : 10;
        for (int i = 0; i < n; ++i)
            out.push_back(static_cast<std::int64_t>(std::llround(lo + (hi - lo) * i / (n - 1))));
    } else {
        throw error("parse_grid: unknown kind '" + parts[2] + "'");
    }
    return out;
}

std::optional<std::string> Cache::get(const std::string& key) const {
    if (!enabled()) return std::nullopt;
    auto path = std::filesystem::path(dir_) / (std::to_string(fnv1a64(key)) + ".json");
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        auto j = json::parse(ss.str());
        if (j.value("cache_key", "") != key) return std::nullopt;  // hash collision guard
        return j["payload"].dump();
    } catch (...) {
        return std::nullopt;
    }
}

void Cache::put(const std::string& key, const std::string& json_text) const {
    if (!enabled()) return;
    std::filesystem::create_directories(dir_);
    json j;
    j["cache_key"] = key;
    j["payload"] = json::parse(json_text);
    auto path = std::filesystem::path(dir_) / (std::to_string(fnv1a64(key)) + ".json");
    std::ofstream out(path);
    out << j.dump();
}

std::string default_cache_dir() {
    const char* v = std::getenv("FLUCTLAB_CACHE");
    return v ? std::string(v) : std::string();
}

int default_threads() {
    const char* v = std::getenv("FLUCTLAB_THREADS");
    return v ? std::max(1, std::atoi(v)) : 1;
}

namespace {

json vec_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

std::vector<double> vec_from(const json& a) {
    std::vector<double> v;
    v.reserve(a.size());
    for (const auto& x : a) v.push_back(x.get<double>());
    return v;
}

json ladder_json(const LadderData& ld) {
    json j;
    j["schema"] = "fluctlab-ladder-1";
    j["method"] = ld.method;
    j["v0"] = ld.v0;
    j["mass_defect"] = ld.z_defect;  // ascending-side defect, headline number
    j["z_defect"] = ld.z_defect;
    j["zhat_defect"] = ld.zhat_defect;
    j["bias_scale"] = ld.bias_scale;
    j["defective"] = ld.defective;
    j["z_pmf"] = vec_json(ld.z_pmf);
    j["zhat_pmf"] = vec_json(ld.zhat_pmf);
    j["u_a"] = vec_json(ld.u_a);
    j["U_a"] = vec_json(ld.U_a);
    j["v_d"] = vec_json(ld.v_d);
    j["V_d"] = vec_json(ld.V_d);
    return j;
}

LadderData ladder_from_json(const json& j) {
    LadderData ld;
    ld.method = j["method"].get<std::string>();
    ld.v0 = j["v0"].get<double>();
    ld.z_defect = j["z_defect"].get<double>();
    ld.zhat_defect = j["zhat_defect"].get<double>();
    ld.bias_scale = j["bias_scale"].get<double>();
    ld.defective = j["defective"].get<bool>();
    ld.z_pmf = vec_from(j["z_pmf"]);
    ld.zhat_pmf = vec_from(j["zhat_pmf"]);
    ld.u_a = vec_from(j["u_a"]);
    ld.U_a = vec_from(j["U_a"]);
    ld.v_d = vec_from(j["v_d"]);
    ld.V_d = vec_from(j["V_d"]);
    return ld;
}

}  // namespace

LadderData compute_ladder_cached(const StepDistribution& d, const LadderOptions& opts,
                                 const Cache& cache) {
    std::string key = "ladder|" + d.spec_string() + "|n=" + std::to_string(opts.n) +
                      "|lg=" + std::to_string(opts.grid_log2) +
                      "|rich=" + std::to_string(opts.richardson) +
                      "|eng=" + std::to_string(opts.engine);
    if (auto hit = cache.get(key)) return ladder_from_json(json::parse(*hit));
    LadderData ld = compute_ladder(d, opts);
    if (cache.enabled()) cache.put(key, ladder_json(ld).dump());
    return ld;
}

std::vector<double> exit_up_cached(const StepDistribution& d, std::int64_t R, const Cache& cache,
                                   std::int64_t dense_limit) {
    std::string key = "pup|" + d.spec_string() + "|R=" + std::to_string(R);
    if (auto hit = cache.get(key)) return vec_from(json::parse(*hit));
    IntervalGreen ig(d, R, dense_limit);
    auto v = ig.exit_up();
    if (cache.enabled()) cache.put(key, vec_json(v).dump());
    return v;
}

void write_report_csv(const ConvergenceReport& rep, const std::string& path) {
    std::ostringstream os;
    os << "x,exact,predicted,ratio,bound\n";
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        os << fmt_g17(rep.grid[i]) << ',' << fmt_g17(rep.exact[i]) << ','
           << fmt_g17(rep.predicted[i]) << ',' << fmt_g17(rep.ratio[i]) << ','
           << fmt_g17(i < rep.bound.size() ? rep.bound[i] : 0.0) << '\n';
    }
    write_text_file(path, os.str());
}

std::string report_summary_json(const ConvergenceReport& rep) {
    json j;
    j["schema"] = "fluctlab-report-1";
    j["formula"] = rep.formula_id;
    j["verdict"] = rep.verdict;
    j["trend_stat"] = rep.trend_stat;
    j["applicable"] = rep.applicable;
    j["note"] = rep.note;
    j["points"] = rep.grid.size();
    if (!rep.ratio.empty()) j["last_ratio"] = rep.ratio.back();
    return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw error("cannot write " + path);
    out << text;
}

// ---------------------------------------------------------------------------
// CLI command bodies

namespace {

// --dist accepts an inline spec or a path to a config file
std::string resolve_dist_spec(const std::string& s) {
    std::string name = (!s.empty() && s[0] == '@') ? s.substr(1) : s;
    if (std::filesystem::exists(name)) {
        std::ifstream in(name);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return s;
}

}  // namespace

int run_ladder_cmd(const CommonArgs& c, std::int64_t N, double tol, int grid_log2,
                   std::ostream& log) {
    auto d = parse_dist_spec(resolve_dist_spec(c.dist_spec));
    Cache cache(c.cache_dir);
    LadderOptions o;
    o.n = N;
    o.tol = tol;
    o.grid_log2 = grid_log2;
    auto ld = compute_ladder_cached(d, o, cache);
    json j = ladder_json(ld);
    j["dist"] = d.spec_string();
    write_text_file(c.out, j.dump());
    log << "ladder: method=" << ld.method << " v0=" << fmt_g17(ld.v0)
        << " mass_defect=" << fmt_g17(ld.z_defect) << " -> " << c.out << "\n";
    return 0;
}

int run_green_cmd(const CommonArgs& c, const std::string& mode, std::int64_t R,
                  std::int64_t window, std::ostream& log) {
    auto d = parse_dist_spec(resolve_dist_spec(c.dist_spec));
    Cache cache(c.cache_dir);
    json j;
    j["schema"] = "fluctlab-green-1";
    j["dist"] = d.spec_string();
    j["mode"] = mode;
    if (mode == "interval") {
        IntervalGreen ig(d, R);
        const auto& t = ig.full_table();
        json rows = json::array();
        for (const auto& r : t) rows.push_back(vec_json(r));
        j["R"] = R;
        j["values"] = rows;
        j["residual"] = ig.full_table_residual();
        j["method"] = "linear-solve";
    } else if (mode == "halfline") {
        auto br = green_halfline_solve(d, window, std::min<std::int64_t>(window / 8, 128));
        json lo = json::array(), hi = json::array();
        for (const auto& r : br.lower) lo.push_back(vec_json(r));
        for (const auto& r : br.upper) hi.push_back(vec_json(r));
        j["window"] = br.window;
        j["lower"] = lo;
        j["upper"] = hi;
        j["max_width"] = br.max_width;
        j["method"] = "bracket";
    } else if (mode == "potential") {
        LatticeKernels ker(d);
        json xs = json::array(), vals = json::array(), bounds = json::array();
        for (std::int64_t x = -R; x <= R; x += std::max<std::int64_t>(R / 64, 1)) {
            auto v = ker.potential(x);
            xs.push_back(x);
            vals.push_back(v.value);
            bounds.push_back(v.bound);
        }
        j["x"] = xs;
        j["a"] = vals;
        j["bound"] = bounds;
        j["method"] = "quadrature";
    } else {
        log << "unknown green mode '" << mode << "'\n";
        return 1;
    }
    write_text_file(c.out, j.dump());
    log << "green: mode=" << mode << " -> " << c.out << "\n";
    return 0;
}

int run_exit_cmd(const CommonArgs& c, std::int64_t R, std::int64_t x,
                 const std::vector<std::string>& what, std::int64_t mc_paths, std::ostream& log) {
    auto d = parse_dist_spec(resolve_dist_spec(c.dist_spec));
    Cache cache(c.cache_dir);
    json j;
    j["schema"] = "fluctlab-exit-1";
    j["dist"] = d.spec_string();
    j["R"] = R;
    j["x"] = x;
    j["provenance"]["cache"] = cache.enabled();
    IntervalGreen ig(d, R);
    for (const auto& w : what) {
        if (w == "p_up") {
            j["p_up"]["value"] = ig.exit_up()[static_cast<std::size_t>(x)];
            j["p_up"]["method"] = "linear-solve";
            j["p_up"]["residual"] = ig.max_residual();
            if (mc_paths > 0) {
                auto est = mc_exit(d, R, x, mc_paths, c.seed, McWhat::p_up, 0,
                                   {.threads = c.threads});
                j["p_up"]["mc"] = {{"estimate", est.estimate},
                                   {"std_error", est.std_error},
                                   {"n_paths", est.n_paths},
                                   {"seed", est.seed},
                                   {"cap_hits", est.cap_hits}};
            }
        } else if (w == "overshoot") {
            auto law = overshoot_law(d, ig, x);
            j["overshoot"]["pmf"] = vec_json(law.pmf);
            j["overshoot"]["tail_bound"] = law.tail_bound;
        } else if (w == "exit_pos") {
            j["exit_pos"]["pmf"] = vec_json(exit_position(d, ig, x));
        } else if (w == "p_hit") {
            LadderOptions o;
            o.n = std::max<std::int64_t>(2 * R, 4096);
            o.grid_log2 = 20;
            auto ld = compute_ladder_cached(d, o, cache);
            j["p_hit"]["value"] = hit_before(ld, x, R);
            j["p_hit"]["method"] = "spitzer";
            if (mc_paths > 0) {
                auto est = mc_exit(d, R, x, mc_paths, c.seed, McWhat::p_hit, 0,
                                   {.threads = c.threads});
                j["p_hit"]["mc"] = {{"estimate", est.estimate},
                                    {"std_error", est.std_error},
                                    {"n_paths", est.n_paths},
                                    {"seed", est.seed},
                                    {"cap_hits", est.cap_hits}};
            }
        } else {
            log << "unknown exit quantity '" << w << "'\n";
            return 1;
        }
    }
    write_text_file(c.out, j.dump());
    log << "exit: R=" << R << " x=" << x << " -> " << c.out << "\n";
    return 0;
}

int run_verify_cmd(const CommonArgs& c, const std::string& formula, const std::string& grid_spec,
                   std::int64_t N, int grid_log2, std::ostream& log) {
    auto d = parse_dist_spec(resolve_dist_spec(c.dist_spec));
    Cache cache(c.cache_dir);
    auto grid = parse_grid(grid_spec);
    std::int64_t top = *std::max_element(grid.begin(), grid.end());
    LadderOptions o;
    o.n = std::max<std::int64_t>(N, 2 * top + 2);
    o.grid_log2 = grid_log2;
    FormulaInputs in;
    LadderData ld;
    LatticeKernels ker(d);
    in.d = &d;
    in.ker = &ker;
    bool catalogued = false;
    for (const auto& f : formula_catalogue()) catalogued |= (f == formula);
    if (!catalogued) {
        log << "config error: unknown formula id '" << formula << "'\n";
        return 1;
    }
    ld = compute_ladder_cached(d, o, cache);
    in.ld = &ld;
    in.exact_pup_0 = [&](std::int64_t R) { return exit_up_cached(d, R, cache)[0]; };
    in.exact_pup_x = [&](std::int64_t x, std::int64_t R) {
        return exit_up_cached(d, R, cache)[static_cast<std::size_t>(x)];
    };
    ConvergenceReport rep;
    try {
        rep = evaluate_formula(formula, in, grid);
    } catch (const applicability_error& e) {
        rep.formula_id = formula;
        rep.applicable = false;
        rep.note = e.what();
        rep.verdict = "inapplicable";
    }
    write_report_csv(rep, c.out);
    std::string summary_path = c.out;
    auto dot = summary_path.rfind('.');
    summary_path = (dot == std::string::npos ? summary_path : summary_path.substr(0, dot)) +
                   ".summary.json";
    write_text_file(summary_path, report_summary_json(rep));
    log << "verify " << formula << ": verdict=" << rep.verdict << " -> " << c.out << "\n";
    return 0;
}

int run_mc_cmd(const CommonArgs& c, std::int64_t R, std::int64_t x, const std::string& estimand,
               std::int64_t y, std::int64_t n_paths, std::ostream& log) {
    auto d = parse_dist_spec(resolve_dist_spec(c.dist_spec));
    McWhat what;
    if (estimand == "p_up")
        what = McWhat::p_up;
    else if (estimand == "p_hit")
        what = McWhat::p_hit;
    else if (estimand == "overshoot_cdf")
        what = McWhat::overshoot_cdf;
    else if (estimand == "exit_pos_low")
        what = McWhat::exit_pos_low;
    else {
        log << "unknown estimand '" << estimand << "'\n";
        return 1;
    }
    auto est = mc_exit(d, R, x, n_paths, c.seed, what, y, {.threads = c.threads});
    json j;
    j["schema"] = "fluctlab-mc-1";
    j["dist"] = d.spec_string();
    j["estimand"] = estimand;
    j["R"] = R;
    j["x"] = x;
    j["y"] = y;
    j["estimate"] = est.estimate;
    j["std_error"] = est.std_error;
    j["n_paths"] = est.n_paths;
    j["n_conditioning"] = est.n_conditioning;
    j["seed"] = est.seed;
    j["layout"] = est.layout;
    j["cap_hits"] = est.cap_hits;
    write_text_file(c.out, j.dump());
    log << "mc " << estimand << ": " << fmt_g17(est.estimate) << " +- " << fmt_g17(est.std_error)
        << " -> " << c.out << "\n";
    return 0;
}

}  // namespace fluctlab
