// cereval command-line runner.
//
//   cereval generate  scenario preset (or explicit parameters) -> pool file
//   cereval sweep     replicated evaluator sweep -> results table
//   cereval check     sample-bound and budget-identity sanity checks
//
// All randomness is seeded; the same invocation produces the same bytes.

#include <CLI11.hpp>

#include <fstream>
#include <map>

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cereval/harness.hpp"

namespace {

cereval::FileFormat format_from_path(const std::string& path, cereval::FileFormat fallback) {
    if (path.size() >= 6 && path.rfind(".jsonl") == path.size() - 6)
        return cereval::FileFormat::jsonl;
    if (path.size() >= 4 && path.rfind(".csv") == path.size() - 4) return cereval::FileFormat::csv;
    return fallback;
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

// Flat key=value config for the sweep subcommand. '#' starts a comment;
// '_' and '-' are interchangeable in keys; command-line flags win.
std::map<std::string, std::string> load_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                         ": expected key=value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        for (char& ch : key)
            if (ch == '_') ch = '-';
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

int run_generate(const std::string& scenario, int K, double lambda, double sigma2, int dim,
                 std::int64_t n, std::uint64_t seed, const std::string& out,
                 const std::string& format, bool k_set, bool lambda_set, bool sigma2_set,
                 bool dim_set, bool n_set) {
    cereval::ScenarioSpec spec =
        scenario.empty() ? cereval::ScenarioSpec{} : cereval::scenario_preset(scenario);
    if (k_set) spec.K = K;
    if (lambda_set) spec.lambda = lambda;
    if (sigma2_set) spec.sigma2 = sigma2;
    if (dim_set) spec.d = dim;
    if (n_set) spec.n = n;
    spec.seed = seed;

    cereval::TestPool pool = cereval::generate(spec);
    const cereval::FileFormat fmt = format.empty()
                                        ? format_from_path(out, cereval::FileFormat::jsonl)
                                        : cereval::parse_format(format);
    cereval::export_pool(pool, out, fmt);
    std::cout << "wrote " << pool.size() << " records to " << out << "\n";
    return 0;
}

int run_check(double delta, const std::string& eps_list) {
    using namespace cereval;
    int failures = 0;
    auto report = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "PASS " : "FAIL ") << what << "\n";
        if (!ok) ++failures;
    };

    for (double eps : parse_grid(eps_list)) {
        const std::int64_t bound = confseq::seq_sample_bound(eps, delta);
        const std::int64_t observed = seq_termination_index(eps, delta, bound + 1);
        std::ostringstream what;
        what << "seq-bound eps=" << eps << ": termination " << observed << " <= " << bound;
        report(bound_check(eps, delta, observed), what.str());
    }

    bool identity_ok = true;
    for (int l = 0; l <= 20; ++l) {
        const std::int64_t n = static_cast<std::int64_t>(1) << l;
        const double lhs = std::exp(-confseq::anytime_log_factor(n, delta));
        const double rhs = delta / 4.0 / (double(l + 1) * double(l + 1));
        if (std::abs(lhs - rhs) > 1e-12) identity_ok = false;
    }
    report(identity_ok, "doubling-epoch budget identity (l = 0..20)");

    bool premium_ok = true;
    for (std::int64_t n : {1, 10, 100, 5000, 100000})
        if (confseq::adaptive_hoeffding_radius(n, delta) <=
            confseq::static_hoeffding_radius(n, delta))
            premium_ok = false;
    report(premium_ok, "anytime radius dominates the fixed-time radius");

    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified sequential evaluation of bounded losses"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "produce a synthetic pool file");
    std::string g_scenario, g_out, g_format;
    int g_k = 1, g_dim = 10;
    double g_lambda = 5.0, g_sigma2 = 1.0;
    std::int64_t g_n = 5000;
    std::uint64_t g_seed = 0;
    gen->add_option("--scenario", g_scenario, "preset: s1, s2 or s3")
        ->check(CLI::IsMember({"s1", "s2", "s3"}));
    auto* opt_k = gen->add_option("--k", g_k, "number of groups");
    auto* opt_lambda = gen->add_option("--lambda", g_lambda, "cluster-center spacing");
    auto* opt_sigma2 = gen->add_option("--sigma2", g_sigma2, "feature variance");
    auto* opt_dim = gen->add_option("--dim", g_dim, "feature dimension");
    auto* opt_n = gen->add_option("--n", g_n, "pool size");
    gen->add_option("--seed", g_seed, "generator seed")->capture_default_str();
    gen->add_option("--out", g_out, "output pool file")->required();
    gen->add_option("--format", g_format, "jsonl or csv (default: by extension)")
        ->check(CLI::IsMember({"jsonl", "csv"}));

    // sweep
    auto* sweep = app.add_subcommand("sweep", "replicated evaluator sweep over an epsilon grid");
    std::string s_config;
    sweep->add_option("--config", s_config, "flat key=value config; flags override");
    std::string s_scenario, s_pool, s_pool_format, s_out, s_out_format, s_evaluators, s_grid,
        s_trace_dir;
    double s_delta = 0.05;
    int s_replications = 20, s_grid_points = 8, s_repartition = 1;
    std::int64_t s_warm = 30;
    std::uint64_t s_seed = 0;
    std::map<std::string, CLI::Option*> sweep_opts;
    sweep_opts["scenario"] = sweep->add_option("--scenario", s_scenario, "preset pool: s1, s2 or s3");
    sweep_opts["pool"] = sweep->add_option("--pool", s_pool, "pool file to evaluate");
    sweep_opts["pool-format"] = sweep->add_option("--pool-format", s_pool_format,
                                                  "pool file format")
                                    ->check(CLI::IsMember({"jsonl", "csv"}));
    sweep_opts["evaluators"] = sweep->add_option(
        "--evaluators", s_evaluators, "comma list of base,seq,cereval,oracle (default: all)");
    sweep_opts["eps-grid"] = sweep->add_option("--eps-grid", s_grid, "comma list of epsilon values");
    sweep_opts["grid-points"] =
        sweep->add_option("--grid-points", s_grid_points, "default grid size")
            ->capture_default_str();
    sweep_opts["delta"] = sweep->add_option("--delta", s_delta, "failure budget")
                              ->capture_default_str();
    sweep_opts["replications"] =
        sweep->add_option("--replications", s_replications, "replications per cell")
            ->capture_default_str();
    sweep_opts["seed"] = sweep->add_option("--seed", s_seed, "base seed")->capture_default_str();
    sweep_opts["warm-start"] =
        sweep->add_option("--warm-start", s_warm, "warm-up reveals")->capture_default_str();
    sweep_opts["repartition-every"] =
        sweep->add_option("--repartition-every", s_repartition, "re-partition cadence")
            ->capture_default_str();
    sweep_opts["trace-dir"] = sweep->add_option("--trace-dir", s_trace_dir,
                                                "write per-run traces here");
    sweep_opts["out"] = sweep->add_option("--out", s_out, "results file (default: stdout)");
    sweep_opts["out-format"] = sweep->add_option("--out-format", s_out_format, "csv or jsonl")
                                   ->check(CLI::IsMember({"jsonl", "csv"}));

    // check
    auto* check = app.add_subcommand("check", "theoretical sanity checks");
    double c_delta = 0.05;
    std::string c_eps = "0.03,0.05,0.08";
    check->add_option("--delta", c_delta, "failure budget")->capture_default_str();
    check->add_option("--eps", c_eps, "comma list of error levels")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return run_generate(g_scenario, g_k, g_lambda, g_sigma2, g_dim, g_n, g_seed, g_out,
                                g_format, opt_k->count() > 0, opt_lambda->count() > 0,
                                opt_sigma2->count() > 0, opt_dim->count() > 0, opt_n->count() > 0);
        }
        if (sweep->parsed()) {
            if (!s_config.empty()) {
                // config fills in whatever the command line left untouched
                for (const auto& [key, value] : load_flat_config(s_config)) {
                    auto it = sweep_opts.find(key);
                    if (it == sweep_opts.end())
                        throw std::runtime_error("config key '" + key + "' is not a sweep option");
                    if (it->second->count() == 0) it->second->add_result(value)->run_callback();
                }
            }
            cereval::SweepConfig cfg;
            cfg.scenario = s_scenario;
            cfg.pool_path = s_pool;
            cfg.pool_format = s_pool_format.empty()
                                  ? format_from_path(s_pool, cereval::FileFormat::jsonl)
                                  : cereval::parse_format(s_pool_format);
            if (!s_evaluators.empty()) {
                cfg.evaluators.clear();
                std::stringstream ss(s_evaluators);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) cfg.evaluators.push_back(cereval::evaluator_from_string(item));
            }
            if (!s_grid.empty()) cfg.epsilon_grid = parse_grid(s_grid);
            cfg.grid_points = s_grid_points;
            cfg.delta = s_delta;
            cfg.replications = s_replications;
            cfg.seed = s_seed;
            cfg.warm_start = s_warm;
            cfg.repartition_every = s_repartition;
            cfg.trace_dir = s_trace_dir;

            auto rows = cereval::run_sweep(cfg);
            if (s_out.empty()) {
                cereval::emit_results(rows, std::cout, cereval::FileFormat::csv);
            } else {
                const cereval::FileFormat fmt =
                    s_out_format.empty() ? format_from_path(s_out, cereval::FileFormat::csv)
                                         : cereval::parse_format(s_out_format);
                cereval::emit_results(rows, s_out, fmt);
                std::cout << "wrote " << rows.size() << " rows to " << s_out << "\n";
            }
            return 0;
        }
        if (check->parsed()) return run_check(c_delta, c_eps);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
