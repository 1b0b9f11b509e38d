#pragma once

// Experiment harness: replicated saving-ratio sweeps over an epsilon grid,
// empirical failure probability against the pool's full-dataset mean, the
// theoretical sample-bound sanity check, and plot-ready CSV/JSONL tables.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cereval/evaluators.hpp"
#include "cereval/synthetic.hpp"

namespace cereval {

enum class EvaluatorKind { base, seq, cereval, oracle };

inline const char* to_string(EvaluatorKind e) {
    switch (e) {
        case EvaluatorKind::base: return "base";
        case EvaluatorKind::seq: return "seq";
        case EvaluatorKind::cereval: return "cereval";
        case EvaluatorKind::oracle: return "oracle";
    }
    return "?";
}

inline EvaluatorKind evaluator_from_string(const std::string& s) {
    if (s == "base") return EvaluatorKind::base;
    if (s == "seq") return EvaluatorKind::seq;
    if (s == "cereval") return EvaluatorKind::cereval;
    if (s == "oracle") return EvaluatorKind::oracle;
    throw std::invalid_argument("unknown evaluator: " + s);
}

struct SweepConfig {
    // pool source: scenario preset name, or a file path with format
    std::string scenario;  // "s1" | "s2" | "s3", empty when pool_path is set
    std::string pool_path;
    FileFormat pool_format = FileFormat::jsonl;

    std::vector<EvaluatorKind> evaluators = {EvaluatorKind::base, EvaluatorKind::seq,
                                             EvaluatorKind::cereval, EvaluatorKind::oracle};
    std::vector<double> epsilon_grid;  // empty -> default grid from (n, delta)
    int grid_points = 8;
    double delta = 0.05;
    int replications = 20;
    std::uint64_t seed = 0;
    std::int64_t warm_start = 30;
    int repartition_every = 1;
    std::string trace_dir;  // when set, per-run traces land here as JSONL
};

struct SweepRow {
    EvaluatorKind evaluator = EvaluatorKind::base;
    double epsilon = 0.0;
    double mean_N = 0.0;
    double saving_ratio = 0.0;  // 1 - mean_N / n
    double rho = 0.0;           // mean_N / n
    double failure_rate = 0.0;  // replications with any non-covering trace CI
};

// [eps_star, 0.1] log-spaced; eps_star is the full-pass error level and is
// always the exact first grid point.
inline std::vector<double> default_epsilon_grid(std::int64_t n, double delta, int points = 8) {
    if (points < 2) throw std::invalid_argument("epsilon grid needs at least 2 points");
    const double eps_star = confseq::static_hoeffding_radius(n, delta);
    const double hi = 0.1;
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        grid[static_cast<std::size_t>(i)] = std::exp((1.0 - t) * std::log(eps_star) + t * std::log(hi));
    }
    grid.front() = eps_star;
    grid.back() = hi;
    return grid;
}

// Theoretical sanity: the observed sequential termination index must stay
// below the sufficient sample bound.
inline bool bound_check(double epsilon, double delta, std::int64_t observed_N) {
    return observed_N <= confseq::seq_sample_bound(epsilon, delta);
}

// Deterministic Seq stopping index for a fixed-epsilon goal: first n with
// the anytime radius at or below epsilon, or cap if never.
inline std::int64_t seq_termination_index(double epsilon, double delta, std::int64_t cap) {
    for (std::int64_t m = 1; m <= cap; ++m)
        if (confseq::adaptive_hoeffding_radius(m, delta) <= epsilon) return m;
    return cap;
}

namespace harness_detail {

inline void write_trace(const EvalReport& rep, const std::string& path) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open trace file " + path);
    for (const TraceEntry& t : rep.trace) {
        nlohmann::ordered_json j;
        j["iter"] = t.iter;
        j["N"] = t.evaluated;
        j["R_hat"] = t.r_hat;
        j["eps_hat"] = t.eps_hat;
        j["K"] = t.K;
        j["group_sizes"] = t.group_sizes;
        j["selected_group"] = t.selected_group;
        j["objective"] = t.objective;
        out << j.dump() << '\n';
    }
}

inline bool trace_covers(const EvalReport& rep, double pool_mean) {
    for (const TraceEntry& t : rep.trace)
        if (std::abs(t.r_hat - pool_mean) > t.eps_hat) return false;
    return true;
}

}  // namespace harness_detail

// Sweep over (evaluator, epsilon, replication) on a fixed pool: each
// replication reshuffles with its own derived seed, every evaluator at every
// grid point runs on a fresh copy of that shuffle, and coverage is judged
// against the pool's full-dataset mean over the whole trace.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const TestPool& pool) {
    if (pool.size() == 0) throw std::invalid_argument("run_sweep: pool is empty");
    if (cfg.replications < 1) throw std::invalid_argument("run_sweep: need replications >= 1");
    const auto n = static_cast<std::int64_t>(pool.size());
    const double pool_mean = pool.full_dataset_mean();

    std::vector<double> grid = cfg.epsilon_grid.empty()
                                   ? default_epsilon_grid(n, cfg.delta, cfg.grid_points)
                                   : cfg.epsilon_grid;
    std::sort(grid.begin(), grid.end());
    for (double e : grid)
        if (!(e > 0.0)) throw std::invalid_argument("run_sweep: epsilon grid must be positive");

    const bool needs_oracle =
        std::count(cfg.evaluators.begin(), cfg.evaluators.end(), EvaluatorKind::oracle) > 0;
    if (needs_oracle) {
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (!pool.true_group(i))
                throw std::invalid_argument("run_sweep: oracle evaluator needs true groups");
    }

    struct Cell {
        std::int64_t total_N = 0;
        int failures = 0;
    };
    std::map<std::pair<int, double>, Cell> cells;

    for (int rep = 0; rep < cfg.replications; ++rep) {
        const TestPool shuffled = pool.shuffled(mix_seed(cfg.seed, 0x5b5e, rep));
        for (EvaluatorKind ev : cfg.evaluators) {
            for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                const double eps = grid[gi];
                TestPool run_pool = shuffled.fresh_copy();
                EvalReport report;
                switch (ev) {
                    case EvaluatorKind::base:
                        report = run_base(run_pool, cfg.delta);
                        break;
                    case EvaluatorKind::seq:
                        report = run_seq(run_pool, EvalGoal::fixed(eps), cfg.delta);
                        break;
                    case EvaluatorKind::cereval: {
                        OneNnStrategy strat(cfg.delta,
                                            mix_seed(cfg.seed, 0xce7e + gi, rep));
                        CerEvalConfig c{cfg.delta, cfg.warm_start, cfg.repartition_every};
                        report = run_cereval(run_pool, EvalGoal::fixed(eps), c, strat);
                        break;
                    }
                    case EvaluatorKind::oracle: {
                        OracleStrategy strat(cfg.delta);
                        CerEvalConfig c{cfg.delta, cfg.warm_start, cfg.repartition_every};
                        report = run_cereval(run_pool, EvalGoal::fixed(eps), c, strat);
                        break;
                    }
                }
                Cell& cell = cells[{static_cast<int>(ev), eps}];
                cell.total_N += report.evaluated;
                if (!harness_detail::trace_covers(report, pool_mean)) cell.failures++;

                if (!cfg.trace_dir.empty()) {
                    std::ostringstream name;
                    name << cfg.trace_dir << "/trace_" << to_string(ev) << "_eps" << gi << "_rep"
                         << rep << ".jsonl";
                    harness_detail::write_trace(report, name.str());
                }
            }
        }
    }

    std::vector<SweepRow> rows;
    for (EvaluatorKind ev :
         {EvaluatorKind::base, EvaluatorKind::seq, EvaluatorKind::cereval, EvaluatorKind::oracle}) {
        if (std::count(cfg.evaluators.begin(), cfg.evaluators.end(), ev) == 0) continue;
        for (double eps : grid) {
            const Cell& cell = cells.at({static_cast<int>(ev), eps});
            SweepRow row;
            row.evaluator = ev;
            row.epsilon = eps;
            row.mean_N = static_cast<double>(cell.total_N) / cfg.replications;
            row.rho = row.mean_N / static_cast<double>(n);
            row.saving_ratio = 1.0 - row.rho;
            row.failure_rate = static_cast<double>(cell.failures) / cfg.replications;
            rows.push_back(row);
        }
    }
    return rows;
}

// Pool resolution from the config: scenario preset or file.
inline TestPool resolve_pool(const SweepConfig& cfg) {
    if (!cfg.scenario.empty()) {
        ScenarioSpec spec = scenario_preset(cfg.scenario);
        spec.seed = cfg.seed;
        return generate(spec);
    }
    if (!cfg.pool_path.empty()) return load_pool(cfg.pool_path, cfg.pool_format);
    throw std::invalid_argument("run_sweep: config names neither a scenario nor a pool file");
}

inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    const TestPool pool = resolve_pool(cfg);
    return run_sweep(cfg, pool);
}

inline void emit_results(const std::vector<SweepRow>& rows, std::ostream& out, FileFormat format) {
    if (format == FileFormat::csv) {
        out << "evaluator,epsilon,mean_N,saving_ratio,rho,failure_rate\n";
        for (const SweepRow& r : rows) {
            out << to_string(r.evaluator) << ',' << io_detail::format_double(r.epsilon) << ','
                << io_detail::format_double(r.mean_N) << ','
                << io_detail::format_double(r.saving_ratio) << ','
                << io_detail::format_double(r.rho) << ','
                << io_detail::format_double(r.failure_rate) << '\n';
        }
    } else {
        for (const SweepRow& r : rows) {
            nlohmann::ordered_json j;
            j["evaluator"] = to_string(r.evaluator);
            j["epsilon"] = r.epsilon;
            j["mean_N"] = r.mean_N;
            j["saving_ratio"] = r.saving_ratio;
            j["rho"] = r.rho;
            j["failure_rate"] = r.failure_rate;
            out << j.dump() << '\n';
        }
    }
}

inline void emit_results(const std::vector<SweepRow>& rows, const std::string& path,
                         FileFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write results file " + path);
    emit_results(rows, out, format);
}

inline std::vector<SweepRow> read_results(std::istream& in, FileFormat format) {
    std::vector<SweepRow> rows;
    std::string line;
    if (format == FileFormat::csv) {
        if (!std::getline(in, line)) throw std::runtime_error("results: missing CSV header");
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto cells = io_detail::split_csv(line);
            if (cells.size() != 6)
                throw std::runtime_error("results line " + std::to_string(line_no) +
                                         ": expected 6 columns");
            SweepRow r;
            r.evaluator = evaluator_from_string(std::string(cells[0]));
            r.epsilon = io_detail::parse_double(cells[1], line_no, "epsilon");
            r.mean_N = io_detail::parse_double(cells[2], line_no, "mean_N");
            r.saving_ratio = io_detail::parse_double(cells[3], line_no, "saving_ratio");
            r.rho = io_detail::parse_double(cells[4], line_no, "rho");
            r.failure_rate = io_detail::parse_double(cells[5], line_no, "failure_rate");
            rows.push_back(r);
        }
    } else {
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line);
            SweepRow r;
            r.evaluator = evaluator_from_string(j.at("evaluator").get<std::string>());
            r.epsilon = j.at("epsilon").get<double>();
            r.mean_N = j.at("mean_N").get<double>();
            r.saving_ratio = j.at("saving_ratio").get<double>();
            r.rho = j.at("rho").get<double>();
            r.failure_rate = j.at("failure_rate").get<double>();
            rows.push_back(r);
        }
    }
    return rows;
}

inline std::vector<SweepRow> read_results(const std::string& path, FileFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results file " + path);
    return read_results(in, format);
}

}  // namespace cereval
