#pragma once

// The three evaluation state machines. Base reveals everything and reports a
// fixed-time Hoeffding interval. Seq reveals one point at a time under the
// anytime Hoeffding radius. The partition-based evaluator re-partitions the
// pool each iteration, tracks per-group statistics, and spends reveals on the
// group whose interval shrinks fastest per point.
//
// Reveal order is the pool's record order; the harness shuffles once per
// replication, which makes both the sequential stream and the within-group
// draws uniform over seeds.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cereval/confseq.hpp"
#include "cereval/dataset.hpp"
#include "cereval/partition.hpp"

namespace cereval {

enum class GoalKind { fixed_epsilon, threshold };

// Either "estimate the mean within epsilon" or "decide whether the mean
// exceeds C"; exactly one payload is meaningful.
struct EvalGoal {
    GoalKind kind = GoalKind::fixed_epsilon;
    double epsilon = 0.0;
    double threshold_C = 0.0;

    static EvalGoal fixed(double epsilon) {
        if (!(epsilon >= 0.0)) throw std::invalid_argument("goal: epsilon must be >= 0");
        EvalGoal g;
        g.kind = GoalKind::fixed_epsilon;
        g.epsilon = epsilon;
        return g;
    }

    static EvalGoal threshold(double C) {
        if (!(C > 0.0 && C < 1.0)) throw std::invalid_argument("goal: threshold must be in (0,1)");
        EvalGoal g;
        g.kind = GoalKind::threshold;
        g.threshold_C = C;
        return g;
    }
};

struct GroupStats {
    int k = 0;
    std::int64_t n_k = 0;  // revealed in group
    std::int64_t N_k = 0;  // group size in pool
    double mean = 0.5;
    double variance = 0.0;  // biased (divide by n_k) empirical variance
    double eta = 0.0;
    double eps = 1.0;
};

enum class Termination { goal_met, pool_exhausted, threshold_decided };
enum class Decision { above, below };

struct TraceEntry {
    std::int64_t iter = 0;
    std::int64_t evaluated = 0;  // N, reveals so far
    double r_hat = 0.0;
    double eps_hat = 0.0;
    int K = 1;
    std::vector<std::int64_t> group_sizes;  // N_k per group
    int selected_group = 0;                 // 0 on the terminal entry
    double objective = 0.0;                 // partition audit value (partition runs)
};

struct EvalReport {
    double estimate = 0.0;
    double radius = 0.0;
    std::int64_t evaluated = 0;
    Termination termination = Termination::pool_exhausted;
    std::optional<Decision> decision;
    std::vector<TraceEntry> trace;
};

// Per-group statistics under the current partition; empty groups carry the
// vacuous radius 1 around mean 1/2 so their CI claim is always true.
inline std::vector<GroupStats> compute_group_stats(const TestPool& pool,
                                                   const std::vector<int>& labels, int K,
                                                   double delta) {
    std::vector<GroupSummary> sums = summarize_groups(pool, labels, K);
    std::vector<GroupStats> out(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        GroupStats& s = out[i];
        s.k = static_cast<int>(i) + 1;
        s.n_k = sums[i].revealed;
        s.N_k = sums[i].total;
        s.mean = sums[i].mean();
        s.variance = sums[i].variance();
        if (s.n_k > 0) {
            s.eta = confseq::group_eta(s.n_k, K, delta);
            s.eps = confseq::group_ci_radius(s.variance, s.eta);
        } else {
            s.eta = 0.0;
            s.eps = 1.0;
        }
    }
    return out;
}

// One-step drop of the group radius per extra sample, at frozen empirical
// variance, weighted by the group's pool share. This is the sampling score:
// larger means the aggregate interval shrinks faster by sampling here.
inline double marginal_uncertainty_score(const GroupStats& stats, int K, double delta,
                                         std::int64_t pool_n) {
    if (stats.n_k < 1) throw std::domain_error("marginal_uncertainty_score: needs n_k >= 1");
    const double eps_next =
        confseq::group_ci_radius(stats.variance, confseq::group_eta(stats.n_k + 1, K, delta));
    return (stats.eps - eps_next) * static_cast<double>(stats.N_k) /
           static_cast<double>(pool_n);
}

namespace eval_detail {

inline void aggregate(const std::vector<GroupStats>& stats, std::int64_t pool_n, double& r_hat,
                      double& eps_hat) {
    double r = 0.0, e = 0.0;
    for (const GroupStats& s : stats) {
        r += static_cast<double>(s.N_k) * s.mean;
        e += static_cast<double>(s.N_k) * s.eps;
    }
    r_hat = r / static_cast<double>(pool_n);
    eps_hat = e / static_cast<double>(pool_n);
}

// goal checks shared by the sequential and partition evaluators; returns true
// when the run should stop
inline bool goal_reached(const EvalGoal& goal, double r_hat, double eps_hat,
                         Termination& termination, std::optional<Decision>& decision) {
    if (goal.kind == GoalKind::fixed_epsilon) {
        if (eps_hat <= goal.epsilon) {
            termination = Termination::goal_met;
            return true;
        }
        return false;
    }
    if (r_hat - eps_hat > goal.threshold_C) {
        termination = Termination::threshold_decided;
        decision = Decision::above;
        return true;
    }
    if (r_hat + eps_hat < goal.threshold_C) {
        termination = Termination::threshold_decided;
        decision = Decision::below;
        return true;
    }
    return false;
}

}  // namespace eval_detail

// Static evaluation: reveal every record, report the full mean with the
// fixed-time Hoeffding radius.
inline EvalReport run_base(TestPool& pool, double delta) {
    const auto n = static_cast<std::int64_t>(pool.size());
    if (n == 0) throw std::invalid_argument("run_base: pool is empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) sum += pool.reveal(i).loss;

    EvalReport rep;
    rep.estimate = sum / static_cast<double>(n);
    rep.radius = confseq::static_hoeffding_radius(n, delta);
    rep.evaluated = n;
    rep.termination = Termination::pool_exhausted;
    rep.trace.push_back({1, n, rep.estimate, rep.radius, 1, {n}, 0, rep.radius});
    return rep;
}

// Vanilla sequential evaluation: reveal the next record in pool order, stop
// once the anytime Hoeffding radius meets the goal or the pool runs dry.
inline EvalReport run_seq(TestPool& pool, const EvalGoal& goal, double delta) {
    const auto n = static_cast<std::int64_t>(pool.size());
    if (n == 0) throw std::invalid_argument("run_seq: pool is empty");

    EvalReport rep;
    double sum = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        sum += pool.reveal(static_cast<std::size_t>(i)).loss;
        const std::int64_t m = i + 1;
        const double r_hat = sum / static_cast<double>(m);
        const double eps = confseq::adaptive_hoeffding_radius(m, delta);
        rep.trace.push_back({m, m, r_hat, eps, 1, {n}, 1, eps});
        rep.estimate = r_hat;
        rep.radius = eps;
        rep.evaluated = m;
        if (eval_detail::goal_reached(goal, r_hat, eps, rep.termination, rep.decision)) {
            rep.trace.back().selected_group = 0;
            return rep;
        }
    }
    rep.termination = Termination::pool_exhausted;
    rep.trace.back().selected_group = 0;
    return rep;
}

struct CerEvalConfig {
    double delta = 0.05;
    std::int64_t warm_start = 30;
    int repartition_every = 1;  // re-partition cadence in iterations
};

struct CerEvalRun {
    EvalReport report;
    PartitionResult final_partition;
};

// Partition-based evaluation. Warm-up reveals the first m records; each
// iteration re-partitions, refreshes group statistics, aggregates the
// estimate and CI, then reveals one point from the group with the highest
// marginal-uncertainty score. Groups nobody has measured yet outrank every
// measured group.
inline CerEvalRun run_cereval_detailed(TestPool& pool, const EvalGoal& goal,
                                       const CerEvalConfig& cfg, PartitionStrategy& strategy) {
    const auto n = static_cast<std::int64_t>(pool.size());
    if (n == 0) throw std::invalid_argument("run_cereval: pool is empty");
    if (cfg.warm_start < 2 || cfg.warm_start > n)
        throw std::invalid_argument("run_cereval: warm start must lie in [2, n]");
    if (cfg.repartition_every < 1)
        throw std::invalid_argument("run_cereval: repartition cadence must be >= 1");

    std::vector<RevealedPoint> revealed;
    revealed.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < cfg.warm_start; ++i) {
        RevealReceipt rc = pool.reveal(static_cast<std::size_t>(i));
        revealed.push_back({static_cast<std::size_t>(i), rc.sequence_index, rc.loss});
    }

    CerEvalRun run;
    EvalReport& rep = run.report;
    PartitionResult& part = run.final_partition;

    for (std::int64_t iter = 1;; ++iter) {
        if (iter == 1 || (iter - 1) % cfg.repartition_every == 0)
            part = strategy.partition(pool, revealed);

        const std::vector<GroupStats> stats =
            compute_group_stats(pool, part.labels, part.K, cfg.delta);
        double r_hat = 0.0, eps_hat = 0.0;
        eval_detail::aggregate(stats, n, r_hat, eps_hat);

        TraceEntry entry;
        entry.iter = iter;
        entry.evaluated = pool.reveal_count();
        entry.r_hat = r_hat;
        entry.eps_hat = eps_hat;
        entry.K = part.K;
        for (const GroupStats& s : stats) entry.group_sizes.push_back(s.N_k);
        entry.objective = part.objective;
        rep.trace.push_back(std::move(entry));

        rep.estimate = r_hat;
        rep.radius = eps_hat;
        rep.evaluated = pool.reveal_count();
        if (eval_detail::goal_reached(goal, r_hat, eps_hat, rep.termination, rep.decision)) break;
        if (pool.reveal_count() == n) {
            rep.termination = Termination::pool_exhausted;
            break;
        }

        // target the group that sheds the most aggregate radius per reveal;
        // unmeasured groups first, ties to the larger group then lower index
        int best_k = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        std::int64_t best_N = -1;
        for (const GroupStats& s : stats) {
            if (s.n_k >= s.N_k) continue;  // exhausted group, nothing to sample
            const double score = s.n_k == 0
                                     ? std::numeric_limits<double>::infinity()
                                     : marginal_uncertainty_score(s, part.K, cfg.delta, n);
            if (score > best_score || (score == best_score && (s.N_k > best_N))) {
                best_score = score;
                best_k = s.k;
                best_N = s.N_k;
            }
        }
        rep.trace.back().selected_group = best_k;

        const std::size_t pick = unrevealed_in_group(pool, part.labels, best_k).draw();
        RevealReceipt rc = pool.reveal(pick);
        revealed.push_back({pick, rc.sequence_index, rc.loss});
    }
    return run;
}

inline EvalReport run_cereval(TestPool& pool, const EvalGoal& goal, const CerEvalConfig& cfg,
                              PartitionStrategy& strategy) {
    return run_cereval_detailed(pool, goal, cfg, strategy).report;
}

}  // namespace cereval
