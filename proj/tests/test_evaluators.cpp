#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cereval/evaluators.hpp"
#include "cereval/synthetic.hpp"

using namespace cereval;

namespace {

TestPool constant_pool(std::size_t n, double loss) {
    Rng rng(1234);
    std::vector<LossRecord> recs;
    for (std::size_t i = 0; i < n; ++i)
        recs.push_back({"k" + std::to_string(i), {rng.normal(), rng.normal()}, loss, 1});
    return TestPool(std::move(recs));
}

}  // namespace

TEST_CASE("base reveals everything and reports the fixed-time radius") {
    ScenarioSpec spec = scenario_preset("s1");
    spec.seed = 4;
    TestPool pool = generate(spec);
    EvalReport rep = run_base(pool, 0.05);
    CHECK(rep.evaluated == 5000);
    CHECK(rep.termination == Termination::pool_exhausted);
    CHECK(rep.radius == Catch::Approx(0.017308183826022853).epsilon(1e-12));
    CHECK(rep.estimate == Catch::Approx(pool.full_dataset_mean()).epsilon(1e-12));

    TestPool zeros = constant_pool(64, 0.0);
    CHECK(run_base(zeros, 0.05).estimate == 0.0);

    std::vector<LossRecord> alt;
    for (int i = 0; i < 100; ++i)
        alt.push_back({"a" + std::to_string(i), {double(i)}, i % 2 ? 1.0 : 0.0, std::nullopt});
    TestPool alternating(std::move(alt));
    CHECK(run_base(alternating, 0.05).estimate == Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("seq stops immediately when the first radius already satisfies the goal") {
    TestPool pool = constant_pool(50, 0.3);
    const double eps1 = confseq::adaptive_hoeffding_radius(1, 0.05);
    EvalReport rep = run_seq(pool, EvalGoal::fixed(eps1), 0.05);
    CHECK(rep.evaluated == 1);
    CHECK(rep.termination == Termination::goal_met);
}

TEST_CASE("seq termination index is deterministic in (epsilon, delta)") {
    // frozen from a high-precision scan of the anytime Hoeffding radius:
    // first n with eps_n <= 0.05 at delta = 0.05 is 3799
    ScenarioSpec spec = scenario_preset("s1");
    spec.n = 4200;
    spec.seed = 8;
    TestPool pool = generate(spec);
    EvalReport rep = run_seq(pool, EvalGoal::fixed(0.05), 0.05);
    CHECK(rep.evaluated == 3799);
    CHECK(rep.termination == Termination::goal_met);
    CHECK(rep.radius <= 0.05);
    CHECK(rep.trace.size() == 3799);

    // losses do not matter for the fixed-epsilon stopping time
    TestPool flat = constant_pool(4200, 0.9);
    CHECK(run_seq(flat, EvalGoal::fixed(0.05), 0.05).evaluated == 3799);
}

TEST_CASE("seq threshold decision on a constant pool") {
    // losses 0.9 vs C = 0.5: decided once eps_n < 0.4, which the scan puts at n = 52
    TestPool pool = constant_pool(500, 0.9);
    EvalReport rep = run_seq(pool, EvalGoal::threshold(0.5), 0.05);
    CHECK(rep.termination == Termination::threshold_decided);
    REQUIRE(rep.decision.has_value());
    CHECK(*rep.decision == Decision::above);
    CHECK(rep.evaluated == 52);
    // final CI excludes the threshold
    CHECK(rep.estimate - rep.radius > 0.5);
}

TEST_CASE("seq exhausts small pools without meeting tight goals") {
    TestPool pool = constant_pool(40, 0.2);
    EvalReport rep = run_seq(pool, EvalGoal::fixed(0.01), 0.05);
    CHECK(rep.termination == Termination::pool_exhausted);
    CHECK(rep.evaluated == 40);
}

TEST_CASE("threshold decision implies the fixed-epsilon run would have stopped by then") {
    TestPool pool = constant_pool(500, 0.9);
    EvalReport th = run_seq(pool, EvalGoal::threshold(0.5), 0.05);
    REQUIRE(th.termination == Termination::threshold_decided);
    const double implicit_eps = th.estimate - 0.5;  // |R - C| at the decision
    TestPool pool2 = constant_pool(500, 0.9);
    EvalReport fx = run_seq(pool2, EvalGoal::fixed(implicit_eps), 0.05);
    CHECK(fx.evaluated <= th.evaluated);
}

TEST_CASE("anytime trace covers the pool mean on every entry") {
    ScenarioSpec spec = scenario_preset("s1");
    spec.n = 2000;
    spec.seed = 21;
    TestPool pool = generate(spec);
    const double mu = pool.full_dataset_mean();
    EvalReport rep = run_seq(pool, EvalGoal::fixed(0.04), 0.05);
    for (const TraceEntry& t : rep.trace) CHECK(std::abs(t.r_hat - mu) <= t.eps_hat);
}

TEST_CASE("single-group evaluator walks in seq order with the group radius") {
    ScenarioSpec spec = scenario_preset("s1");
    spec.n = 2500;
    spec.seed = 13;
    TestPool seq_pool = generate(spec);
    TestPool cer_pool = seq_pool.fresh_copy();

    EvalReport seq_rep = run_seq(seq_pool, EvalGoal::fixed(0.1), 0.05);

    SingleGroupStrategy one(0.05);
    CerEvalConfig cfg;
    CerEvalRun cer = run_cereval_detailed(cer_pool, EvalGoal::fixed(0.1), cfg, one);
    const EvalReport& cer_rep = cer.report;

    CHECK(seq_rep.termination == Termination::goal_met);
    CHECK(cer_rep.termination == Termination::goal_met);

    // identical reveal order over the common prefix
    const auto& so = seq_pool.reveal_order();
    const auto& co = cer_pool.reveal_order();
    const std::size_t common = std::min(so.size(), co.size());
    for (std::size_t i = 0; i < common; ++i) REQUIRE(so[i] == co[i]);

    // per-iteration radius equals the single-group CI of the revealed prefix
    double sum = 0.0, sumsq = 0.0;
    std::int64_t m = 0;
    for (std::size_t i = 0; i < co.size(); ++i) {
        const double z = cer_pool.revealed_loss(co[i]);
        sum += z;
        sumsq += z * z;
        ++m;
        if (m < cfg.warm_start) continue;
        const std::size_t entry = static_cast<std::size_t>(m - cfg.warm_start);
        if (entry >= cer_rep.trace.size()) break;
        const double mean = sum / static_cast<double>(m);
        double var = sumsq / static_cast<double>(m) - mean * mean;
        if (var < 0) var = 0;
        const double eps = confseq::group_ci_radius(var, confseq::group_eta(m, 1, 0.05));
        CHECK(cer_rep.trace[entry].eps_hat == Catch::Approx(eps).epsilon(1e-12));
        CHECK(cer_rep.trace[entry].K == 1);
    }
}

TEST_CASE("unreachable goal exhausts the pool") {
    ScenarioSpec spec = scenario_preset("s2");
    spec.n = 400;
    spec.seed = 17;
    TestPool pool = generate(spec);
    OracleStrategy oracle(0.05);
    CerEvalConfig cfg;
    EvalReport rep = run_cereval(pool, EvalGoal::fixed(0.0), cfg, oracle);
    CHECK(rep.termination == Termination::pool_exhausted);
    CHECK(rep.evaluated == 400);
    CHECK(pool.reveal_count() == 400);
}

TEST_CASE("aggregate identity holds along a partition-based run") {
    ScenarioSpec spec = scenario_preset("s2");
    spec.n = 600;
    spec.seed = 29;
    TestPool pool = generate(spec);
    const auto n = static_cast<std::int64_t>(pool.size());

    OneNnStrategy strat(0.05, 77);
    CerEvalConfig cfg;
    CerEvalRun run = run_cereval_detailed(pool, EvalGoal::fixed(0.08), cfg, strat);

    // group sizes always cover the pool
    for (const TraceEntry& t : run.report.trace) {
        std::int64_t tot = 0;
        for (std::int64_t g : t.group_sizes) tot += g;
        CHECK(tot == n);
    }

    // final estimate recomputed from raw reveals and final labels
    const std::vector<GroupStats> stats =
        compute_group_stats(pool, run.final_partition.labels, run.final_partition.K, 0.05);
    double r = 0.0;
    std::int64_t revealed_total = 0;
    for (const GroupStats& s : stats) {
        r += static_cast<double>(s.N_k) * s.mean;
        revealed_total += s.n_k;
    }
    CHECK(revealed_total == run.report.evaluated);
    CHECK(run.report.estimate == Catch::Approx(r / static_cast<double>(n)).epsilon(1e-12));

    // partition audit objective equals an independent recomputation
    CHECK(partition_objective(pool, run.final_partition.labels, run.final_partition.K, 0.05) ==
          Catch::Approx(run.final_partition.objective).epsilon(1e-12));
}

TEST_CASE("marginal uncertainty score prefers less-sampled groups") {
    // equal size and variance, fewer samples -> higher score
    GroupStats a, b;
    a.k = 1;
    a.n_k = 40;
    a.N_k = 500;
    a.variance = 0.05;
    a.eta = confseq::group_eta(a.n_k, 2, 0.05);
    a.eps = confseq::group_ci_radius(a.variance, a.eta);
    b = a;
    b.k = 2;
    b.n_k = 200;
    b.eta = confseq::group_eta(b.n_k, 2, 0.05);
    b.eps = confseq::group_ci_radius(b.variance, b.eta);
    const double sa = marginal_uncertainty_score(a, 2, 0.05, 1000);
    const double sb = marginal_uncertainty_score(b, 2, 0.05, 1000);
    CHECK(sa > sb);
    CHECK(sb > 0.0);

    GroupStats empty;
    empty.n_k = 0;
    empty.N_k = 10;
    CHECK_THROWS_AS(marginal_uncertainty_score(empty, 2, 0.05, 1000), std::domain_error);
}

TEST_CASE("score sign and ordering agree with a finite difference of the radius") {
    const int K = 3;
    const double delta = 0.05;
    const double v = 0.04;
    auto eps_at = [&](std::int64_t n) {
        return confseq::group_ci_radius(v, confseq::group_eta(n, K, delta));
    };
    double prev_score = std::numeric_limits<double>::infinity();
    for (std::int64_t n : {10, 100, 1000}) {
        GroupStats s;
        s.n_k = n;
        s.N_k = 2000;
        s.variance = v;
        s.eta = confseq::group_eta(n, K, delta);
        s.eps = eps_at(n);
        const double score = marginal_uncertainty_score(s, K, delta, 5000);
        const double central = (eps_at(n - 1) - eps_at(n + 1)) / 2.0;
        CHECK(score > 0.0);
        CHECK(central > 0.0);
        CHECK(score < prev_score);  // shrinks with n, same ordering as the derivative
        prev_score = score;
    }
}

TEST_CASE("exhausted groups are never selected") {
    // group 2 has a single record; once revealed it cannot be chosen again
    std::vector<LossRecord> recs;
    Rng rng(7);
    for (int i = 0; i < 59; ++i)
        recs.push_back({"g1_" + std::to_string(i), {rng.normal(), 0.0}, 0.4, 1});
    recs.push_back({"solo", {50.0, 0.0}, 0.9, 2});
    TestPool pool(std::move(recs));

    OracleStrategy oracle(0.05);
    CerEvalConfig cfg;
    cfg.warm_start = 2;
    EvalReport rep = run_cereval(pool, EvalGoal::fixed(0.0), cfg, oracle);
    CHECK(rep.termination == Termination::pool_exhausted);
    std::int64_t picks_of_2 = 0;
    for (const TraceEntry& t : rep.trace)
        if (t.selected_group == 2) ++picks_of_2;
    CHECK(picks_of_2 == 1);
}

TEST_CASE("dominance: partition evaluator stays within the seq sample budget") {
    ScenarioSpec spec = scenario_preset("s1");
    spec.n = 2000;
    spec.seed = 31;
    TestPool pool = generate(spec);
    OneNnStrategy strat(0.05, 3);
    CerEvalConfig cfg;
    EvalReport rep = run_cereval(pool, EvalGoal::fixed(0.1), cfg, strat);
    CHECK(rep.termination == Termination::goal_met);
    CHECK(rep.evaluated <= confseq::seq_sample_bound(0.1, 0.05));
}

TEST_CASE("same pool, seed and config give an identical reveal sequence") {
    ScenarioSpec spec = scenario_preset("s2");
    spec.n = 800;
    spec.seed = 41;
    TestPool a = generate(spec).shuffled(99);
    TestPool b = a.fresh_copy();

    CerEvalConfig cfg;
    OneNnStrategy sa(0.05, 7), sb(0.05, 7);
    run_cereval(a, EvalGoal::fixed(0.09), cfg, sa);
    run_cereval(b, EvalGoal::fixed(0.09), cfg, sb);
    CHECK(a.reveal_order() == b.reveal_order());

    // a different partition seed may diverge once groups differ
    TestPool c = a.fresh_copy();
    OneNnStrategy sc(0.05, 8);
    run_cereval(c, EvalGoal::fixed(0.09), cfg, sc);
    CHECK(c.reveal_count() > 0);
}

TEST_CASE("warm start bounds are validated") {
    TestPool pool = constant_pool(10, 0.5);
    SingleGroupStrategy one(0.05);
    CerEvalConfig cfg;
    cfg.warm_start = 11;
    CHECK_THROWS_AS(run_cereval(pool, EvalGoal::fixed(0.1), cfg, one), std::invalid_argument);
    cfg.warm_start = 1;
    CHECK_THROWS_AS(run_cereval(pool, EvalGoal::fixed(0.1), cfg, one), std::invalid_argument);
}

TEST_CASE("report invariants hold across terminations") {
    // goal met => radius within goal
    ScenarioSpec spec = scenario_preset("s1");
    spec.n = 1500;
    spec.seed = 37;
    TestPool pool = generate(spec);
    OneNnStrategy strat(0.05, 5);
    CerEvalConfig cfg;
    EvalReport rep = run_cereval(pool, EvalGoal::fixed(0.12), cfg, strat);
    REQUIRE(rep.termination == Termination::goal_met);
    CHECK(rep.radius <= 0.12);

    // threshold decided => final CI excludes C
    TestPool flat = constant_pool(400, 0.85);
    SingleGroupStrategy one(0.05);
    EvalReport th = run_cereval(flat, EvalGoal::threshold(0.5), cfg, one);
    REQUIRE(th.termination == Termination::threshold_decided);
    CHECK(*th.decision == Decision::above);
    CHECK(th.estimate - th.radius > 0.5);
}
