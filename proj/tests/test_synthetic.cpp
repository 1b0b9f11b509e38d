#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cereval/synthetic.hpp"

using namespace cereval;

namespace {

// Test-side quadrature oracle: moments of Normal(mu, sd^2) truncated to
// [0,1], by composite Simpson. Independent of the generator.
struct TruncMoments {
    double mean;
    double var;
};

TruncMoments truncated_normal_moments(double mu, double sd) {
    const int panels = 20000;
    const double h = 1.0 / panels;
    auto pdf = [&](double z) {
        const double t = (z - mu) / sd;
        return std::exp(-0.5 * t * t);
    };
    double z0 = 0.0, z1 = 0.0, z2 = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double z = i * h;
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double p = w * pdf(z);
        z0 += p;
        z1 += p * z;
        z2 += p * z * z;
    }
    const double mean = z1 / z0;
    return {mean, z2 / z0 - mean * mean};
}

}  // namespace

TEST_CASE("quadrature oracle reproduces the frozen reference variance") {
    // Var of N(0.5, 1) truncated to [0,1]; frozen from a 50-digit quadrature.
    const TruncMoments m = truncated_normal_moments(0.5, 1.0);
    CHECK(m.mean == Catch::Approx(0.5).margin(1e-10));
    CHECK(m.var == Catch::Approx(0.080589154600811698).margin(1e-9));
}

TEST_CASE("s1 preset generates a single group with symmetric losses") {
    ScenarioSpec spec = scenario_preset("s1");
    spec.seed = 1;
    TestPool pool = generate(spec);
    REQUIRE(pool.size() == 5000);

    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        REQUIRE(pool.true_group(i) == 1);
        const double z = pool.audit_loss(i);
        REQUIRE(z >= 0.0);
        REQUIRE(z <= 1.0);
        sum += z;
        sumsq += z * z;
    }
    const double mean = sum / 5000.0;
    // truncation is symmetric about 0.5, so the mean stays there (CLT band)
    CHECK(std::abs(mean - 0.5) <= 3.0 * std::sqrt(1.0 / 5000.0));

    const double var = sumsq / 5000.0 - mean * mean;
    const double ref = truncated_normal_moments(0.5, 1.0).var;
    CHECK(var >= 0.9 * ref);
    CHECK(var <= 1.0 * ref);
}

TEST_CASE("s2 preset places cluster centers at lambda*k") {
    ScenarioSpec spec = scenario_preset("s2");
    spec.seed = 3;
    TestPool pool = generate(spec);

    double sum[4] = {0, 0, 0, 0};
    std::int64_t cnt[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const int k = *pool.true_group(i);
        REQUIRE(k >= 1);
        REQUIRE(k <= 3);
        sum[k] += pool.features(i)[0];
        cnt[k]++;
    }
    for (int k = 1; k <= 3; ++k) {
        REQUIRE(cnt[k] > 0);
        CHECK(std::abs(sum[k] / cnt[k] - 5.0 * k) <= 0.2);
        // group sizes are multinomial around n/K
        CHECK(cnt[k] >= 5000.0 / 3 - 4 * std::sqrt(5000.0));
        CHECK(cnt[k] <= 5000.0 / 3 + 4 * std::sqrt(5000.0));
    }
}

TEST_CASE("generation is deterministic under the seed") {
    ScenarioSpec spec = scenario_preset("s3");
    spec.n = 500;
    spec.seed = 99;
    TestPool a = generate(spec);
    TestPool b = generate(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.id(i) == b.id(i));
        CHECK(a.features(i) == b.features(i));
        CHECK(a.audit_loss(i) == b.audit_loss(i));
        CHECK(a.true_group(i) == b.true_group(i));
    }
    spec.seed = 100;
    TestPool c = generate(spec);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size() && !any_diff; ++i)
        any_diff = a.audit_loss(i) != c.audit_loss(i);
    CHECK(any_diff);
}

TEST_CASE("exports round-trip and agree across formats") {
    ScenarioSpec spec = scenario_preset("s1");
    spec.n = 200;
    spec.d = 3;
    spec.seed = 5;
    TestPool pool = generate(spec);

    const std::string j = "/tmp/cereval_rt_pool.jsonl";
    const std::string c = "/tmp/cereval_rt_pool.csv";
    export_pool(pool, j, FileFormat::jsonl);
    export_pool(pool, c, FileFormat::csv);
    TestPool from_j = load_pool(j, FileFormat::jsonl);
    TestPool from_c = load_pool(c, FileFormat::csv);
    std::remove(j.c_str());
    std::remove(c.c_str());

    REQUIRE(from_j.size() == pool.size());
    REQUIRE(from_c.size() == pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        CHECK(from_j.id(i) == pool.id(i));
        CHECK(from_j.features(i) == pool.features(i));
        CHECK(from_j.audit_loss(i) == pool.audit_loss(i));
        CHECK(from_j.true_group(i) == pool.true_group(i));
        CHECK(from_c.features(i) == from_j.features(i));
        CHECK(from_c.audit_loss(i) == from_j.audit_loss(i));
        CHECK(from_c.true_group(i) == from_j.true_group(i));
    }
}

TEST_CASE("empty export is an error") {
    TestPool empty;
    CHECK_THROWS_AS(export_pool(empty, "/tmp/never-written.jsonl", FileFormat::jsonl),
                    std::invalid_argument);
}

TEST_CASE("invalid specs are rejected") {
    ScenarioSpec s;
    s.K = 0;
    CHECK_THROWS_AS(generate(s), std::invalid_argument);
    CHECK_THROWS_AS(scenario_preset("s9"), std::invalid_argument);
}
