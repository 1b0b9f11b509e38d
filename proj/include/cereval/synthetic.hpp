#pragma once

// Synthetic pool generator: K Gaussian feature clusters on the first axis,
// per-cluster truncated-Gaussian losses. Presets s1/s2/s3 reproduce the
// single-group, well-separated and overlapping cluster layouts used by the
// experiment harness.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cereval/dataset.hpp"
#include "cereval/rng.hpp"

namespace cereval {

struct ScenarioSpec {
    int K = 1;               // number of groups
    double lambda = 5.0;     // cluster-center spacing on the first axis
    double sigma2 = 1.0;     // isotropic feature variance
    int d = 10;              // feature dimension
    std::int64_t n = 5000;   // pool size
    std::uint64_t seed = 0;

    // Per-group loss distribution: Normal((k - 1/2)/K, 1/K^2) truncated to [0,1].
    double loss_mean(int k) const { return (k - 0.5) / static_cast<double>(K); }
    double loss_sd() const { return 1.0 / static_cast<double>(K); }

    void validate() const {
        if (K < 1) throw std::invalid_argument("scenario: K must be >= 1");
        if (!(sigma2 > 0.0)) throw std::invalid_argument("scenario: sigma2 must be positive");
        if (d < 1) throw std::invalid_argument("scenario: d must be >= 1");
        if (n < 1) throw std::invalid_argument("scenario: n must be >= 1");
    }
};

inline ScenarioSpec scenario_preset(std::string_view name) {
    ScenarioSpec s;
    if (name == "s1") {
        s.K = 1;
    } else if (name == "s2") {
        s.K = 3;
        s.lambda = 5.0;
    } else if (name == "s3") {
        s.K = 3;
        s.lambda = 1.0;
    } else {
        throw std::invalid_argument("unknown scenario preset: " + std::string(name));
    }
    return s;
}

// Draw the pool: group uniform in {1..K}, features ~ N((lambda*k, 0, ...),
// sigma2*I), loss by rejection from the truncated Gaussian so no mass ever
// piles up on the boundaries.
inline TestPool generate(const ScenarioSpec& spec) {
    spec.validate();
    Rng rng(mix_seed(spec.seed, 0x73796e74u));  // generator stream
    const double sigma = std::sqrt(spec.sigma2);
    const double loss_sd = spec.loss_sd();

    std::vector<LossRecord> records;
    records.reserve(static_cast<std::size_t>(spec.n));
    for (std::int64_t i = 0; i < spec.n; ++i) {
        const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.K)));
        LossRecord r;
        {
            std::string num = std::to_string(i);
            r.id = "p" + std::string(6 - std::min<std::size_t>(6, num.size()), '0') + num;
        }
        r.features.resize(static_cast<std::size_t>(spec.d));
        r.features[0] = spec.lambda * k + sigma * rng.normal();
        for (int j = 1; j < spec.d; ++j) r.features[j] = sigma * rng.normal();
        const double mean = spec.loss_mean(k);
        double z = rng.normal(mean, loss_sd);
        while (z < 0.0 || z > 1.0) z = rng.normal(mean, loss_sd);
        r.loss = z;
        r.true_group = k;
        records.push_back(std::move(r));
    }
    return TestPool(std::move(records));
}

// Inverse of load_pool; exporting an empty pool is an error.
inline void export_pool(const TestPool& pool, const std::string& path, FileFormat format) {
    if (pool.size() == 0) throw std::invalid_argument("export: pool is empty");
    save_pool(pool, path, format);
}

}  // namespace cereval
