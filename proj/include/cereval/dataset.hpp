#pragma once

// Test-pool abstraction: ordered records with lazily revealed losses and
// exact cost accounting, plus JSONL/CSV ingestion and export. Losses live in
// memory but evaluators only see them through reveal(); the reveal counter is
// the one and only cost metric.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cereval/rng.hpp"

namespace cereval {

struct LossRecord {
    std::string id;
    std::vector<double> features;
    double loss = 0.0;                 // in [0,1]; hidden until revealed
    std::optional<int> true_group;     // generator's partition label, if any
};

struct RevealReceipt {
    std::string id;
    double loss = 0.0;
    std::int64_t sequence_index = 0;   // 0-based order of revelation
};

class TestPool {
public:
    TestPool() = default;

    explicit TestPool(std::vector<LossRecord> records) : records_(std::move(records)) {
        revealed_.assign(records_.size(), false);
        index_by_id_.reserve(records_.size());
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const LossRecord& r = records_[i];
            if (!(r.loss >= 0.0 && r.loss <= 1.0))
                throw std::invalid_argument("pool: loss out of [0,1] for id " + r.id);
            if (!records_.empty() && r.features.size() != records_.front().features.size())
                throw std::invalid_argument("pool: ragged feature vector for id " + r.id);
            if (!index_by_id_.emplace(r.id, i).second)
                throw std::invalid_argument("pool: duplicate id " + r.id);
        }
    }

    std::size_t size() const { return records_.size(); }
    std::size_t feature_dim() const { return records_.empty() ? 0 : records_.front().features.size(); }

    const std::string& id(std::size_t i) const { return records_.at(i).id; }
    const std::vector<double>& features(std::size_t i) const { return records_.at(i).features; }
    const std::optional<int>& true_group(std::size_t i) const { return records_.at(i).true_group; }

    bool is_revealed(std::size_t i) const { return revealed_.at(i); }
    std::int64_t reveal_count() const { return static_cast<std::int64_t>(reveal_order_.size()); }

    std::size_t index_of(const std::string& id) const {
        auto it = index_by_id_.find(id);
        if (it == index_by_id_.end()) throw std::invalid_argument("pool: unknown id " + id);
        return it->second;
    }

    RevealReceipt reveal(std::size_t i) {
        if (i >= records_.size()) throw std::invalid_argument("pool: record index out of range");
        if (revealed_[i]) throw std::logic_error("pool: double reveal of id " + records_[i].id);
        revealed_[i] = true;
        reveal_order_.push_back(i);
        return RevealReceipt{records_[i].id, records_[i].loss,
                             static_cast<std::int64_t>(reveal_order_.size()) - 1};
    }

    RevealReceipt reveal(const std::string& id) { return reveal(index_of(id)); }

    // Loss of an already revealed record; the paid-for view.
    double revealed_loss(std::size_t i) const {
        if (!revealed_.at(i)) throw std::logic_error("pool: loss of id " + records_[i].id +
                                                     " has not been revealed");
        return records_[i].loss;
    }

    // Indices in order of revelation.
    const std::vector<std::size_t>& reveal_order() const { return reveal_order_; }

    // Audit-side access that bypasses reveal accounting. Used by the harness
    // coverage metric and by tests, never by evaluators.
    double audit_loss(std::size_t i) const { return records_.at(i).loss; }

    double full_dataset_mean() const {
        if (records_.empty()) throw std::logic_error("pool: mean of empty pool");
        double s = 0.0;
        for (const LossRecord& r : records_) s += r.loss;
        return s / static_cast<double>(records_.size());
    }

    const std::vector<LossRecord>& records() const { return records_; }

    // Copy with records permuted by the seed and reveal state cleared. The
    // permuted order is what "the next point" means to the evaluators.
    TestPool shuffled(std::uint64_t seed) const {
        std::vector<std::size_t> perm(records_.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        Rng rng(seed);
        rng.shuffle(perm);
        std::vector<LossRecord> out;
        out.reserve(records_.size());
        for (std::size_t i : perm) out.push_back(records_[i]);
        return TestPool(std::move(out));
    }

    // Copy with reveal state cleared.
    TestPool fresh_copy() const { return TestPool(records_); }

private:
    std::vector<LossRecord> records_;
    std::vector<bool> revealed_;
    std::vector<std::size_t> reveal_order_;
    std::unordered_map<std::string, std::size_t> index_by_id_;
};

// Count plus draw access to the unrevealed members of one group. The draw is
// the lowest-position unrevealed member in the pool's seeded order, which is
// a uniform pick over the set when the order came from a seeded shuffle.
class UnrevealedGroup {
public:
    UnrevealedGroup(const TestPool& pool, const std::vector<int>& labels, int group)
        : pool_(&pool), labels_(&labels), group_(group) {
        if (labels.size() != pool.size())
            throw std::invalid_argument("unrevealed_in_group: assignment must cover every record");
        count_ = 0;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if ((*labels_)[i] == group_ && !pool.is_revealed(i)) ++count_;
    }

    std::int64_t count() const { return count_; }

    std::size_t draw() const {
        for (std::size_t i = 0; i < pool_->size(); ++i)
            if ((*labels_)[i] == group_ && !pool_->is_revealed(i)) return i;
        throw std::logic_error("unrevealed_in_group: group is exhausted");
    }

private:
    const TestPool* pool_;
    const std::vector<int>* labels_;
    int group_;
    std::int64_t count_ = 0;
};

inline UnrevealedGroup unrevealed_in_group(const TestPool& pool, const std::vector<int>& labels,
                                           int group) {
    return UnrevealedGroup(pool, labels, group);
}

enum class FileFormat { jsonl, csv };

inline FileFormat parse_format(const std::string& name) {
    if (name == "jsonl") return FileFormat::jsonl;
    if (name == "csv") return FileFormat::csv;
    throw std::invalid_argument("unknown file format: " + name);
}

namespace io_detail {

inline double parse_double(std::string_view s, std::size_t line_no, const char* what) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad " + what + " value '" +
                                 std::string(s) + "'");
    }
    return v;
}

inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline void validate_record(LossRecord& r, std::size_t line_no, std::optional<std::size_t>& dim) {
    if (!(r.loss >= 0.0 && r.loss <= 1.0))
        throw std::runtime_error("line " + std::to_string(line_no) + ": loss " +
                                 format_double(r.loss) + " out of [0,1] for id " + r.id);
    if (!dim) dim = r.features.size();
    if (r.features.size() != *dim)
        throw std::runtime_error("line " + std::to_string(line_no) + ": ragged features for id " +
                                 r.id + " (expected " + std::to_string(*dim) + ", got " +
                                 std::to_string(r.features.size()) + ")");
}

}  // namespace io_detail

// JSONL: one object per line, keys id (string), features (number array),
// loss (number), group (optional integer).
inline TestPool load_pool_jsonl(std::istream& in) {
    std::vector<LossRecord> records;
    std::optional<std::size_t> dim;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
        LossRecord r;
        try {
            r.id = j.at("id").get<std::string>();
            r.features = j.at("features").get<std::vector<double>>();
            r.loss = j.at("loss").get<double>();
            if (j.contains("group") && !j["group"].is_null()) r.true_group = j["group"].get<int>();
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
        io_detail::validate_record(r, line_no, dim);
        records.push_back(std::move(r));
    }
    return TestPool(std::move(records));
}

// CSV: header id,f0,...,f{d-1},loss[,group]; '.' decimal separator.
inline TestPool load_pool_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("line 1: missing CSV header");
    auto header = io_detail::split_csv(line);
    if (header.size() < 2 || header[0] != "id")
        throw std::runtime_error("line 1: CSV header must start with 'id'");
    bool has_group = header.back() == "group";
    const std::size_t dim_cols = header.size() - 2 - (has_group ? 1 : 0);
    for (std::size_t i = 0; i < dim_cols; ++i) {
        if (header[1 + i] != "f" + std::to_string(i))
            throw std::runtime_error("line 1: expected feature column f" + std::to_string(i));
    }
    if (header[1 + dim_cols] != "loss")
        throw std::runtime_error("line 1: expected 'loss' column after features");

    std::vector<LossRecord> records;
    std::optional<std::size_t> dim;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = io_detail::split_csv(line);
        if (cells.size() != header.size())
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " columns, got " +
                                     std::to_string(cells.size()));
        LossRecord r;
        r.id = std::string(cells[0]);
        r.features.reserve(dim_cols);
        for (std::size_t i = 0; i < dim_cols; ++i)
            r.features.push_back(io_detail::parse_double(cells[1 + i], line_no, "feature"));
        r.loss = io_detail::parse_double(cells[1 + dim_cols], line_no, "loss");
        if (has_group && !cells.back().empty())
            r.true_group = static_cast<int>(io_detail::parse_double(cells.back(), line_no, "group"));
        io_detail::validate_record(r, line_no, dim);
        records.push_back(std::move(r));
    }
    return TestPool(std::move(records));
}

inline TestPool load_pool(const std::string& path, FileFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pool file " + path);
    try {
        return format == FileFormat::jsonl ? load_pool_jsonl(in) : load_pool_csv(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline void save_pool(const TestPool& pool, std::ostream& out, FileFormat format) {
    const bool any_group = [&] {
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (pool.true_group(i)) return true;
        return false;
    }();
    if (format == FileFormat::jsonl) {
        for (const LossRecord& r : pool.records()) {
            nlohmann::ordered_json j;
            j["id"] = r.id;
            j["features"] = r.features;
            j["loss"] = r.loss;
            if (r.true_group) j["group"] = *r.true_group;
            out << j.dump() << '\n';
        }
    } else {
        out << "id";
        for (std::size_t i = 0; i < pool.feature_dim(); ++i) out << ",f" << i;
        out << ",loss";
        if (any_group) out << ",group";
        out << '\n';
        for (const LossRecord& r : pool.records()) {
            out << r.id;
            for (double f : r.features) out << ',' << io_detail::format_double(f);
            out << ',' << io_detail::format_double(r.loss);
            if (any_group) {
                out << ',';
                if (r.true_group) out << *r.true_group;
            }
            out << '\n';
        }
    }
}

inline void save_pool(const TestPool& pool, const std::string& path, FileFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write pool file " + path);
    save_pool(pool, out, format);
}

}  // namespace cereval
