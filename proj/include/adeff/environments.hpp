#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "adeff/errors.hpp"
#include "adeff/rng.hpp"

namespace adeff {

// Per-round record of which experts were queried, proving the M-advice
// budget is respected.
class QueryLedger {
public:
    void record(std::size_t round, std::size_t expert) {
        if (round >= per_round_.size())
            per_round_.resize(round + 1);
        auto& seen = per_round_[round];
        if (std::find(seen.begin(), seen.end(), expert) == seen.end())
            seen.push_back(expert);
        ++total_queries_;
    }

    std::size_t distinct_queries(std::size_t round) const {
        return round < per_round_.size() ? per_round_[round].size() : 0;
    }

    std::size_t max_distinct_per_round() const {
        std::size_t mx = 0;
        for (const auto& seen : per_round_)
            mx = std::max(mx, seen.size());
        return mx;
    }

    std::size_t rounds() const { return per_round_.size(); }
    std::size_t total_queries() const { return total_queries_; }

    void enforce_budget(std::size_t budget) const {
        for (std::size_t i = 0; i < per_round_.size(); ++i)
            if (per_round_[i].size() > budget)
                throw invariant_violation("query ledger: advice budget exceeded in round " +
                                          std::to_string(i));
    }

private:
    std::vector<std::vector<std::size_t>> per_round_;
    std::size_t total_queries_ = 0;
};

// Loss-generating process behind a uniform oracle interface. Losses are fixed
// per (round, expert) at construction (oblivious adversary); query order
// cannot change outcomes. The learner path goes through query() and is
// ledgered; harness bookkeeping uses peek().
class LossOracle {
public:
    virtual ~LossOracle() = default;

    virtual std::size_t num_experts() const = 0;
    virtual std::string kind() const = 0;

    double query(std::size_t round, std::size_t expert) {
        ledger_.record(round, expert);
        return peek(round, expert);
    }

    double peek(std::size_t round, std::size_t expert) const {
        if (expert >= num_experts())
            throw invalid_input("LossOracle: expert index out of range");
        const double loss = loss_value(round, expert);
        if (!(loss >= 0.0 && loss <= 1.0))
            throw invariant_violation("LossOracle: produced loss outside [0,1]");
        return loss;
    }

    const QueryLedger& ledger() const { return ledger_; }
    QueryLedger& ledger() { return ledger_; }

protected:
    virtual double loss_value(std::size_t round, std::size_t expert) const = 0;

private:
    QueryLedger ledger_;
};

// Explicit T x N loss matrix.
class MatrixEnvironment final : public LossOracle {
public:
    explicit MatrixEnvironment(std::vector<std::vector<double>> losses)
        : losses_(std::move(losses)) {
        if (losses_.empty() || losses_.front().empty())
            throw invalid_input("MatrixEnvironment: empty matrix");
        const std::size_t n = losses_.front().size();
        for (const auto& row : losses_) {
            if (row.size() != n)
                throw invalid_input("MatrixEnvironment: ragged matrix");
            for (double v : row)
                if (!(v >= 0.0 && v <= 1.0))
                    throw invalid_input("MatrixEnvironment: loss outside [0,1]");
        }
    }

    std::size_t num_experts() const override { return losses_.front().size(); }
    std::size_t horizon() const { return losses_.size(); }
    std::string kind() const override { return "matrix"; }
    const std::vector<std::vector<double>>& matrix() const { return losses_; }

protected:
    double loss_value(std::size_t round, std::size_t expert) const override {
        if (round >= losses_.size())
            throw invalid_input("MatrixEnvironment: round beyond horizon");
        return losses_[round][expert];
    }

private:
    std::vector<std::vector<double>> losses_;
};

// Independent Bernoulli(mean[h]) losses, derived from a counter-based hash of
// (seed, round, expert).
class BernoulliEnvironment : public LossOracle {
public:
    BernoulliEnvironment(std::vector<double> means, std::uint64_t seed)
        : means_(std::move(means)), seed_(seed) {
        if (means_.empty())
            throw invalid_input("BernoulliEnvironment: no experts");
        for (double m : means_)
            if (!(m >= 0.0 && m <= 1.0))
                throw invalid_input("BernoulliEnvironment: mean outside [0,1]");
    }

    std::size_t num_experts() const override { return means_.size(); }
    std::string kind() const override { return "bernoulli"; }

protected:
    double loss_value(std::size_t round, std::size_t expert) const override {
        const double u = counter_uniform(seed_, round, expert);
        return u < means_[expert] ? 1.0 : 0.0;
    }

    const std::vector<double>& means() const { return means_; }
    std::uint64_t seed() const { return seed_; }

private:
    std::vector<double> means_;
    std::uint64_t seed_;
};

// Bernoulli with the mean vector rotated one position every drift_period
// rounds, so the best expert changes identity over time.
class DriftingEnvironment final : public LossOracle {
public:
    DriftingEnvironment(std::vector<double> base_means, std::size_t drift_period,
                        std::uint64_t seed)
        : means_(std::move(base_means)), period_(drift_period), seed_(seed) {
        if (means_.empty())
            throw invalid_input("DriftingEnvironment: no experts");
        if (period_ < 1)
            throw invalid_input("DriftingEnvironment: drift_period must be >= 1");
        for (double m : means_)
            if (!(m >= 0.0 && m <= 1.0))
                throw invalid_input("DriftingEnvironment: mean outside [0,1]");
    }

    std::size_t num_experts() const override { return means_.size(); }
    std::string kind() const override { return "drifting"; }

    double mean_at(std::size_t round, std::size_t expert) const {
        const std::size_t shift = (round / period_) % means_.size();
        return means_[(expert + shift) % means_.size()];
    }

protected:
    double loss_value(std::size_t round, std::size_t expert) const override {
        const double u = counter_uniform(seed_, round, expert);
        return u < mean_at(round, expert) ? 1.0 : 0.0;
    }

private:
    std::vector<double> means_;
    std::size_t period_;
    std::uint64_t seed_;
};

// Adversarial bandit instance viewed through the expert interface: arm h is
// the expert that always predicts arm h, so the expert's loss is the arm's
// loss and observing M experts = observing M arm losses.
class BanditAdapter final : public BernoulliEnvironment {
public:
    BanditAdapter(std::vector<double> arm_means, std::uint64_t seed)
        : BernoulliEnvironment(std::move(arm_means), seed) {}

    std::string kind() const override { return "bandit-adapter"; }
};

class BanditMatrixAdapter final : public LossOracle {
public:
    explicit BanditMatrixAdapter(std::vector<std::vector<double>> arm_losses)
        : inner_(std::move(arm_losses)) {}

    std::size_t num_experts() const override { return inner_.num_experts(); }
    std::string kind() const override { return "bandit-adapter"; }

protected:
    double loss_value(std::size_t round, std::size_t expert) const override {
        return inner_.peek(round, expert);
    }

private:
    MatrixEnvironment inner_;
};

// Strict CSV parse: T rows of N comma-separated decimal losses, no header.
inline std::vector<std::vector<double>> parse_loss_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            throw invalid_input("loss CSV: empty line " + std::to_string(lineno));
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw invalid_input("loss CSV: bad number at line " + std::to_string(lineno));
            }
            if (used != cell.size() || std::isnan(v))
                throw invalid_input("loss CSV: bad number at line " + std::to_string(lineno));
            if (!(v >= 0.0 && v <= 1.0))
                throw invalid_input("loss CSV: loss outside [0,1] at line " +
                                    std::to_string(lineno));
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw invalid_input("loss CSV: ragged row at line " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw invalid_input("loss CSV: no data");
    return rows;
}

inline std::vector<std::vector<double>> load_loss_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw invalid_input("loss CSV: cannot open " + path);
    return parse_loss_csv(in);
}

} // namespace adeff
