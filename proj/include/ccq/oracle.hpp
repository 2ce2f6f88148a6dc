#pragma once

#include "ccq/core.hpp"
#include "ccq/rng.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ccq {

/** Per-point conditional label distributions over a finite domain. */
struct GroundTruth {
    Domain domain;
    int k = 2;
    std::vector<double> cond;  // cond[x * k + (y - 1)] = P(Y = y | x)
    std::optional<Hypothesis> best;

    double p(std::size_t x, Label y) const { return cond[x * static_cast<std::size_t>(k) + (y - 1)]; }
    /** Error of `best`; throws when no best hypothesis is attached. */
    double noise_rate() const;
};

struct RealizableSpec {
    Domain domain;
    int k = 2;
    Hypothesis target;
};

struct RcnSpec {
    Domain domain;
    int k = 2;
    Hypothesis target;
    double alpha = 0.0;
};

struct BoundedSpec {
    Domain domain;
    int k = 2;
    Hypothesis target;
    double alpha = 0.0;
    std::vector<double> flip;  // per point, each <= alpha
    // Optional per-point distribution of the flipped mass over all k labels
    // (entry for target label ignored). Empty means uniform over wrong labels.
    std::vector<std::vector<double>> wrong;
};

struct AgnosticHardSpec {
    std::size_t d = 2;
    double eta = 0.0;
    double eps = 0.0;
    std::vector<int> b;  // d-1 signs in {-1,+1}
    int k = 2;
    Label y0 = 1;
    std::vector<Label> y;  // witness pair (y_i, z_i) per point i >= 1; default (1, 2)
    std::vector<Label> z;
};

using DistributionSpec = std::variant<RealizableSpec, RcnSpec, BoundedSpec, AgnosticHardSpec>;

GroundTruth build_distribution(const DistributionSpec& spec);

/** Exact error: sum over x of w(x) * (1 - P(Y = h(x) | x)). */
double true_error(std::span<const Label> h, const GroundTruth& gt);

class DataSet;
class Oracle;

namespace privileged {
Label hidden_label(const DataSet& ds, std::size_t position);
}

/**
 * i.i.d. draws with hidden labels. The sequence can be extended on demand
 * (deterministically, as if drawn up front) up to a fixed capacity.
 */
class DataSet {
public:
    static DataSet draw(const GroundTruth& gt, std::size_t n, std::uint64_t seed,
                        std::size_t capacity = 0);

    std::size_t size() const { return xs_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::uint32_t x(std::size_t i) const { return xs_[i]; }
    std::span<const std::uint32_t> xs() const { return xs_; }
    std::uint64_t seed() const { return seed_; }
    int k() const { return k_; }
    std::size_t domain_size() const { return weights_cdf_.size(); }

    /** Grow to at least n draws; false when n exceeds the capacity. */
    bool ensure(std::size_t n);

private:
    friend class Oracle;
    friend Label privileged::hidden_label(const DataSet&, std::size_t);

    void extend(std::size_t n);

    std::vector<std::uint32_t> xs_;
    std::vector<Label> ys_;
    std::uint64_t seed_ = 0;
    std::size_t capacity_ = 0;
    int k_ = 2;
    bool uniform_ = true;
    std::vector<double> weights_cdf_;
    std::vector<double> cond_cdf_;
    Rng rng_;
};

struct CCQQuery {
    Label label;
    std::span<const std::size_t> positions;
};

struct CCQResponse {
    bool found = false;
    std::size_t position = 0;
    Label label = 0;

    static CCQResponse none() { return {}; }
    static CCQResponse hit(std::size_t p, Label y) { return {true, p, y}; }
    bool operator==(const CCQResponse&) const = default;
};

class QueryLedger {
public:
    struct Counts {
        std::uint64_t ccq = 0;
        std::uint64_t label_requests = 0;
    };

    QueryLedger() { set_phase("unphased"); }
    QueryLedger(const QueryLedger& o) : total_(o.total_), phases_(o.phases_) { set_phase(o.phase_); }
    QueryLedger& operator=(const QueryLedger& o) {
        total_ = o.total_;
        phases_ = o.phases_;
        set_phase(o.phase_);
        return *this;
    }

    std::uint64_t ccq_count() const { return total_.ccq; }
    std::uint64_t label_request_count() const { return total_.label_requests; }
    const std::map<std::string, Counts>& phases() const { return phases_; }
    const std::string& phase() const { return phase_; }

    void record_ccq() {
        ++total_.ccq;
        ++current_->ccq;
    }
    void record_label_request() {
        ++total_.label_requests;
        ++current_->label_requests;
    }

    /** Attributes counts to `name` until destroyed. */
    class Scope {
    public:
        Scope(QueryLedger& l, std::string name) : l_(l), prev_(l.phase_) { l_.set_phase(std::move(name)); }
        ~Scope() { l_.set_phase(std::move(prev_)); }
        Scope(const Scope&) = delete;
        Scope& operator=(const Scope&) = delete;

    private:
        QueryLedger& l_;
        std::string prev_;
    };

private:
    void set_phase(std::string name) {
        phase_ = std::move(name);
        current_ = &phases_[phase_];
    }

    Counts total_;
    std::map<std::string, Counts> phases_;
    std::string phase_;
    Counts* current_ = nullptr;
};

enum class AnswerPolicy { FirstIndex, UniformRandom, Custom };

/** Picks one witness; gets all witness positions in ascending order, returns an index into them. */
using WitnessChooser = std::function<std::size_t(std::span<const std::size_t>)>;

class Oracle {
public:
    Oracle(DataSet& ds, QueryLedger& ledger, AnswerPolicy policy = AnswerPolicy::FirstIndex,
           std::uint64_t policy_seed = 0, WitnessChooser chooser = {});

    CCQResponse answer_ccq(const CCQQuery& q);
    /** Repeat requests for a position are answered but counted once. */
    Label answer_label_request(std::size_t position);
    bool was_requested(std::size_t position) const;

    const DataSet& data() const { return ds_; }
    /** Grows the underlying stream; false when its capacity is exhausted. */
    bool ensure(std::size_t n) { return ds_.ensure(n); }
    QueryLedger& ledger() { return ledger_; }
    int k() const { return ds_.k(); }

    /** Replaces the truthful answerer, e.g. with a simulation over label requests. Counting stays here. */
    using CcqBackend = std::function<CCQResponse(const CCQQuery&)>;
    void set_ccq_backend(CcqBackend b) { backend_ = std::move(b); }

private:
    DataSet& ds_;
    QueryLedger& ledger_;
    AnswerPolicy policy_;
    Rng rng_;
    WitnessChooser chooser_;
    std::vector<bool> requested_;
    CcqBackend backend_;
};

}  // namespace ccq
