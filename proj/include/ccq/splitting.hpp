#pragma once

#include "ccq/core.hpp"
#include "ccq/oracle.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ccq {

/** Unordered pairs of row indices into some hypothesis matrix, stored with first < second. */
struct PairSet {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;

    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

/** |Q_x^y| for y = 1..k (index 0 unused): pairs with h(x) = g(x) = y. */
std::vector<std::size_t> pair_label_counts(const HypothesisSpace& V, const PairSet& Q, std::size_t x);

/** Keeps the pairs with h(x) = g(x) = y. */
PairSet restrict_pairs(const HypothesisSpace& V, const PairSet& Q, std::size_t x, Label y);

/** Rows whose pairwise distance exceeds `delta`, among `alive`. */
PairSet far_pairs(const HypothesisSpace& V, const Domain& dom, std::span<const std::size_t> alive, double delta);

struct SplitterChoice {
    std::size_t position = 0;
    Label label = 0;     // label maximising |Q_x^y|
    std::size_t max_count = 0;
};

/**
 * Scans stream positions [cursor, cursor + window), returns the one minimising
 * max_y |Q_x^y| (earliest on ties) with its maximising label (smallest on ties).
 */
SplitterChoice select_splitter(const HypothesisSpace& V, const PairSet& Q, std::span<const std::uint32_t> points,
                               std::size_t cursor, std::size_t window);

/** M[h * |V| + g] counts labeled points with h(x) != y = g(x). */
class SplitCounters {
public:
    explicit SplitCounters(std::size_t n) : n_(n), m_(n * n, 0) {}
    std::size_t size() const { return n_; }
    std::uint64_t operator()(std::size_t h, std::size_t g) const { return m_[h * n_ + g]; }
    std::uint64_t& at(std::size_t h, std::size_t g) { return m_[h * n_ + g]; }
    /** Adds a labeled batch given as per-(point, label) counts. */
    void add(const HypothesisSpace& V, std::span<const std::size_t> alive, const std::vector<std::uint32_t>& xy_counts);

private:
    std::size_t n_;
    std::vector<std::uint64_t> m_;
};

/** Threshold c_e (sqrt(max(M_hg, M_gh) d ln(1/eps0)) + d ln(1/eps0)). */
double elimination_threshold(std::uint64_t mhg, std::uint64_t mgh, int d, double eps0, double c_e);

/** Survivors of step (e): h stays iff no g in alive has M_hg - M_gh above the threshold. */
std::vector<std::size_t> eliminate(std::span<const std::size_t> alive, const SplitCounters& M, int d, double eps0,
                                   double c_e);

/** Labels for sorted positions; `hint` is the plurality of the current version space. */
using Labeler = std::function<std::optional<std::vector<Label>>(std::span<const std::size_t> positions,
                                                                const Hypothesis& hint)>;

/** Standalone mode: one label request per position. */
Labeler label_request_labeler(Oracle& oracle);
/** CCQ mode: Phase 2 refining with the hint; nullopt when `budget` runs out. */
Labeler ccq_labeler(Oracle& oracle, std::optional<std::size_t> budget = std::nullopt);

struct SplittingConfig {
    double c0 = 1.0 / 64.0;
    double c_s = 16.0;
    double c_e = 4.0;
    std::optional<int> dim;
    std::optional<double> eps0;  // overrides c0 (1-2a)^2 eps tau^2 delta / d^3
    std::size_t max_outer = 100000;
};

struct SplittingEpoch {
    int T = 0;
    std::size_t q_start = 0;
    std::size_t outer_iterations = 0;
    std::size_t labels = 0;
    std::size_t alive_end = 0;
};

struct SplittingResult {
    bool ok = false;
    std::string failure;
    Hypothesis h;
    double eps0 = 0.0;
    std::size_t cover_size = 0;
    std::size_t repeats = 0;  // step (b) count
    std::size_t stream_used = 0;
    std::size_t labels = 0;
    std::vector<std::size_t> alive;  // final survivors (cover rows)
    std::vector<SplittingEpoch> epochs;
    std::optional<HypothesisSpace> cover;
};

SplittingResult splitting_active_learn(Oracle& oracle, const HypothesisSpace& space, const Domain& dom, double eps,
                                       double tau, double alpha, double delta, const Labeler& labeler,
                                       const SplittingConfig& cfg = {});

}  // namespace ccq
