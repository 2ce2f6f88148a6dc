#pragma once

#include "ccq/core.hpp"
#include "ccq/oracle.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ccq {

/** Per-(point, label) counts of a labeled sample; gives err_L(h) in O(n). */
class SampleCounts {
public:
    SampleCounts(const LabeledSample& L, std::span<const std::uint32_t> points, std::size_t n, int k);
    double error(std::span<const Label> h) const;
    std::size_t size() const { return total_; }

private:
    std::size_t n_;
    std::size_t k_;
    std::size_t total_ = 0;
    std::vector<std::uint32_t> c_;
};

/** Index of the first row of `space` minimising err_L. */
std::size_t erm_index(const HypothesisSpace& space, const SampleCounts& counts);

/**
 * Queries {x in S : h(x) != y} for y = 1..k in order; first hit is a mistake
 * of h with its true label. S must be sorted ascending.
 */
std::optional<LabeledSample::Entry> find_mistake(Oracle& oracle, std::span<const std::size_t> S,
                                                 std::span<const Label> h);

struct HalvingConfig {
    std::size_t s = 1;
    std::size_t N = 24;
    std::optional<std::size_t> budget;  // t advances by N per loop
};

/** N = max(n_min, ceil(c ln(4 log2|V| / delta))). */
std::size_t halving_draws(std::size_t cover_size, double delta, double c_halving, std::size_t n_min);

struct HalvingRound {
    std::size_t size_before = 0;
    std::size_t mistake_sets = 0;
    std::size_t removed = 0;
    bool triggered = false;
    Hypothesis plur;  // plurality of V at the start of the round
};

struct HalvingResult {
    std::vector<std::size_t> alive;  // rows of V still present
    Hypothesis plur;                 // empty labels when V was emptied
    std::vector<HalvingRound> rounds;
    std::size_t fm_calls = 0;
    std::size_t t = 0;
    bool emptied = false;
};

HalvingResult generalized_halving(Oracle& oracle, std::span<const std::size_t> U, const HypothesisSpace& V,
                                  const HalvingConfig& cfg, Rng& rng);

struct RefineResult {
    LabeledSample L;
    bool complete = false;
    std::size_t fm_calls = 0;
    std::size_t mistakes = 0;
};

/** Budget counts Find-Mistake calls; nullopt means unlimited. U must be sorted. */
RefineResult refining(Oracle& oracle, std::span<const std::size_t> U, std::span<const Label> h,
                      std::optional<std::size_t> budget = std::nullopt);
RefineResult chunked_refining(Oracle& oracle, std::span<const std::size_t> U, std::span<const Label> h,
                              std::size_t chunk_size, std::optional<std::size_t> budget = std::nullopt);

enum class SetSizeRule {
    BetaPlusEps,  // s = floor(1 / (16 (beta + eps)))
    BetaOnly,     // s = floor(1 / (16 beta)); beta = 0 gives s = |U|
};

struct AgnosticConfig {
    double c_halving = 48.0;
    double c_u = 32.0;
    std::size_t n_min = 24;
    double cover_factor = 0.5;   // cover radius = cover_factor * eps
    std::size_t chunk_size = 0;  // 0: refine U in one piece
    SetSizeRule rule = SetSizeRule::BetaPlusEps;
    std::optional<std::size_t> budget;  // total Find-Mistake budget, halved between phases
    std::optional<int> dim;             // overrides the space's dimension
    std::uint64_t seed = 0;             // Phase 1 sampling stream
};

struct AgnosticResult {
    bool ok = false;
    std::string failure;
    Hypothesis h;
    std::size_t cover_index = 0;
    std::size_t u = 0;
    std::size_t s = 0;
    std::size_t N = 0;
    std::size_t cover_size = 0;
    bool phase1_skipped = false;
    bool regime_warning = false;
    HalvingResult halving;
    RefineResult refine;
};

/** u = ceil(c_u d (beta + eps) / eps^2 ln(k / (eps delta))). */
std::size_t agnostic_sample_size(double c_u, int d, int k, double beta, double eps, double delta);

/**
 * Cover, Phase 1 on U = first u stream positions, Phase 2 on U, then ERM over
 * the cover. `cover` may be passed in to reuse one across runs.
 */
AgnosticResult agnostic_learn(Oracle& oracle, const HypothesisSpace& space, const Domain& dom, double beta,
                              double eps, double delta, const AgnosticConfig& cfg,
                              const HypothesisSpace* cover = nullptr);

struct AdaptiveAgnosticConfig {
    AgnosticConfig base;
    double inner_eps_factor = 0.5;  // inner runs target eps * factor
    bool chunk_inner = true;        // chunks of ceil(1 / (eta_i + eps_inner))
    int max_j = 40;
    const HypothesisSpace* cover = nullptr;  // shared cover at adaptive_cover_radius, computed when null
};

double adaptive_cover_radius(double eps, const AdaptiveAgnosticConfig& cfg);

struct AdaptiveStep {
    int j = 0;
    int i_hat = 0;  // 0: no complete run at this j
    std::size_t L_size = 0;
    double calE = 0.0;
    double regret = 0.0;
    std::uint64_t ccq_after = 0;
};

struct AdaptiveAgnosticResult {
    bool ok = false;
    std::string failure;
    Hypothesis h;
    int j_hat = 0;
    int i_hat = 0;
    std::vector<AdaptiveStep> trace;
};

/** The confidence radius used by the stopping rule. */
double adaptive_radius(int d, std::size_t L_size, int j, double delta, double emp_err);

AdaptiveAgnosticResult adaptive_agnostic(Oracle& oracle, const HypothesisSpace& space, const Domain& dom,
                                         double eps, double delta, const AdaptiveAgnosticConfig& cfg);

}  // namespace ccq
