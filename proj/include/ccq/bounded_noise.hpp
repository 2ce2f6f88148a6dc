#pragma once

#include "ccq/agnostic.hpp"
#include "ccq/core.hpp"
#include "ccq/oracle.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ccq {

struct LabeledPoint {
    std::uint32_t x;
    Label y;
};

/** What a batch learner asks for next: m labeled draws from `region`, or stop. */
struct BatchState {
    std::vector<char> region;  // indexed by domain point
    double region_mass = 0.0;
    std::size_t m = 0;
    bool more = false;
    Hypothesis h;
    std::string failure;  // nonempty: learner gave up
};

class BatchLearner {
public:
    virtual ~BatchLearner() = default;
    virtual BatchState initialize() = 0;
    /** Every point in `batch` must lie in the region of the previous state. */
    virtual BatchState update(std::span<const LabeledPoint> batch) = 0;
};

struct DisagreementConfig {
    double c_m = 8.0;
    double cover_factor = 0.5;     // version space starts as a (factor * eps)-cover
    std::size_t max_batches = 24;  // per epoch, sizes double within an epoch
    std::optional<int> dim;
};

/**
 * Version-space eliminator over a cover. An epoch fixes R = DIS(V); batches
 * from R accumulate and h is dropped once its empirical error exceeds the
 * minimum by twice a Hoeffding radius. A new epoch starts when P(DIS(V))
 * halves.
 */
class DisagreementBatchLearner : public BatchLearner {
public:
    DisagreementBatchLearner(const HypothesisSpace& space, const Domain& dom, double eps, double delta, double alpha,
                             const DisagreementConfig& cfg = {});

    BatchState initialize() override;
    BatchState update(std::span<const LabeledPoint> batch) override;

    std::size_t epochs() const { return epochs_; }
    std::size_t batches() const { return batches_; }
    std::size_t max_epochs() const { return max_epochs_; }
    std::size_t initial_batch() const { return m0_; }
    const HypothesisSpace& cover() const { return cover_; }
    const std::vector<std::size_t>& alive() const { return alive_; }

private:
    void start_epoch();
    BatchState state(bool more) const;
    double dis_mass() const;
    double diameter() const;

    HypothesisSpace cover_;
    Domain dom_;
    double eps_, delta_;
    DisagreementConfig cfg_;
    std::vector<std::size_t> alive_;
    std::size_t best_ = 0;
    std::size_t max_epochs_ = 0;
    std::size_t m0_ = 1;
    double log_term_ = 0.0;

    std::vector<char> region_;
    double p_ = 1.0;
    std::vector<std::uint32_t> counts_;  // (x, y) counts in the current epoch
    std::size_t n_ = 0;
    std::size_t next_m_ = 0;
    std::size_t epochs_ = 0;
    std::size_t batches_ = 0;
    std::size_t batch_in_epoch_ = 0;
    std::string failure_;
};

struct BoundedNoiseConfig {
    double c_u = 32.0;
    double c_halving = 48.0;
    std::size_t n_min = 24;
    double cover_factor = 0.5;
    std::optional<double> delta_prime;  // default delta eps^2 (1-2a)^2 / (64 d)
    std::optional<double> c_b;          // set: Phase 2 budget ceil(c_b (1 + a m) ln(1/delta'))
    std::optional<int> dim;
    std::size_t max_rounds = 10000;
    std::uint64_t seed = 0;
    const HypothesisSpace* cover = nullptr;  // Phase 1 cover, computed when null
};

struct BoundedRound {
    std::size_t m = 0;
    double region_mass = 0.0;
    std::size_t ps = 0;  // 0 when Phase 1 was skipped
    bool phase1_skipped = false;
    std::uint64_t ccq_phase1 = 0;
    std::uint64_t ccq_phase2 = 0;
    std::size_t mistakes = 0;
    std::optional<std::size_t> budget;
    bool complete = false;
    std::size_t stream_end = 0;  // one past the last position used
    LabeledSample L;
};

struct BoundedNoiseResult {
    bool ok = false;
    std::string failure;
    Hypothesis h;
    std::size_t N = 0;
    std::size_t s = 0;
    std::size_t cover_size = 0;
    double delta_prime = 0.0;
    std::vector<BoundedRound> rounds;
};

double default_delta_prime(double delta, double eps, double alpha, int d);

/** Drives `learner`, labeling each requested batch with Phase 1 + Phase 2 over CCQs. */
BoundedNoiseResult bounded_noise_learn(Oracle& oracle, const HypothesisSpace& space, const Domain& dom, double eps,
                                       double delta, double alpha, BatchLearner& learner,
                                       const BoundedNoiseConfig& cfg = {});

/** Same protocol with every batch labeled by plain label requests. */
BoundedNoiseResult drive_with_label_requests(Oracle& oracle, BatchLearner& learner, std::size_t max_rounds = 10000);

using LearnerFactory = std::function<std::unique_ptr<BatchLearner>(double alpha)>;

struct AdaptiveAlphaConfig {
    BoundedNoiseConfig base;
    double c_b = 8.0;
};

struct AdaptiveAlphaAttempt {
    double alpha = 0.0;
    bool ok = false;
    std::string failure;
    std::uint64_t ccq = 0;
};

struct AdaptiveAlphaResult {
    bool ok = false;
    std::string failure;
    Hypothesis h;
    int i_hat = 0;
    std::vector<AdaptiveAlphaAttempt> attempts;
};

/** Tries alpha_i = 2^(i-1) eps with budgeted Phase 2; returns the first run that completes. */
AdaptiveAlphaResult adaptive_alpha(Oracle& oracle, const HypothesisSpace& space, const Domain& dom, double eps,
                                   double delta, const LearnerFactory& factory, const AdaptiveAlphaConfig& cfg = {});

}  // namespace ccq
