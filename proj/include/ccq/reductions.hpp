#pragma once

#include "ccq/core.hpp"
#include "ccq/oracle.hpp"
#include "ccq/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ccq {

struct ReductionLedger {
    std::uint64_t ccq_answered = 0;
    std::uint64_t label_requests_spent = 0;
    std::vector<std::uint32_t> trace;  // A_i per simulated query
};

/**
 * Instance knowledge the simulation may use. `relevant(p, l)` false means the
 * point at position p can never carry label l; `known(p)` gives a label that
 * is certain without asking.
 */
struct Restriction {
    std::function<bool(std::size_t, Label)> relevant;
    std::function<std::optional<Label>(std::size_t)> known;
};

/**
 * Answers a CCQ using only label requests on `oracle`: known labels first,
 * then uniformly random unrequested positions of the restricted set until one
 * carries the label.
 */
CCQResponse ccq_from_label_requests(Oracle& oracle, const CCQQuery& q, const Restriction& restriction,
                                    ReductionLedger& ledger, Rng& rng);

/** Installs the simulation as `oracle`'s CCQ answerer. Ledger and rng must outlive the oracle. */
void use_label_request_backend(Oracle& oracle, Restriction restriction, ReductionLedger& ledger, Rng& rng);

/** Restriction for the hard instance: x0 carries y0 surely, x_i only y_i or z_i. */
Restriction hard_instance_restriction(const DataSet& ds, const AgnosticHardSpec& spec);

/** (2/alpha)(k + 4 ln(1/delta)). */
double geometric_sum_bound(std::uint64_t k, double alpha, double delta);

/** Number of Bernoulli(alpha) trials up to and including the first success. */
std::uint64_t geometric_draw(Rng& rng, double alpha);

/** Fraction of `reps` replicates with sum of k Geometric(alpha) draws <= bound. */
double geometric_tail_frequency_serial(std::uint64_t k, double alpha, double bound, std::size_t reps,
                                       std::uint64_t seed);
double geometric_tail_frequency_parallel(std::uint64_t k, double alpha, double bound, std::size_t reps,
                                         std::uint64_t seed);

/** gamma = eps / (eta + 2 eps) for the hard instance. */
double hard_instance_gamma(double eta, double eps);

/** Any learner that talks to an Oracle; returns nullopt on Failure. */
using CcqLearner = std::function<std::optional<Hypothesis>(Oracle&, const GroundTruth&)>;

struct HardTrialSide {
    bool ok = false;
    double error = 1.0;
    std::uint64_t ccq = 0;
    std::uint64_t label_requests = 0;
};

struct HardTrialResult {
    double gamma = 0.0;
    bool in_regime = true;
    HardTrialSide direct;
    HardTrialSide reduced;
    ReductionLedger reduction;
};

/**
 * Runs `learner` on the hard instance twice over the same draws: once against
 * truthful CCQs, once against the label-request simulation.
 */
HardTrialResult hard_instance_trial(const AgnosticHardSpec& spec, const CcqLearner& learner, std::size_t draws,
                                    std::uint64_t seed, std::size_t capacity = 0);

}  // namespace ccq
