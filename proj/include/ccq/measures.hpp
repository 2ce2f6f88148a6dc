#pragma once

#include "ccq/core.hpp"
#include "ccq/splitting.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ccq {

struct Ball {
    std::vector<Label> center;
    double radius = 0.0;
    std::vector<std::size_t> members;  // rows g with d(center, g) <= radius
};

Ball ball(const HypothesisSpace& space, const Domain& dom, std::span<const Label> center, double radius);

struct Region {
    std::vector<std::uint32_t> points;
    double mass = 0.0;
};

/** Points where some two of the given rows disagree. */
Region disagreement_region(const HypothesisSpace& space, std::span<const std::size_t> rows, const Domain& dom);
Region disagreement_region(const HypothesisSpace& space, const Domain& dom);

/**
 * sup over r > eps of P(DIS(B(h, r))) / r, evaluated exactly at the finitely
 * many radii where the ball changes.
 */
double disagreement_coefficient(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom,
                                double eps);

struct ThetaResult {
    double theta = 0.0;
    std::size_t argmax = 0;  // row attaining it
};

/** Class-level coefficient: max over rows of the space. */
ThetaResult class_disagreement_coefficient_serial(const HypothesisSpace& space, const Domain& dom, double eps);
ThetaResult class_disagreement_coefficient_parallel(const HypothesisSpace& space, const Domain& dom, double eps);

/** max_y |Q_x^y| <= (1 - rho) |Q|. */
bool rho_splits(const HypothesisSpace& V, std::size_t x, const PairSet& Q, double rho);

struct SplitGuard {
    std::size_t max_pairs = 1000000;
};

/** Scales where the maximal pair set of B(h, 4 Delta) can change, restricted to Delta >= eps / 2. */
std::vector<double> splitting_scales(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom,
                                     double eps);

/** All pairs inside B(h, 4 delta) at distance > delta. */
PairSet maximal_pairs(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom, double delta,
                      SplitGuard guard = {});

/** True when P(x rho-splits Q) >= tau. Empty Q is vacuously splittable. */
bool splittable(const HypothesisSpace& space, const Domain& dom, const PairSet& Q, double rho, double tau);

/** Largest rho with P(x rho-splits Q) >= tau: a weighted upper tau-quantile. 1 for empty Q. */
double best_rho(const HypothesisSpace& space, const Domain& dom, const PairSet& Q, double tau);

/** rho_{h,tau}(eps) by binary search on a grid of step `resolution`, using maximal pair sets. */
double splitting_index(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom, double tau,
                       double eps, double resolution, SplitGuard guard = {});

/** Same quantity without the search: min over scales of best_rho. */
double splitting_index_exact(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom, double tau,
                             double eps, SplitGuard guard = {});

/** rho_tau(eps): min over rows of the space. */
double class_splitting_index(const HypothesisSpace& space, const Domain& dom, double tau, double eps,
                             double resolution, SplitGuard guard = {});

struct SubsetCheck {
    std::size_t checks = 0;
    std::size_t violations = 0;  // random sub-Q not (rho, tau)-split
};

/**
 * Draws random sub-pair-sets of the given sizes at every scale and counts
 * those that a tau-mass of points fails to rho-split.
 */
SubsetCheck spot_check_subsets(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom, double tau,
                               double eps, double rho, std::span<const std::size_t> sizes, std::size_t per_size,
                               std::uint64_t seed);

}  // namespace ccq
