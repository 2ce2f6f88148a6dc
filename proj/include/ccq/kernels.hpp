#pragma once

#include "ccq/core.hpp"

#include <span>
#include <vector>

// Hot loops with a serial reference and an OpenMP version. The two must agree
// exactly; the parallel ones only split independent work.
namespace ccq::kernels {

inline constexpr double kDistTol = 1e-12;

std::size_t mismatches(std::span<const Label> a, std::span<const Label> b);
double weighted_mismatch(std::span<const Label> a, std::span<const Label> b, const Domain& dom);

/** out[j] = class distance between row `center` and row targets[j]. */
void distances_serial(const HypothesisSpace& s, const Domain& dom, std::size_t center,
                      std::span<const std::size_t> targets, std::span<double> out);
void distances_parallel(const HypothesisSpace& s, const Domain& dom, std::size_t center,
                        std::span<const std::size_t> targets, std::span<double> out);

/** Full |H| x |H| distance matrix, row-major. */
std::vector<double> pairwise_serial(const HypothesisSpace& s, const Domain& dom);
std::vector<double> pairwise_parallel(const HypothesisSpace& s, const Domain& dom);

std::vector<std::size_t> greedy_cover_serial(const HypothesisSpace& s, const Domain& dom, double eps);
std::vector<std::size_t> greedy_cover_parallel(const HypothesisSpace& s, const Domain& dom, double eps);

}  // namespace ccq::kernels
