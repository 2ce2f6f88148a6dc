#pragma once

#include "ccq/core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ccq {

struct SpaceBundle {
    Domain domain;
    HypothesisSpace space;
};

/** Staircase labelings with k-1 cut points on an n-point uniform grid (nondecreasing label rows). */
SpaceBundle thresholds(std::size_t n, int k = 2);
/** Label c in {2..k} on a contiguous run of grid points, 1 elsewhere; plus the all-1 row. */
SpaceBundle intervals(std::size_t n, int k = 2);
/** All k^d labelings of d points. */
SpaceBundle shattered(std::size_t d, int k = 2);
/** Caller-provided rows over a uniform domain, or over `weights` when given. */
SpaceBundle explicit_space(int k, const std::vector<Hypothesis>& hs, std::vector<double> weights = {});

/**
 * "thresholds:N[:K]", "intervals:N[:K]", "shattered:D[:K]" or "file:PATH".
 */
SpaceBundle parse_space_spec(const std::string& spec);

/**
 * Text format:
 *   k=<int> n=<int>
 *   <n weights>
 *   <n labels>      one line per hypothesis
 * Blank lines and lines starting with '#' are skipped.
 */
void write_space(std::ostream& os, const Domain& dom, const HypothesisSpace& space);
SpaceBundle read_space(std::istream& is);

}  // namespace ccq
