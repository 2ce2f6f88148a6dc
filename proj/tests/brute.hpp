#pragma once

// Slow reference computations used to check the library. Each one follows the
// textbook definition directly and shares no code with the library beyond the
// data types.

#include "ccq/core.hpp"
#include "ccq/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace brute {

using ccq::Domain;
using ccq::HypothesisSpace;
using ccq::Label;

inline double dist(std::span<const Label> a, std::span<const Label> b, const Domain& dom) {
    double s = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x) {
        if (a[x] != b[x]) s += dom.weight(x);
    }
    return s;
}

// theta via entry radii: x joins DIS(B(h, r)) once r reaches the distance of
// the closest g with g(x) != h(x).
inline double theta_entry(std::span<const Label> h, const HypothesisSpace& H, const Domain& dom, double eps) {
    const std::size_t n = dom.size();
    std::vector<double> entry(n, std::numeric_limits<double>::infinity());
    for (std::size_t g = 0; g < H.size(); ++g) {
        const double d = dist(h, H.row(g), dom);
        for (std::size_t x = 0; x < n; ++x) {
            if (H.label(g, x) != h[x]) entry[x] = std::min(entry[x], d);
        }
    }
    std::vector<double> radii{eps};
    for (double r : entry) {
        if (std::isfinite(r) && r > eps) radii.push_back(r);
    }
    double best = 0.0;
    for (double r : radii) {
        double mass = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            if (entry[x] <= r + 1e-12) mass += dom.weight(x);
        }
        best = std::max(best, mass / r);
    }
    return best;
}

// theta by building each ball and testing every pair of members at every point.
inline double theta_literal(std::span<const Label> h, const HypothesisSpace& H, const Domain& dom, double eps) {
    std::vector<double> radii{eps};
    for (std::size_t g = 0; g < H.size(); ++g) {
        const double d = dist(h, H.row(g), dom);
        if (d > eps) radii.push_back(d);
    }
    double best = 0.0;
    for (double r : radii) {
        std::vector<std::size_t> ball;
        for (std::size_t g = 0; g < H.size(); ++g) {
            if (dist(h, H.row(g), dom) <= r + 1e-12) ball.push_back(g);
        }
        double mass = 0.0;
        for (std::size_t x = 0; x < dom.size(); ++x) {
            bool dis = false;
            for (std::size_t i = 0; i < ball.size() && !dis; ++i) {
                for (std::size_t j = i + 1; j < ball.size() && !dis; ++j) {
                    dis = H.label(ball[i], x) != H.label(ball[j], x);
                }
            }
            if (dis) mass += dom.weight(x);
        }
        best = std::max(best, mass / r);
    }
    return best;
}

inline double class_theta_entry(const HypothesisSpace& H, const Domain& dom, double eps) {
    double best = 0.0;
    for (std::size_t i = 0; i < H.size(); ++i) best = std::max(best, theta_entry(H.row(i), H, dom, eps));
    return best;
}

struct Split {
    std::size_t position;
    Label label;
    std::size_t max_count;
};

// Minimax over every (position, label) in the window, earliest position and
// smallest label winning ties.
inline Split splitter(const HypothesisSpace& V, const ccq::PairSet& Q, std::span<const std::uint32_t> points,
                      std::size_t cursor, std::size_t window) {
    Split best{0, 0, std::numeric_limits<std::size_t>::max()};
    for (std::size_t p = cursor; p < cursor + window; ++p) {
        std::size_t worst = 0;
        Label worst_y = 1;
        for (int y = 1; y <= V.k(); ++y) {
            std::size_t c = 0;
            for (const auto& pr : Q.pairs) {
                if (V.label(pr.first, points[p]) == y && V.label(pr.second, points[p]) == y) ++c;
            }
            if (c > worst) {
                worst = c;
                worst_y = static_cast<Label>(y);
            }
        }
        if (worst < best.max_count) best = {p, worst_y, worst};
    }
    return best;
}

// Largest rho in {c / |Q|} such that the points whose worst label keeps at most
// (1 - rho)|Q| pairs carry mass >= tau.
inline double best_rho(const HypothesisSpace& V, const Domain& dom, const ccq::PairSet& Q, double tau) {
    if (Q.empty()) return 1.0;
    const std::size_t q = Q.size();
    std::vector<std::size_t> worst(dom.size(), 0);
    for (std::size_t x = 0; x < dom.size(); ++x) {
        for (int y = 1; y <= V.k(); ++y) {
            std::size_t c = 0;
            for (const auto& pr : Q.pairs) {
                if (V.label(pr.first, x) == y && V.label(pr.second, x) == y) ++c;
            }
            worst[x] = std::max(worst[x], c);
        }
    }
    for (std::size_t c = q; c + 1 > 0; --c) {
        const double rho = static_cast<double>(c) / static_cast<double>(q);
        double mass = 0.0;
        for (std::size_t x = 0; x < dom.size(); ++x) {
            if (static_cast<double>(worst[x]) <= (1.0 - rho) * static_cast<double>(q) + 1e-9) mass += dom.weight(x);
        }
        if (mass >= tau - 1e-12) return rho;
    }
    return 0.0;
}

}  // namespace brute
