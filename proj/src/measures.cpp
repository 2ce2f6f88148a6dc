#include "ccq/measures.hpp"

#include "ccq/kernels.hpp"
#include "ccq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccq {

using kernels::kDistTol;

Ball ball(const HypothesisSpace& space, const Domain& dom, std::span<const Label> center, double radius) {
    check_same_domain(space, dom);
    if (center.size() != space.domain_size()) throw Error("center is defined on a different domain");
    Ball b;
    b.center.assign(center.begin(), center.end());
    b.radius = radius;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (kernels::weighted_mismatch(center, space.row(i), dom) <= radius + kDistTol) b.members.push_back(i);
    }
    return b;
}

Region disagreement_region(const HypothesisSpace& space, std::span<const std::size_t> rows, const Domain& dom) {
    check_same_domain(space, dom);
    if (rows.empty()) throw Error("disagreement region of an empty set");
    Region r;
    std::vector<char> mark(space.domain_size(), 0);
    auto ref = space.row(rows[0]);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        auto g = space.row(rows[i]);
        for (std::size_t x = 0; x < mark.size(); ++x) mark[x] |= g[x] != ref[x];
    }
    for (std::size_t x = 0; x < mark.size(); ++x) {
        if (mark[x]) {
            r.points.push_back(static_cast<std::uint32_t>(x));
            r.mass += dom.weight(x);
        }
    }
    return r;
}

Region disagreement_region(const HypothesisSpace& space, const Domain& dom) {
    std::vector<std::size_t> all(space.size());
    std::iota(all.begin(), all.end(), 0);
    return disagreement_region(space, all, dom);
}

double disagreement_coefficient(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom,
                                double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error("disagreement coefficient needs eps in (0,1)");
    check_same_domain(space, dom);
    const std::size_t m = space.size();
    const std::size_t n = space.domain_size();
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) d[i] = kernels::weighted_mismatch(h, space.row(i), dom);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    // DIS of a set is the union of disagreements with any one fixed member
    std::vector<char> mark(n, 0);
    double mass = 0.0;
    std::span<const Label> ref;
    auto add = [&](std::size_t g) {
        auto row = space.row(g);
        if (ref.empty()) {
            ref = row;
            return;
        }
        for (std::size_t x = 0; x < n; ++x) {
            if (!mark[x] && row[x] != ref[x]) {
                mark[x] = 1;
                mass += dom.weight(x);
            }
        }
    };
    std::size_t i = 0;
    while (i < m && d[order[i]] <= eps + kDistTol) add(order[i++]);
    double theta = mass / eps;
    while (i < m) {
        const double r = d[order[i]];
        while (i < m && d[order[i]] <= r + kDistTol) add(order[i++]);
        theta = std::max(theta, mass / r);
    }
    return theta;
}

ThetaResult class_disagreement_coefficient_serial(const HypothesisSpace& space, const Domain& dom, double eps) {
    ThetaResult best;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double t = disagreement_coefficient(space.row(i), space, dom, eps);
        if (t > best.theta) best = {t, i};
    }
    return best;
}

ThetaResult class_disagreement_coefficient_parallel(const HypothesisSpace& space, const Domain& dom, double eps) {
    std::vector<double> t(space.size());
    const auto m = static_cast<std::ptrdiff_t>(space.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < m; ++i) t[i] = disagreement_coefficient(space.row(i), space, dom, eps);
    ThetaResult best;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] > best.theta) best = {t[i], i};
    }
    return best;
}

bool rho_splits(const HypothesisSpace& V, std::size_t x, const PairSet& Q, double rho) {
    if (Q.empty()) throw Error("rho_splits needs a nonempty pair set");
    if (!(rho >= 0.0 && rho <= 1.0)) throw Error("rho must be in [0,1]");
    const auto c = pair_label_counts(V, Q, x);
    const std::size_t mx = *std::max_element(c.begin(), c.end());
    return static_cast<double>(mx) <= (1.0 - rho) * static_cast<double>(Q.size()) + kDistTol;
}

namespace {

// max_y |Q_x^y| for every x
std::vector<std::uint32_t> max_counts(const HypothesisSpace& V, const PairSet& Q) {
    const std::size_t n = V.domain_size();
    const std::size_t K = static_cast<std::size_t>(V.k()) + 1;
    std::vector<std::uint32_t> c(n * K, 0);
    for (const auto& [a, b] : Q.pairs) {
        auto ra = V.row(a);
        auto rb = V.row(b);
        for (std::size_t x = 0; x < n; ++x) {
            if (ra[x] == rb[x]) ++c[x * K + ra[x]];
        }
    }
    std::vector<std::uint32_t> mx(n, 0);
    for (std::size_t x = 0; x < n; ++x) mx[x] = *std::max_element(c.begin() + x * K, c.begin() + (x + 1) * K);
    return mx;
}

double split_mass(const std::vector<std::uint32_t>& mx, std::size_t q, const Domain& dom, double rho) {
    double m = 0.0;
    const double cap = (1.0 - rho) * static_cast<double>(q) + kDistTol;
    for (std::size_t x = 0; x < mx.size(); ++x) {
        if (static_cast<double>(mx[x]) <= cap) m += dom.weight(x);
    }
    return m;
}

double quantile_rho(const std::vector<std::uint32_t>& mx, std::size_t q, const Domain& dom, double tau) {
    std::vector<std::size_t> order(mx.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mx[a] < mx[b]; });
    double cum = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        cum += dom.weight(order[i]);
        // include every point tied with this one before testing
        if (i + 1 < order.size() && mx[order[i + 1]] == mx[order[i]]) continue;
        if (cum >= tau - kDistTol) return 1.0 - static_cast<double>(mx[order[i]]) / static_cast<double>(q);
    }
    return 0.0;
}

PairSet pairs_from(const std::vector<double>& pd, std::size_t m, const std::vector<double>& dh, double delta,
                   const SplitGuard& guard) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < m; ++i) {
        if (dh[i] <= 4.0 * delta + kDistTol) members.push_back(i);
    }
    PairSet Q;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            if (pd[members[i] * m + members[j]] > delta + kDistTol) {
                if (Q.pairs.size() >= guard.max_pairs) throw Error("pair guard exceeded while enumerating Q");
                Q.pairs.emplace_back(static_cast<std::uint32_t>(members[i]), static_cast<std::uint32_t>(members[j]));
            }
        }
    }
    return Q;
}

struct ScaleData {
    std::vector<double> scales;
    std::vector<double> pd;
    std::vector<double> dh;
};

ScaleData scale_data(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error("splitting index needs eps in (0,1)");
    check_same_domain(space, dom);
    if (h.size() != space.domain_size()) throw Error("h is defined on a different domain");
    ScaleData s;
    const std::size_t m = space.size();
    s.pd = kernels::pairwise_parallel(space, dom);
    s.dh.resize(m);
    for (std::size_t i = 0; i < m; ++i) s.dh[i] = kernels::weighted_mismatch(h, space.row(i), dom);
    std::vector<double> c;
    c.push_back(eps / 2.0);
    for (std::size_t i = 0; i < m; ++i) {
        c.push_back(s.dh[i] / 4.0);
        for (std::size_t j = i + 1; j < m; ++j) c.push_back(s.pd[i * m + j]);
    }
    std::sort(c.begin(), c.end());
    for (double v : c) {
        if (v < eps / 2.0 - kDistTol) continue;
        if (!s.scales.empty() && v <= s.scales.back() + kDistTol) continue;
        s.scales.push_back(v);
    }
    return s;
}

}  // namespace

std::vector<double> splitting_scales(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom,
                                     double eps) {
    return scale_data(h, space, dom, eps).scales;
}

PairSet maximal_pairs(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom, double delta,
                      SplitGuard guard) {
    check_same_domain(space, dom);
    const std::size_t m = space.size();
    auto pd = kernels::pairwise_serial(space, dom);
    std::vector<double> dh(m);
    for (std::size_t i = 0; i < m; ++i) dh[i] = kernels::weighted_mismatch(h, space.row(i), dom);
    return pairs_from(pd, m, dh, delta, guard);
}

bool splittable(const HypothesisSpace& space, const Domain& dom, const PairSet& Q, double rho, double tau) {
    if (Q.empty()) return true;
    return split_mass(max_counts(space, Q), Q.size(), dom, rho) >= tau - kDistTol;
}

double best_rho(const HypothesisSpace& space, const Domain& dom, const PairSet& Q, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw Error("tau must be in (0,1)");
    if (Q.empty()) return 1.0;
    return quantile_rho(max_counts(space, Q), Q.size(), dom, tau);
}

double splitting_index(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom, double tau,
                       double eps, double resolution, SplitGuard guard) {
    if (!(tau > 0.0 && tau < 1.0)) throw Error("tau must be in (0,1)");
    if (!(resolution > 0.0 && resolution <= 1.0)) throw Error("resolution must be in (0,1]");
    const auto sd = scale_data(h, space, dom, eps);
    const std::size_t m = space.size();
    const auto L = static_cast<std::ptrdiff_t>(sd.scales.size());
    std::vector<std::vector<std::uint32_t>> mx(sd.scales.size());
    std::vector<std::size_t> qs(sd.scales.size());
    bool guard_hit = false;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < L; ++i) {
        try {
            const PairSet Q = pairs_from(sd.pd, m, sd.dh, sd.scales[i], guard);
            qs[i] = Q.size();
            if (!Q.empty()) mx[i] = max_counts(space, Q);
        } catch (const Error&) {
#pragma omp atomic write
            guard_hit = true;
        }
    }
    if (guard_hit) throw Error("pair guard exceeded while enumerating Q");
    auto ok = [&](double rho) {
        for (std::size_t i = 0; i < qs.size(); ++i) {
            if (qs[i] > 0 && split_mass(mx[i], qs[i], dom, rho) < tau - kDistTol) return false;
        }
        return true;
    };
    const auto J = static_cast<long long>(std::floor(1.0 / resolution + 1e-9));
    long long lo = 0, hi = J;  // ok(lo * res) holds; search the largest such grid point
    if (ok(std::min(1.0, static_cast<double>(J) * resolution))) return std::min(1.0, static_cast<double>(J) * resolution);
    while (hi - lo > 1) {
        const long long mid = (lo + hi) / 2;
        if (ok(static_cast<double>(mid) * resolution)) lo = mid;
        else hi = mid;
    }
    return static_cast<double>(lo) * resolution;
}

double splitting_index_exact(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom, double tau,
                             double eps, SplitGuard guard) {
    if (!(tau > 0.0 && tau < 1.0)) throw Error("tau must be in (0,1)");
    const auto sd = scale_data(h, space, dom, eps);
    double rho = 1.0;
    for (double delta : sd.scales) {
        const PairSet Q = pairs_from(sd.pd, space.size(), sd.dh, delta, guard);
        if (!Q.empty()) rho = std::min(rho, quantile_rho(max_counts(space, Q), Q.size(), dom, tau));
    }
    return rho;
}

double class_splitting_index(const HypothesisSpace& space, const Domain& dom, double tau, double eps,
                             double resolution, SplitGuard guard) {
    double rho = 1.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        rho = std::min(rho, splitting_index(space.row(i), space, dom, tau, eps, resolution, guard));
    }
    return rho;
}

SubsetCheck spot_check_subsets(std::span<const Label> h, const HypothesisSpace& space, const Domain& dom, double tau,
                               double eps, double rho, std::span<const std::size_t> sizes, std::size_t per_size,
                               std::uint64_t seed) {
    const auto sd = scale_data(h, space, dom, eps);
    Rng rng(seed);
    SubsetCheck out;
    for (double delta : sd.scales) {
        const PairSet Q = pairs_from(sd.pd, space.size(), sd.dh, delta, SplitGuard{});
        for (std::size_t sz : sizes) {
            if (sz == 0 || sz > Q.size()) continue;
            for (std::size_t t = 0; t < per_size; ++t) {
                std::vector<std::size_t> idx(Q.size());
                std::iota(idx.begin(), idx.end(), 0);
                PairSet sub;
                for (std::size_t i = 0; i < sz; ++i) {
                    const std::size_t j = i + static_cast<std::size_t>(below(rng, idx.size() - i));
                    std::swap(idx[i], idx[j]);
                    sub.pairs.push_back(Q.pairs[idx[i]]);
                }
                ++out.checks;
                if (!splittable(space, dom, sub, rho, tau)) ++out.violations;
            }
        }
    }
    return out;
}

}  // namespace ccq
