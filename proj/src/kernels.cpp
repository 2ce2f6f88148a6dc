#include "ccq/kernels.hpp"

#include <omp.h>

namespace ccq::kernels {

std::size_t mismatches(std::span<const Label> a, std::span<const Label> b) {
    std::size_t c = 0;
    const std::size_t n = a.size();
    const Label* pa = a.data();
    const Label* pb = b.data();
    for (std::size_t i = 0; i < n; ++i) c += pa[i] != pb[i];
    return c;
}

double weighted_mismatch(std::span<const Label> a, std::span<const Label> b, const Domain& dom) {
    if (dom.is_uniform()) {
        return static_cast<double>(mismatches(a, b)) / static_cast<double>(dom.size());
    }
    double s = 0.0;
    auto w = dom.weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) s += w[i];
    }
    return s;
}

void distances_serial(const HypothesisSpace& s, const Domain& dom, std::size_t center,
                      std::span<const std::size_t> targets, std::span<double> out) {
    auto c = s.row(center);
    for (std::size_t j = 0; j < targets.size(); ++j) out[j] = weighted_mismatch(c, s.row(targets[j]), dom);
}

void distances_parallel(const HypothesisSpace& s, const Domain& dom, std::size_t center,
                        std::span<const std::size_t> targets, std::span<double> out) {
    auto c = s.row(center);
    const auto m = static_cast<std::ptrdiff_t>(targets.size());
#pragma omp parallel for schedule(static) if (m > 256)
    for (std::ptrdiff_t j = 0; j < m; ++j) out[j] = weighted_mismatch(c, s.row(targets[j]), dom);
}

std::vector<double> pairwise_serial(const HypothesisSpace& s, const Domain& dom) {
    const std::size_t m = s.size();
    std::vector<double> d(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            d[i * m + j] = d[j * m + i] = weighted_mismatch(s.row(i), s.row(j), dom);
        }
    }
    return d;
}

std::vector<double> pairwise_parallel(const HypothesisSpace& s, const Domain& dom) {
    const std::size_t m = s.size();
    std::vector<double> d(m * m, 0.0);
    const auto mm = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < mm; ++i) {
        for (std::size_t j = static_cast<std::size_t>(i) + 1; j < m; ++j) {
            d[i * m + j] = d[j * m + i] = weighted_mismatch(s.row(i), s.row(j), dom);
        }
    }
    return d;
}

namespace {

template <class DistFn>
std::vector<std::size_t> greedy_cover_impl(const HypothesisSpace& s, double eps, DistFn dist) {
    std::vector<std::size_t> uncovered(s.size());
    for (std::size_t i = 0; i < uncovered.size(); ++i) uncovered[i] = i;
    std::vector<std::size_t> centers;
    std::vector<double> d;
    while (!uncovered.empty()) {
        const std::size_t c = uncovered.front();
        centers.push_back(c);
        d.resize(uncovered.size());
        dist(c, std::span<const std::size_t>(uncovered), std::span<double>(d));
        std::size_t w = 0;
        for (std::size_t j = 0; j < uncovered.size(); ++j) {
            if (d[j] > eps + kDistTol) uncovered[w++] = uncovered[j];
        }
        uncovered.resize(w);
    }
    return centers;
}

}  // namespace

std::vector<std::size_t> greedy_cover_serial(const HypothesisSpace& s, const Domain& dom, double eps) {
    return greedy_cover_impl(s, eps, [&](std::size_t c, std::span<const std::size_t> t, std::span<double> o) {
        distances_serial(s, dom, c, t, o);
    });
}

std::vector<std::size_t> greedy_cover_parallel(const HypothesisSpace& s, const Domain& dom, double eps) {
    return greedy_cover_impl(s, eps, [&](std::size_t c, std::span<const std::size_t> t, std::span<double> o) {
        distances_parallel(s, dom, c, t, o);
    });
}

}  // namespace ccq::kernels
