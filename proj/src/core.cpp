#include "ccq/core.hpp"

#include "ccq/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string_view>
#include <unordered_set>

namespace ccq {

Domain::Domain(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw Error("domain must have at least one point");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error("domain weights must be finite and nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error("domain weights must sum to 1");
    uniform_ = std::all_of(weights_.begin(), weights_.end(), [&](double w) { return w == weights_[0]; });
}

Domain Domain::uniform(std::size_t n) {
    if (n == 0) throw Error("domain must have at least one point");
    Domain d;
    d.weights_.assign(n, 1.0 / static_cast<double>(n));
    d.uniform_ = true;
    return d;
}

namespace {

struct RowHash {
    std::size_t n;
    const Label* base;
    std::size_t operator()(std::size_t i) const {
        return std::hash<std::string_view>{}(
            std::string_view(reinterpret_cast<const char*>(base + i * n), n));
    }
};

struct RowEq {
    std::size_t n;
    const Label* base;
    bool operator()(std::size_t a, std::size_t b) const {
        return std::equal(base + a * n, base + a * n + n, base + b * n);
    }
};

}  // namespace

HypothesisSpace::HypothesisSpace(int k, std::size_t n, std::vector<Label> flat, std::optional<int> natarajan_dim)
    : k_(k), n_(n), flat_(std::move(flat)), dim_(natarajan_dim) {
    if (k < 2 || k > kMaxLabels) throw Error("label count k must be in [2, 255]");
    if (n == 0) throw Error("hypotheses need a nonempty domain");
    if (flat_.empty() || flat_.size() % n != 0) throw Error("hypothesis space must be a nonempty |H| x n matrix");
    count_ = flat_.size() / n;
    for (Label y : flat_) {
        if (y < 1 || y > k) throw Error("label out of range 1..k");
    }
    std::unordered_set<std::size_t, RowHash, RowEq> seen(count_ * 2, RowHash{n_, flat_.data()},
                                                          RowEq{n_, flat_.data()});
    for (std::size_t i = 0; i < count_; ++i) {
        if (!seen.insert(i).second) throw Error("duplicate hypothesis at row " + std::to_string(i));
    }
}

static std::vector<Label> flatten(const std::vector<Hypothesis>& hs) {
    if (hs.empty()) throw Error("hypothesis space must be nonempty");
    const std::size_t n = hs.front().size();
    std::vector<Label> flat;
    flat.reserve(hs.size() * n);
    for (const auto& h : hs) {
        if (h.size() != n) throw Error("hypotheses must share one domain");
        flat.insert(flat.end(), h.labels.begin(), h.labels.end());
    }
    return flat;
}

HypothesisSpace::HypothesisSpace(int k, const std::vector<Hypothesis>& hs, std::optional<int> natarajan_dim)
    : HypothesisSpace(k, hs.empty() ? 0 : hs.front().size(), flatten(hs), natarajan_dim) {}

Hypothesis HypothesisSpace::hypothesis(std::size_t i) const {
    auto r = row(i);
    return Hypothesis{std::vector<Label>(r.begin(), r.end())};
}

HypothesisSpace HypothesisSpace::subset(std::span<const std::size_t> rows) const {
    std::vector<Label> flat;
    flat.reserve(rows.size() * n_);
    for (std::size_t r : rows) {
        auto x = row(r);
        flat.insert(flat.end(), x.begin(), x.end());
    }
    return HypothesisSpace(k_, n_, std::move(flat), std::nullopt);
}

std::optional<std::size_t> HypothesisSpace::find(std::span<const Label> h) const {
    if (h.size() != n_) return std::nullopt;
    for (std::size_t i = 0; i < count_; ++i) {
        auto r = row(i);
        if (std::equal(r.begin(), r.end(), h.begin())) return i;
    }
    return std::nullopt;
}

void LabeledSample::append(const LabeledSample& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

void LabeledSample::check_unique() const {
    std::vector<std::size_t> pos;
    pos.reserve(entries_.size());
    for (const auto& e : entries_) pos.push_back(e.position);
    std::sort(pos.begin(), pos.end());
    if (std::adjacent_find(pos.begin(), pos.end()) != pos.end()) throw Error("labeled sample repeats a position");
}

void LabeledSample::sort_by_position() {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.position < b.position; });
}

double empirical_error(std::span<const Label> h, const LabeledSample& sample,
                       std::span<const std::uint32_t> points) {
    if (sample.empty()) throw Error("empirical error of an empty sample is undefined");
    std::size_t wrong = 0;
    for (const auto& e : sample.entries()) {
        if (e.position >= points.size()) throw Error("sample position not in the drawn sequence");
        const std::uint32_t x = points[e.position];
        if (x >= h.size()) throw Error("sample point outside the hypothesis domain");
        wrong += h[x] != e.label;
    }
    return static_cast<double>(wrong) / static_cast<double>(sample.size());
}

double class_distance(std::span<const Label> h, std::span<const Label> g, const Domain& dom) {
    if (h.size() != dom.size() || g.size() != dom.size()) throw Error("class_distance: mismatched domains");
    return kernels::weighted_mismatch(h, g, dom);
}

Label plurality_vote(const HypothesisSpace& V, std::span<const std::size_t> alive, std::size_t x) {
    if (alive.empty()) throw Error("plurality vote of an empty set");
    std::vector<std::size_t> counts(static_cast<std::size_t>(V.k()) + 1, 0);
    for (std::size_t i : alive) ++counts[V.label(i, x)];
    Label best = 1;
    for (int y = 2; y <= V.k(); ++y) {
        if (counts[y] > counts[best]) best = static_cast<Label>(y);
    }
    return best;
}

Label plurality_vote(const HypothesisSpace& V, std::size_t x) {
    std::vector<std::size_t> all(V.size());
    std::iota(all.begin(), all.end(), 0);
    return plurality_vote(V, all, x);
}

Hypothesis plurality_hypothesis(const HypothesisSpace& V, std::span<const std::size_t> alive) {
    if (alive.empty()) throw Error("plurality vote of an empty set");
    const std::size_t n = V.domain_size();
    const std::size_t k = static_cast<std::size_t>(V.k());
    std::vector<std::uint32_t> counts(n * (k + 1), 0);
    for (std::size_t i : alive) {
        auto r = V.row(i);
        for (std::size_t x = 0; x < n; ++x) ++counts[x * (k + 1) + r[x]];
    }
    Hypothesis h;
    h.labels.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
        const std::uint32_t* c = counts.data() + x * (k + 1);
        Label best = 1;
        for (std::size_t y = 2; y <= k; ++y) {
            if (c[y] > c[best]) best = static_cast<Label>(y);
        }
        h.labels[x] = best;
    }
    return h;
}

Hypothesis plurality_hypothesis(const HypothesisSpace& V) {
    std::vector<std::size_t> all(V.size());
    std::iota(all.begin(), all.end(), 0);
    return plurality_hypothesis(V, all);
}

void check_same_domain(const HypothesisSpace& space, const Domain& dom) {
    if (space.domain_size() != dom.size()) throw Error("hypothesis space and domain sizes differ");
}

std::vector<std::size_t> greedy_cover_indices(const HypothesisSpace& space, const Domain& dom, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw Error("cover radius must be in (0, 1]");
    check_same_domain(space, dom);
    return kernels::greedy_cover_parallel(space, dom, eps);
}

HypothesisSpace epsilon_cover(const HypothesisSpace& space, const Domain& dom, double eps) {
    auto idx = greedy_cover_indices(space, dom, eps);
    return space.subset(idx);
}

namespace {

// cells: groups of hypotheses consistent with one choice per fixed point so far.
bool shatter_rec(const HypothesisSpace& s, std::span<const std::size_t> pts, std::size_t j,
                 const std::vector<std::vector<std::size_t>>& cells) {
    if (j == pts.size()) return true;
    const std::size_t x = pts[j];
    const int k = s.k();
    for (int b = 1; b <= k; ++b) {
        for (int c = b + 1; c <= k; ++c) {
            std::vector<std::vector<std::size_t>> next;
            next.reserve(cells.size() * 2);
            bool ok = true;
            for (const auto& cell : cells) {
                std::vector<std::size_t> hb, hc;
                for (std::size_t h : cell) {
                    const int y = s.label(h, x);
                    if (y == b) hb.push_back(h);
                    else if (y == c) hc.push_back(h);
                }
                if (hb.empty() || hc.empty()) {
                    ok = false;
                    break;
                }
                next.push_back(std::move(hb));
                next.push_back(std::move(hc));
            }
            if (ok && shatter_rec(s, pts, j + 1, next)) return true;
        }
    }
    return false;
}

bool some_set_shattered(const HypothesisSpace& s, std::size_t m) {
    const std::size_t n = s.domain_size();
    if (m > n) return false;
    std::vector<std::size_t> all(s.size());
    std::iota(all.begin(), all.end(), 0);
    const std::vector<std::vector<std::size_t>> root{all};
    std::vector<std::size_t> pts(m);
    std::iota(pts.begin(), pts.end(), 0);
    while (true) {
        if (shatter_rec(s, pts, 0, root)) return true;
        // next combination
        std::size_t i = m;
        while (i > 0 && pts[i - 1] == n - m + (i - 1)) --i;
        if (i == 0) return false;
        ++pts[i - 1];
        for (std::size_t j = i; j < m; ++j) pts[j] = pts[j - 1] + 1;
    }
}

}  // namespace

int natarajan_dimension(const HypothesisSpace& space, const Domain& dom, NatarajanGuard guard) {
    check_same_domain(space, dom);
    if (dom.size() > guard.max_domain || space.size() > guard.max_space) {
        throw Error("space too large for brute-force Natarajan dimension; supply the known dimension");
    }
    std::size_t m = 0;
    while (m < dom.size() && some_set_shattered(space, m + 1)) ++m;
    return static_cast<int>(m);
}

int dimension_of(const HypothesisSpace& space, const Domain& dom) {
    if (auto d = space.natarajan_dim()) return *d;
    return natarajan_dimension(space, dom);
}

}  // namespace ccq
