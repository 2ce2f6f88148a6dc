#include "ccq/splitting.hpp"

#include "ccq/agnostic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccq {

std::vector<std::size_t> pair_label_counts(const HypothesisSpace& V, const PairSet& Q, std::size_t x) {
    std::vector<std::size_t> c(static_cast<std::size_t>(V.k()) + 1, 0);
    for (const auto& [h, g] : Q.pairs) {
        const Label a = V.label(h, x);
        if (a == V.label(g, x)) ++c[a];
    }
    return c;
}

PairSet restrict_pairs(const HypothesisSpace& V, const PairSet& Q, std::size_t x, Label y) {
    PairSet out;
    for (const auto& pr : Q.pairs) {
        if (V.label(pr.first, x) == y && V.label(pr.second, x) == y) out.pairs.push_back(pr);
    }
    return out;
}

PairSet far_pairs(const HypothesisSpace& V, const Domain& dom, std::span<const std::size_t> alive, double delta) {
    PairSet Q;
    for (std::size_t i = 0; i < alive.size(); ++i) {
        for (std::size_t j = i + 1; j < alive.size(); ++j) {
            if (class_distance(V.row(alive[i]), V.row(alive[j]), dom) > delta) {
                auto a = static_cast<std::uint32_t>(std::min(alive[i], alive[j]));
                auto b = static_cast<std::uint32_t>(std::max(alive[i], alive[j]));
                Q.pairs.emplace_back(a, b);
            }
        }
    }
    return Q;
}

SplitterChoice select_splitter(const HypothesisSpace& V, const PairSet& Q, std::span<const std::uint32_t> points,
                               std::size_t cursor, std::size_t window) {
    if (Q.empty()) throw Error("select_splitter needs a nonempty pair set");
    if (window < 1) throw Error("select_splitter needs a window of at least one point");
    if (cursor + window > points.size()) throw Error("stream exhausted while selecting a splitter");
    SplitterChoice best;
    bool have = false;
    for (std::size_t p = cursor; p < cursor + window; ++p) {
        const auto c = pair_label_counts(V, Q, points[p]);
        Label arg = 1;
        for (std::size_t y = 2; y < c.size(); ++y) {
            if (c[y] > c[arg]) arg = static_cast<Label>(y);
        }
        if (!have || c[arg] < best.max_count) {
            best = {p, arg, c[arg]};
            have = true;
        }
    }
    return best;
}

void SplitCounters::add(const HypothesisSpace& V, std::span<const std::size_t> alive,
                        const std::vector<std::uint32_t>& xy_counts) {
    const std::size_t K = static_cast<std::size_t>(V.k()) + 1;
    std::vector<std::size_t> agree, other;
    for (std::size_t x = 0; x < V.domain_size(); ++x) {
        for (std::size_t y = 1; y < K; ++y) {
            const std::uint32_t c = xy_counts[x * K + y];
            if (c == 0) continue;
            agree.clear();
            other.clear();
            for (std::size_t h : alive) (V.label(h, x) == y ? agree : other).push_back(h);
            for (std::size_t h : other) {
                for (std::size_t g : agree) m_[h * n_ + g] += c;
            }
        }
    }
}

double elimination_threshold(std::uint64_t mhg, std::uint64_t mgh, int d, double eps0, double c_e) {
    const double L = d * std::log(1.0 / eps0);
    return c_e * (std::sqrt(static_cast<double>(std::max(mhg, mgh)) * L) + L);
}

std::vector<std::size_t> eliminate(std::span<const std::size_t> alive, const SplitCounters& M, int d, double eps0,
                                   double c_e) {
    std::vector<std::size_t> keep;
    for (std::size_t h : alive) {
        bool ok = true;
        for (std::size_t g : alive) {
            const double diff = static_cast<double>(M(h, g)) - static_cast<double>(M(g, h));
            if (diff > elimination_threshold(M(h, g), M(g, h), d, eps0, c_e)) {
                ok = false;
                break;
            }
        }
        if (ok) keep.push_back(h);
    }
    return keep;
}

Labeler label_request_labeler(Oracle& oracle) {
    return [&oracle](std::span<const std::size_t> pos, const Hypothesis&) -> std::optional<std::vector<Label>> {
        std::vector<Label> y;
        y.reserve(pos.size());
        for (std::size_t p : pos) y.push_back(oracle.answer_label_request(p));
        return y;
    };
}

Labeler ccq_labeler(Oracle& oracle, std::optional<std::size_t> budget) {
    return [&oracle, budget](std::span<const std::size_t> pos,
                             const Hypothesis& hint) -> std::optional<std::vector<Label>> {
        auto r = refining(oracle, pos, hint.labels, budget);
        if (!r.complete) return std::nullopt;
        r.L.sort_by_position();
        std::vector<Label> y;
        y.reserve(pos.size());
        for (const auto& e : r.L.entries()) y.push_back(e.label);
        return y;
    };
}

SplittingResult splitting_active_learn(Oracle& oracle, const HypothesisSpace& space, const Domain& dom, double eps,
                                       double tau, double alpha, double delta, const Labeler& labeler,
                                       const SplittingConfig& cfg) {
    if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) throw Error("splitting learner needs eps, delta in (0,1)");
    if (!(tau > 0.0 && tau < 1.0)) throw Error("splitting learner needs tau in (0,1)");
    if (!(alpha >= 0.0 && alpha < 0.5)) throw Error("splitting learner needs alpha in [0, 1/2)");
    check_same_domain(space, dom);
    SplittingResult res;
    const int d = std::max(1, cfg.dim ? *cfg.dim : dimension_of(space, dom));
    const double gap = (1.0 - 2.0 * alpha) * (1.0 - 2.0 * alpha);
    res.eps0 = cfg.eps0 ? *cfg.eps0 : cfg.c0 * gap * eps * tau * tau * delta / (static_cast<double>(d) * d * d);
    res.cover.emplace(epsilon_cover(space, dom, res.eps0));
    const HypothesisSpace& V = *res.cover;
    res.cover_size = V.size();
    res.repeats = static_cast<std::size_t>(std::ceil(cfg.c_s / gap * (d * std::log(1.0 / eps) + std::log(1.0 / delta))));
    res.repeats = std::max<std::size_t>(res.repeats, 1);
    const std::size_t window = static_cast<std::size_t>(std::ceil(1.0 / tau - 1e-12));
    const int Tmax = static_cast<int>(std::ceil(std::log2(2.0 / eps)));
    const std::size_t K = static_cast<std::size_t>(V.k()) + 1;

    std::vector<std::size_t> alive(V.size());
    std::iota(alive.begin(), alive.end(), 0);
    SplitCounters M(V.size());
    std::size_t cursor = 0;
    std::size_t outer = 0;
    std::vector<std::uint32_t> xy(V.domain_size() * K, 0);
    std::vector<std::size_t> S;

    auto fail = [&](std::string why) {
        res.failure = std::move(why);
        res.alive = alive;
        res.stream_used = cursor;
        return res;
    };

    for (int T = 1; T <= Tmax; ++T) {
        PairSet Q = far_pairs(V, dom, alive, std::ldexp(1.0, -T));
        SplittingEpoch ep;
        ep.T = T;
        ep.q_start = Q.size();
        while (!Q.empty()) {
            if (++outer > cfg.max_outer) return fail("outer iteration cap reached");
            ++ep.outer_iterations;
            S.clear();
            for (std::size_t r = 0; r < res.repeats; ++r) {
                PairSet Qt = Q;
                while (!Qt.empty()) {
                    if (cursor + window > oracle.data().size()) {
                        const std::size_t want = std::max(cursor + window, 2 * oracle.data().size());
                        oracle.ensure(std::min(want, oracle.data().capacity()));
                        if (cursor + window > oracle.data().size()) return fail("stream exhausted");
                    }
                    const auto ch = select_splitter(V, Qt, oracle.data().xs(), cursor, window);
                    cursor += window;
                    S.push_back(ch.position);
                    Qt = restrict_pairs(V, Qt, oracle.data().x(ch.position), ch.label);
                }
            }
            const auto labels = labeler(S, plurality_hypothesis(V, alive));
            if (!labels) return fail("labeler could not label the batch");
            if (labels->size() != S.size()) throw Error("labeler returned the wrong number of labels");
            std::fill(xy.begin(), xy.end(), 0);
            for (std::size_t i = 0; i < S.size(); ++i) ++xy[oracle.data().x(S[i]) * K + (*labels)[i]];
            M.add(V, alive, xy);
            res.labels += S.size();
            ep.labels += S.size();
            alive = eliminate(alive, M, d, res.eps0, cfg.c_e);
            if (alive.empty()) return fail("version space emptied");
            std::vector<char> live(V.size(), 0);
            for (std::size_t h : alive) live[h] = 1;
            std::erase_if(Q.pairs, [&](const auto& pr) { return !live[pr.first] || !live[pr.second]; });
        }
        ep.alive_end = alive.size();
        res.epochs.push_back(ep);
    }
    res.alive = alive;
    res.stream_used = cursor;
    res.h = V.hypothesis(alive.front());
    res.ok = true;
    return res;
}

}  // namespace ccq
