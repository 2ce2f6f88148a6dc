#include "ccq/agnostic.hpp"

#include "ccq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace ccq {

SampleCounts::SampleCounts(const LabeledSample& L, std::span<const std::uint32_t> points, std::size_t n, int k)
    : n_(n), k_(static_cast<std::size_t>(k)), c_(n * (static_cast<std::size_t>(k) + 1), 0) {
    for (const auto& e : L.entries()) {
        if (e.position >= points.size()) throw Error("sample position not in the drawn sequence");
        ++c_[points[e.position] * (k_ + 1) + e.label];
        ++total_;
    }
}

double SampleCounts::error(std::span<const Label> h) const {
    if (total_ == 0) throw Error("empirical error of an empty sample is undefined");
    std::size_t right = 0;
    for (std::size_t x = 0; x < n_; ++x) right += c_[x * (k_ + 1) + h[x]];
    return static_cast<double>(total_ - right) / static_cast<double>(total_);
}

std::size_t erm_index(const HypothesisSpace& space, const SampleCounts& counts) {
    std::size_t best = 0;
    double best_err = 2.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double e = counts.error(space.row(i));
        if (e < best_err) {
            best_err = e;
            best = i;
        }
    }
    return best;
}

namespace {

void require_sorted(std::span<const std::size_t> S) {
    for (std::size_t i = 1; i < S.size(); ++i) {
        if (S[i] <= S[i - 1]) throw Error("position set must be strictly increasing");
    }
}

// One Find-Mistake call over prebuilt per-label query sets (sets[y] for y = 1..k).
std::optional<LabeledSample::Entry> find_mistake_sets(Oracle& oracle, const std::vector<std::vector<std::size_t>>& sets) {
    const int k = oracle.k();
    for (int y = 1; y <= k; ++y) {
        const auto r = oracle.answer_ccq({static_cast<Label>(y), sets[y]});
        if (r.found) return LabeledSample::Entry{r.position, r.label};
    }
    return std::nullopt;
}

void build_sets(const Oracle& oracle, std::span<const std::size_t> S, std::span<const Label> h,
                std::vector<std::vector<std::size_t>>& sets) {
    const int k = oracle.k();
    sets.resize(static_cast<std::size_t>(k) + 1);
    for (auto& v : sets) v.clear();
    const auto& ds = oracle.data();
    for (std::size_t p : S) {
        const Label lab = h[ds.x(p)];
        for (int y = 1; y <= k; ++y) {
            if (lab != y) sets[y].push_back(p);
        }
    }
}

// s distinct indices from [0, m), ascending.
void sample_without_replacement(Rng& rng, std::size_t m, std::size_t s, std::vector<std::size_t>& out,
                                std::vector<std::size_t>& scratch) {
    out.clear();
    if (s * 2 > m) {
        scratch.resize(m);
        std::iota(scratch.begin(), scratch.end(), 0);
        for (std::size_t i = 0; i < s; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(below(rng, m - i));
            std::swap(scratch[i], scratch[j]);
        }
        out.assign(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(s));
    } else {
        // Floyd's algorithm
        for (std::size_t j = m - s; j < m; ++j) {
            const std::size_t t = static_cast<std::size_t>(below(rng, j + 1));
            if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
            else out.push_back(j);
        }
    }
    std::sort(out.begin(), out.end());
}

}  // namespace

std::optional<LabeledSample::Entry> find_mistake(Oracle& oracle, std::span<const std::size_t> S,
                                                 std::span<const Label> h) {
    if (S.empty()) throw Error("find_mistake needs a nonempty set");
    require_sorted(S);
    thread_local std::vector<std::vector<std::size_t>> sets;
    build_sets(oracle, S, h, sets);
    return find_mistake_sets(oracle, sets);
}

std::size_t halving_draws(std::size_t cover_size, double delta, double c_halving, std::size_t n_min) {
    const double lg = std::max(1.0, std::log2(static_cast<double>(cover_size)));
    const double n = std::ceil(c_halving * std::log(4.0 * lg / delta));
    return std::max<std::size_t>(n_min, n > 0 ? static_cast<std::size_t>(n) : 1);
}

HalvingResult generalized_halving(Oracle& oracle, std::span<const std::size_t> U, const HypothesisSpace& V,
                                  const HalvingConfig& cfg, Rng& rng) {
    if (cfg.s < 1 || cfg.N < 1) throw Error("halving needs s >= 1 and N >= 1");
    if (U.size() < cfg.s) throw Error("halving needs |U| >= s");
    if (V.size() == 0) throw Error("halving needs a nonempty V");
    require_sorted(U);
    const auto& ds = oracle.data();
    const int k = V.k();
    const std::size_t N = cfg.N;

    HalvingResult res;
    res.alive.resize(V.size());
    std::iota(res.alive.begin(), res.alive.end(), 0);
    const bool whole = cfg.s == U.size();  // every S_i is U itself

    std::vector<std::size_t> idx, scratch, S;
    std::vector<std::vector<std::size_t>> sets;
    std::vector<LabeledSample::Entry> returned;
    std::vector<std::uint32_t> cnt(ds.domain_size() * (static_cast<std::size_t>(k) + 1));

    while (!cfg.budget || res.t + N <= *cfg.budget) {
        const Hypothesis plur = plurality_hypothesis(V, res.alive);
        returned.clear();
        if (whole) {
            build_sets(oracle, U, plur.labels, sets);
            for (std::size_t i = 0; i < N; ++i) {
                ++res.fm_calls;
                if (auto m = find_mistake_sets(oracle, sets)) returned.push_back(*m);
            }
        } else {
            for (std::size_t i = 0; i < N; ++i) {
                sample_without_replacement(rng, U.size(), cfg.s, idx, scratch);
                S.clear();
                for (std::size_t j : idx) S.push_back(U[j]);
                build_sets(oracle, S, plur.labels, sets);
                ++res.fm_calls;
                if (auto m = find_mistake_sets(oracle, sets)) returned.push_back(*m);
            }
        }
        HalvingRound round;
        round.size_before = res.alive.size();
        round.mistake_sets = returned.size();
        round.triggered = 3 * returned.size() > N;
        round.plur = plur;
        if (!round.triggered) {
            res.rounds.push_back(round);
            res.plur = plur;
            return res;
        }
        // mistakes of h on the returned multiset, via (point, label) counts
        std::vector<std::pair<std::uint32_t, Label>> keys;
        for (const auto& e : returned) {
            const std::uint32_t x = ds.x(e.position);
            if (cnt[x * (k + 1) + e.label]++ == 0) keys.emplace_back(x, e.label);
        }
        std::vector<std::size_t> keep;
        keep.reserve(res.alive.size());
        for (std::size_t h : res.alive) {
            auto row = V.row(h);
            std::size_t wrong = 0;
            for (const auto& [x, y] : keys) {
                if (row[x] != y) wrong += cnt[x * (k + 1) + y];
            }
            if (9 * wrong <= N) keep.push_back(h);
        }
        for (const auto& [x, y] : keys) cnt[x * (k + 1) + y] = 0;
        round.removed = res.alive.size() - keep.size();
        res.rounds.push_back(round);
        res.alive = std::move(keep);
        res.t += N;
        if (res.alive.empty()) {
            res.emptied = true;
            return res;
        }
    }
    res.plur = plurality_hypothesis(V, res.alive);
    return res;
}

RefineResult refining(Oracle& oracle, std::span<const std::size_t> U, std::span<const Label> h,
                      std::optional<std::size_t> budget) {
    require_sorted(U);
    const auto& ds = oracle.data();
    const int k = oracle.k();
    RefineResult res;
    // sets[y] tracks {x in W : h(x) != y}; W shrinks by one found mistake at a time
    std::vector<std::vector<std::size_t>> sets;
    build_sets(oracle, U, h, sets);
    std::vector<std::size_t> found;
    std::size_t t = 0;
    while (!budget || t < *budget) {
        ++t;
        ++res.fm_calls;
        auto m = find_mistake_sets(oracle, sets);
        if (!m) {
            std::sort(found.begin(), found.end());
            for (std::size_t p : U) {
                if (!std::binary_search(found.begin(), found.end(), p)) res.L.add(p, h[ds.x(p)]);
            }
            res.complete = true;
            return res;
        }
        res.L.add(m->position, m->label);
        ++res.mistakes;
        found.push_back(m->position);
        const Label hl = h[ds.x(m->position)];
        for (int y = 1; y <= k; ++y) {
            if (hl == y) continue;
            auto& v = sets[y];
            auto it = std::lower_bound(v.begin(), v.end(), m->position);
            if (it != v.end() && *it == m->position) v.erase(it);
        }
    }
    return res;
}

RefineResult chunked_refining(Oracle& oracle, std::span<const std::size_t> U, std::span<const Label> h,
                              std::size_t chunk_size, std::optional<std::size_t> budget) {
    if (chunk_size < 1) throw Error("chunk size must be at least 1");
    RefineResult res;
    res.complete = true;
    for (std::size_t start = 0; start < U.size(); start += chunk_size) {
        const std::size_t len = std::min(chunk_size, U.size() - start);
        std::optional<std::size_t> left;
        if (budget) left = *budget - std::min(*budget, res.fm_calls);
        auto part = refining(oracle, U.subspan(start, len), h, left);
        res.L.append(part.L);
        res.fm_calls += part.fm_calls;
        res.mistakes += part.mistakes;
        if (!part.complete) {
            res.complete = false;
            return res;
        }
    }
    return res;
}

std::size_t agnostic_sample_size(double c_u, int d, int k, double beta, double eps, double delta) {
    const double u = std::ceil(c_u * d * ((beta + eps) / (eps * eps)) * std::log(k / (eps * delta)));
    if (!(u >= 1.0)) return 1;
    if (u > 4e9) throw Error("passive sample size too large");
    return static_cast<std::size_t>(u);
}

AgnosticResult agnostic_learn(Oracle& oracle, const HypothesisSpace& space, const Domain& dom, double beta,
                              double eps, double delta, const AgnosticConfig& cfg, const HypothesisSpace* cover) {
    if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) || !(beta >= 0.0)) {
        throw Error("agnostic_learn needs eps, delta in (0,1) and beta >= 0");
    }
    check_same_domain(space, dom);
    if (oracle.data().domain_size() != dom.size()) throw Error("data set and domain sizes differ");
    AgnosticResult res;
    res.regime_warning = beta + eps > 1.0 / 32.0;

    std::optional<HypothesisSpace> own;
    if (!cover) {
        own.emplace(epsilon_cover(space, dom, std::min(1.0, cfg.cover_factor * eps)));
        cover = &*own;
    }
    const HypothesisSpace& V = *cover;
    res.cover_size = V.size();
    const int d = cfg.dim ? *cfg.dim : dimension_of(space, dom);

    res.u = agnostic_sample_size(cfg.c_u, std::max(1, d), space.k(), beta, eps, delta);
    if (!oracle.ensure(res.u)) {
        res.failure = "stream exhausted: need " + std::to_string(res.u) + " points";
        return res;
    }
    std::vector<std::size_t> U(res.u);
    std::iota(U.begin(), U.end(), 0);

    double s_raw;
    if (cfg.rule == SetSizeRule::BetaOnly) s_raw = beta > 0.0 ? std::floor(1.0 / (16.0 * beta)) : static_cast<double>(U.size());
    else s_raw = std::floor(1.0 / (16.0 * (beta + eps)));
    res.s = static_cast<std::size_t>(std::min<double>(s_raw, static_cast<double>(U.size())));
    res.N = halving_draws(V.size(), delta, cfg.c_halving, cfg.n_min);

    std::optional<std::size_t> half;
    if (cfg.budget) half = *cfg.budget / 2;

    Hypothesis h;
    if (res.s == 0) {
        // empty sets can never reveal a mistake, so Phase 1 would stop at once
        res.phase1_skipped = true;
        h = plurality_hypothesis(V);
    } else {
        QueryLedger::Scope scope(oracle.ledger(), "phase1");
        Rng rng(cfg.seed);
        HalvingConfig hc{res.s, res.N, half};
        res.halving = generalized_halving(oracle, U, V, hc, rng);
        if (res.halving.emptied) {
            res.failure = "phase 1 removed every hypothesis";
            return res;
        }
        h = res.halving.plur;
    }
    {
        QueryLedger::Scope scope(oracle.ledger(), "phase2");
        res.refine = cfg.chunk_size ? chunked_refining(oracle, U, h.labels, cfg.chunk_size, half)
                                    : refining(oracle, U, h.labels, half);
    }
    if (!res.refine.complete) {
        res.failure = "phase 2 budget exhausted before labeling U";
        return res;
    }
    SampleCounts counts(res.refine.L, oracle.data().xs(), dom.size(), space.k());
    res.cover_index = erm_index(V, counts);
    res.h = V.hypothesis(res.cover_index);
    res.ok = true;
    return res;
}

double adaptive_radius(int d, std::size_t L_size, int j, double delta, double emp_err) {
    const double L = static_cast<double>(L_size);
    const double lg = std::log(12.0 * L * static_cast<double>(j) * j / delta);
    return 8.0 * d / L * lg + std::sqrt(emp_err * 16.0 * d / L * lg);
}

double adaptive_cover_radius(double eps, const AdaptiveAgnosticConfig& cfg) {
    return std::min(1.0, cfg.base.cover_factor * eps * cfg.inner_eps_factor);
}

AdaptiveAgnosticResult adaptive_agnostic(Oracle& oracle, const HypothesisSpace& space, const Domain& dom,
                                         double eps, double delta, const AdaptiveAgnosticConfig& cfg) {
    if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) throw Error("adaptive_agnostic needs eps, delta in (0,1)");
    check_same_domain(space, dom);
    AdaptiveAgnosticResult res;
    const int I = std::max(1, static_cast<int>(std::floor(std::log2(1.0 / eps))));
    const double delta_i = delta / (8.0 * I);
    const double eps_in = eps * cfg.inner_eps_factor;
    const int d = cfg.base.dim ? *cfg.base.dim : dimension_of(space, dom);
    std::optional<HypothesisSpace> own;
    if (!cfg.cover) own.emplace(epsilon_cover(space, dom, adaptive_cover_radius(eps, cfg)));
    const HypothesisSpace& cover = cfg.cover ? *cfg.cover : *own;

    for (int j = 1; j <= cfg.max_j; ++j) {
        const std::size_t n_j = std::size_t{1} << std::min(j, 62);
        const std::size_t per_i = n_j / static_cast<std::size_t>(I);
        AdaptiveStep step;
        step.j = j;
        std::optional<AgnosticResult> pick;
        bool any_ran = false;
        for (int i = 1; i <= I; ++i) {
            const double eta_i = std::ldexp(1.0, 1 - i);
            AgnosticConfig c = cfg.base;
            c.dim = d;
            c.budget = per_i;
            c.chunk_size = cfg.chunk_inner ? static_cast<std::size_t>(std::ceil(1.0 / (eta_i + eps_in))) : 0;
            c.seed = derive_seed(cfg.base.seed, {static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i)});
            auto r = agnostic_learn(oracle, space, dom, eta_i, eps_in, delta_i, c, &cover);
            if (r.u <= oracle.data().capacity()) any_ran = true;
            if (r.ok && !pick) {
                step.i_hat = i;
                pick = std::move(r);
            }
        }
        if (!any_ran) {
            res.failure = "stream exhausted before any inner run could start";
            res.trace.push_back(step);
            return res;
        }
        if (pick) {
            const auto& L = pick->refine.L;
            SampleCounts counts(L, oracle.data().xs(), dom.size(), space.k());
            const double e_hat = counts.error(pick->h.labels);
            double e_min = e_hat;
            for (std::size_t r = 0; r < space.size(); ++r) e_min = std::min(e_min, counts.error(space.row(r)));
            step.L_size = L.size();
            step.regret = e_hat - e_min;
            step.calE = adaptive_radius(d, L.size(), j, delta, e_hat);
        }
        step.ccq_after = oracle.ledger().ccq_count();
        res.trace.push_back(step);
        if (pick && step.regret + step.calE <= eps) {
            res.ok = true;
            res.h = pick->h;
            res.j_hat = j;
            res.i_hat = step.i_hat;
            return res;
        }
    }
    res.failure = "no budget up to 2^max_j met the stopping rule";
    return res;
}

}  // namespace ccq
