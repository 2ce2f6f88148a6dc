#include "ccq/bounded_noise.hpp"

#include "ccq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccq {

namespace {

std::vector<char> dis_region(const HypothesisSpace& V, std::span<const std::size_t> alive) {
    std::vector<char> r(V.domain_size(), 0);
    if (alive.empty()) return r;
    auto first = V.row(alive[0]);
    for (std::size_t i = 1; i < alive.size(); ++i) {
        auto row = V.row(alive[i]);
        for (std::size_t x = 0; x < r.size(); ++x) r[x] |= row[x] != first[x];
    }
    return r;
}

double mass_of(const std::vector<char>& region, const Domain& dom) {
    double m = 0.0;
    for (std::size_t x = 0; x < region.size(); ++x) {
        if (region[x]) m += dom.weight(x);
    }
    return m;
}

}  // namespace

DisagreementBatchLearner::DisagreementBatchLearner(const HypothesisSpace& space, const Domain& dom, double eps,
                                                   double delta, double alpha, const DisagreementConfig& cfg)
    : cover_(epsilon_cover(space, dom, cfg.cover_factor * eps)), dom_(dom), eps_(eps), delta_(delta), cfg_(cfg) {
    if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) throw Error("learner needs eps, delta in (0,1)");
    if (!(alpha >= 0.0 && alpha < 0.5)) throw Error("learner needs alpha in [0, 1/2)");
    if (cfg.max_batches < 1) throw Error("max_batches must be positive");
    alive_.resize(cover_.size());
    std::iota(alive_.begin(), alive_.end(), 0);
    const int d = std::max(1, cfg.dim ? *cfg.dim : dimension_of(space, dom));
    max_epochs_ = static_cast<std::size_t>(std::ceil(std::log2(2.0 / eps)));
    const double rounds = static_cast<double>(max_epochs_ * cfg.max_batches);
    const double gap = (1.0 - 2.0 * alpha) * (1.0 - 2.0 * alpha);
    m0_ = static_cast<std::size_t>(std::ceil(cfg.c_m / gap * (d * std::log(1.0 / eps) + std::log(rounds / delta))));
    m0_ = std::max<std::size_t>(m0_, 1);
    log_term_ = std::log(4.0 * static_cast<double>(cover_.size()) * rounds / delta);
}

double DisagreementBatchLearner::dis_mass() const { return mass_of(dis_region(cover_, alive_), dom_); }

double DisagreementBatchLearner::diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < alive_.size(); ++i) {
        for (std::size_t j = i + 1; j < alive_.size(); ++j) {
            best = std::max(best, class_distance(cover_.row(alive_[i]), cover_.row(alive_[j]), dom_));
        }
    }
    return best;
}

void DisagreementBatchLearner::start_epoch() {
    region_ = dis_region(cover_, alive_);
    p_ = mass_of(region_, dom_);
    counts_.assign(cover_.domain_size() * (static_cast<std::size_t>(cover_.k()) + 1), 0);
    n_ = 0;
    next_m_ = m0_;
    batch_in_epoch_ = 0;
    ++epochs_;
}

BatchState DisagreementBatchLearner::state(bool more) const {
    BatchState s;
    s.h = cover_.hypothesis(best_);
    s.failure = failure_;
    s.more = more && failure_.empty();
    if (s.more) {
        s.region = region_;
        s.region_mass = p_;
        s.m = next_m_;
    }
    return s;
}

BatchState DisagreementBatchLearner::initialize() {
    best_ = alive_.front();
    start_epoch();
    const bool done = p_ <= eps_ / 2.0 || diameter() <= eps_ / 2.0;
    return state(!done);
}

BatchState DisagreementBatchLearner::update(std::span<const LabeledPoint> batch) {
    if (!failure_.empty()) return state(false);
    const std::size_t K = static_cast<std::size_t>(cover_.k()) + 1;
    for (const auto& e : batch) {
        if (e.x >= region_.size() || !region_[e.x]) throw Error("batch point outside the requested region");
        if (e.y < 1 || e.y > cover_.k()) throw Error("batch label out of range");
        ++counts_[e.x * K + e.y];
    }
    n_ += batch.size();
    ++batches_;
    ++batch_in_epoch_;
    if (n_ == 0) {
        failure_ = "empty batch";
        return state(false);
    }

    std::vector<std::size_t> wrong(alive_.size(), 0);
    std::size_t lo = n_;
    for (std::size_t i = 0; i < alive_.size(); ++i) {
        auto row = cover_.row(alive_[i]);
        std::size_t right = 0;
        for (std::size_t x = 0; x < region_.size(); ++x) {
            if (region_[x]) right += counts_[x * K + row[x]];
        }
        wrong[i] = n_ - right;
        lo = std::min(lo, wrong[i]);
    }
    const double radius = std::sqrt(log_term_ / (2.0 * static_cast<double>(n_)));
    const double thr = 2.0 * radius;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < alive_.size(); ++i) {
        const double gap = static_cast<double>(wrong[i] - lo) / static_cast<double>(n_);
        if (gap <= thr) keep.push_back(alive_[i]);
    }
    for (std::size_t i = 0; i < alive_.size(); ++i) {
        if (wrong[i] == lo) {
            best_ = alive_[i];
            break;
        }
    }
    alive_ = std::move(keep);
    if (alive_.empty()) {
        failure_ = "version space emptied";
        return state(false);
    }

    const double cur = dis_mass();
    // the empirical minimiser is within p * 2 * radius of the best survivor
    if (cur <= eps_ / 2.0 || p_ * thr <= eps_ / 2.0 || diameter() <= eps_ / 2.0) return state(false);
    if (cur <= p_ / 2.0) {
        start_epoch();
        return state(true);
    }
    if (batch_in_epoch_ >= cfg_.max_batches) {
        failure_ = "batch cap reached without halving the disagreement mass";
        return state(false);
    }
    next_m_ = n_;
    return state(true);
}

double default_delta_prime(double delta, double eps, double alpha, int d) {
    const double g = 1.0 - 2.0 * alpha;
    return delta * eps * eps * g * g / (64.0 * std::max(1, d));
}

namespace {

// Collect the first `need` positions at or after `t` whose point lies in `region`.
bool collect(Oracle& oracle, const std::vector<char>& region, std::size_t& t, std::size_t need,
             std::vector<std::size_t>& out) {
    out.clear();
    out.reserve(need);
    while (out.size() < need) {
        if (t >= oracle.data().size()) {
            const std::size_t want = std::max<std::size_t>(t + 1, 2 * oracle.data().size());
            if (!oracle.ensure(std::min(want, oracle.data().capacity())) || t >= oracle.data().size()) return false;
        }
        const auto& ds = oracle.data();
        const std::size_t end = ds.size();
        for (; t < end && out.size() < need; ++t) {
            if (region[ds.x(t)]) out.push_back(t);
        }
    }
    return true;
}

std::vector<LabeledPoint> to_points(const Oracle& oracle, const LabeledSample& L) {
    std::vector<LabeledPoint> b;
    b.reserve(L.size());
    for (const auto& e : L.entries()) b.push_back({oracle.data().x(e.position), e.label});
    return b;
}

}  // namespace

BoundedNoiseResult bounded_noise_learn(Oracle& oracle, const HypothesisSpace& space, const Domain& dom, double eps,
                                       double delta, double alpha, BatchLearner& learner,
                                       const BoundedNoiseConfig& cfg) {
    if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) throw Error("bounded_noise_learn needs eps, delta in (0,1)");
    if (!(alpha >= 0.0 && alpha < 0.5)) throw Error("bounded_noise_learn needs alpha in [0, 1/2)");
    check_same_domain(space, dom);
    BoundedNoiseResult res;

    std::optional<HypothesisSpace> own;
    const HypothesisSpace* V = cfg.cover;
    if (!V) {
        own.emplace(epsilon_cover(space, dom, std::min(1.0, cfg.cover_factor * eps)));
        V = &*own;
    }
    res.cover_size = V->size();
    const int d = std::max(1, cfg.dim ? *cfg.dim : dimension_of(space, dom));
    res.delta_prime = cfg.delta_prime ? *cfg.delta_prime : default_delta_prime(delta, eps, alpha, d);
    res.N = halving_draws(V->size(), res.delta_prime, cfg.c_halving, cfg.n_min);
    const double ps_raw = std::ceil(cfg.c_u * d / (eps * eps) * std::log(space.k() / (eps * delta)));
    const std::size_t ps = static_cast<std::size_t>(std::max(1.0, ps_raw));
    res.s = std::min(ps, static_cast<std::size_t>(std::floor(1.0 / (16.0 * (alpha + eps)))));
    Rng rng(cfg.seed);

    BatchState st = learner.initialize();
    std::size_t t = 0;
    std::vector<std::size_t> U1, U2;
    while (st.more) {
        if (res.rounds.size() >= cfg.max_rounds) {
            res.failure = "round cap reached";
            return res;
        }
        if (st.m < 1) throw Error("learner requested an empty batch");
        BoundedRound r;
        r.m = st.m;
        r.region_mass = st.region_mass;
        r.phase1_skipped = res.s == 0;
        r.ps = r.phase1_skipped ? 0 : ps;
        // with s = 0 Phase 1 cannot query anything, so its points are not drawn
        if (!collect(oracle, st.region, t, r.ps, U1) || !collect(oracle, st.region, t, r.m, U2)) {
            res.failure = "stream exhausted while filtering to the learner's region";
            res.rounds.push_back(std::move(r));
            return res;
        }
        r.stream_end = t;

        Hypothesis h;
        const auto c0 = oracle.ledger().ccq_count();
        if (r.phase1_skipped) {
            h = plurality_hypothesis(*V);
        } else {
            QueryLedger::Scope scope(oracle.ledger(), "phase1");
            auto hr = generalized_halving(oracle, U1, *V, {res.s, res.N, std::nullopt}, rng);
            if (hr.emptied) {
                res.failure = "phase 1 removed every hypothesis";
                res.rounds.push_back(std::move(r));
                return res;
            }
            h = std::move(hr.plur);
        }
        const auto c1 = oracle.ledger().ccq_count();
        if (cfg.c_b) {
            r.budget = static_cast<std::size_t>(
                std::ceil(*cfg.c_b * (1.0 + alpha * static_cast<double>(r.m)) * std::log(1.0 / res.delta_prime)));
        }
        RefineResult rr;
        {
            QueryLedger::Scope scope(oracle.ledger(), "phase2");
            rr = refining(oracle, U2, h.labels, r.budget);
        }
        r.ccq_phase1 = c1 - c0;
        r.ccq_phase2 = oracle.ledger().ccq_count() - c1;
        r.mistakes = rr.mistakes;
        r.complete = rr.complete;
        r.L = std::move(rr.L);
        res.rounds.push_back(std::move(r));
        if (!res.rounds.back().complete) {
            res.failure = "phase 2 budget exhausted before labeling the batch";
            return res;
        }
        const auto batch = to_points(oracle, res.rounds.back().L);
        st = learner.update(batch);
    }
    if (!st.failure.empty()) {
        res.failure = st.failure;
        return res;
    }
    res.h = std::move(st.h);
    res.ok = true;
    return res;
}

BoundedNoiseResult drive_with_label_requests(Oracle& oracle, BatchLearner& learner, std::size_t max_rounds) {
    BoundedNoiseResult res;
    BatchState st = learner.initialize();
    std::size_t t = 0;
    std::vector<std::size_t> U;
    while (st.more) {
        if (res.rounds.size() >= max_rounds) {
            res.failure = "round cap reached";
            return res;
        }
        BoundedRound r;
        r.m = st.m;
        r.region_mass = st.region_mass;
        r.phase1_skipped = true;
        if (!collect(oracle, st.region, t, r.m, U)) {
            res.failure = "stream exhausted while filtering to the learner's region";
            return res;
        }
        r.stream_end = t;
        for (std::size_t p : U) r.L.add(p, oracle.answer_label_request(p));
        r.complete = true;
        res.rounds.push_back(std::move(r));
        st = learner.update(to_points(oracle, res.rounds.back().L));
    }
    if (!st.failure.empty()) {
        res.failure = st.failure;
        return res;
    }
    res.h = std::move(st.h);
    res.ok = true;
    return res;
}

AdaptiveAlphaResult adaptive_alpha(Oracle& oracle, const HypothesisSpace& space, const Domain& dom, double eps,
                                   double delta, const LearnerFactory& factory, const AdaptiveAlphaConfig& cfg) {
    if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) throw Error("adaptive_alpha needs eps, delta in (0,1)");
    AdaptiveAlphaResult res;
    const int I = std::max(1, static_cast<int>(std::floor(std::log2(1.0 / eps))));
    std::optional<HypothesisSpace> own;
    BoundedNoiseConfig base = cfg.base;
    if (!base.cover) {
        own.emplace(epsilon_cover(space, dom, std::min(1.0, base.cover_factor * eps)));
        base.cover = &*own;
    }
    if (!base.dim) base.dim = dimension_of(space, dom);
    for (int i = 1; i <= I; ++i) {
        const double a = std::ldexp(eps, i - 1);
        if (a >= 0.5) break;
        BoundedNoiseConfig c = base;
        c.c_b = cfg.c_b;
        c.seed = derive_seed(base.seed, {static_cast<std::uint64_t>(i)});
        auto learner = factory(a);
        const auto before = oracle.ledger().ccq_count();
        auto r = bounded_noise_learn(oracle, space, dom, eps, delta, a, *learner, c);
        res.attempts.push_back({a, r.ok, r.failure, oracle.ledger().ccq_count() - before});
        if (r.ok) {
            res.ok = true;
            res.h = std::move(r.h);
            res.i_hat = i;
            return res;
        }
    }
    res.failure = "every alpha guess failed";
    return res;
}

}  // namespace ccq
