#include "ccq/reductions.hpp"

#include <algorithm>
#include <cmath>

namespace ccq {

CCQResponse ccq_from_label_requests(Oracle& oracle, const CCQQuery& q, const Restriction& restriction,
                                    ReductionLedger& ledger, Rng& rng) {
    if (q.label < 1 || q.label > oracle.k()) throw Error("query label out of range 1..k");
    std::vector<std::size_t> S(q.positions.begin(), q.positions.end());
    std::sort(S.begin(), S.end());
    if (std::adjacent_find(S.begin(), S.end()) != S.end()) throw Error("query positions must be distinct");
    if (!S.empty() && S.back() >= oracle.data().size()) throw Error("query position out of range");

    ++ledger.ccq_answered;
    const auto before = oracle.ledger().label_request_count();
    auto finish = [&](CCQResponse r) {
        const auto spent = oracle.ledger().label_request_count() - before;
        ledger.trace.push_back(static_cast<std::uint32_t>(spent));
        ledger.label_requests_spent += spent;
        return r;
    };

    std::vector<std::size_t> R;
    R.reserve(S.size());
    for (std::size_t p : S) {
        if (restriction.known) {
            if (auto lab = restriction.known(p)) {
                if (*lab == q.label) return finish(CCQResponse::hit(p, q.label));
                continue;
            }
        }
        if (!restriction.relevant || restriction.relevant(p, q.label)) R.push_back(p);
    }
    // partial Fisher-Yates: each step draws uniformly among the not yet requested
    for (std::size_t i = 0; i < R.size(); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(below(rng, R.size() - i));
        std::swap(R[i], R[j]);
        if (oracle.answer_label_request(R[i]) == q.label) return finish(CCQResponse::hit(R[i], q.label));
    }
    return finish(CCQResponse::none());
}

void use_label_request_backend(Oracle& oracle, Restriction restriction, ReductionLedger& ledger, Rng& rng) {
    oracle.set_ccq_backend([&oracle, r = std::move(restriction), &ledger, &rng](const CCQQuery& q) {
        return ccq_from_label_requests(oracle, q, r, ledger, rng);
    });
}

Restriction hard_instance_restriction(const DataSet& ds, const AgnosticHardSpec& spec) {
    Restriction r;
    const Label y0 = spec.y0;
    std::vector<Label> ys(spec.d, 0), zs(spec.d, 0);
    for (std::size_t i = 1; i < spec.d; ++i) {
        ys[i] = spec.y.empty() ? Label{1} : spec.y[i - 1];
        zs[i] = spec.z.empty() ? Label{2} : spec.z[i - 1];
    }
    r.known = [&ds, y0](std::size_t p) -> std::optional<Label> {
        if (ds.x(p) == 0) return y0;
        return std::nullopt;
    };
    r.relevant = [&ds, ys, zs](std::size_t p, Label l) {
        const std::uint32_t x = ds.x(p);
        return x > 0 && (ys[x] == l || zs[x] == l);
    };
    return r;
}

double geometric_sum_bound(std::uint64_t k, double alpha, double delta) {
    if (k < 1) throw Error("geometric_sum_bound needs k >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("geometric_sum_bound needs alpha in (0,1]");
    if (!(delta > 0.0 && delta < 1.0)) throw Error("geometric_sum_bound needs delta in (0,1)");
    return (2.0 / alpha) * (static_cast<double>(k) + 4.0 * std::log(1.0 / delta));
}

std::uint64_t geometric_draw(Rng& rng, double alpha) {
    if (alpha >= 1.0) return 1;
    const double u = 1.0 - unit_real(rng);  // (0, 1]
    return 1 + static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-alpha)));
}

namespace {

constexpr std::size_t kBlock = 4096;

std::size_t tail_block(std::uint64_t k, double alpha, double bound, std::size_t begin, std::size_t end,
                       std::uint64_t seed, std::size_t block) {
    Rng rng(derive_seed(seed, {block}));
    std::size_t hits = 0;
    for (std::size_t r = begin; r < end; ++r) {
        std::uint64_t s = 0;
        for (std::uint64_t i = 0; i < k; ++i) s += geometric_draw(rng, alpha);
        if (static_cast<double>(s) <= bound) ++hits;
    }
    return hits;
}

}  // namespace

double geometric_tail_frequency_serial(std::uint64_t k, double alpha, double bound, std::size_t reps,
                                       std::uint64_t seed) {
    if (reps == 0) throw Error("need at least one replicate");
    std::size_t hits = 0;
    const std::size_t blocks = (reps + kBlock - 1) / kBlock;
    for (std::size_t b = 0; b < blocks; ++b) {
        hits += tail_block(k, alpha, bound, b * kBlock, std::min(reps, (b + 1) * kBlock), seed, b);
    }
    return static_cast<double>(hits) / static_cast<double>(reps);
}

double geometric_tail_frequency_parallel(std::uint64_t k, double alpha, double bound, std::size_t reps,
                                         std::uint64_t seed) {
    if (reps == 0) throw Error("need at least one replicate");
    std::size_t hits = 0;
    const long long blocks = static_cast<long long>((reps + kBlock - 1) / kBlock);
#pragma omp parallel for reduction(+ : hits) schedule(dynamic)
    for (long long b = 0; b < blocks; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        hits += tail_block(k, alpha, bound, ub * kBlock, std::min(reps, (ub + 1) * kBlock), seed, ub);
    }
    return static_cast<double>(hits) / static_cast<double>(reps);
}

double hard_instance_gamma(double eta, double eps) {
    if (!(eps > 0.0) || !(eta >= 0.0)) throw Error("hard instance needs eta >= 0 and eps > 0");
    return eps / (eta + 2.0 * eps);
}

HardTrialResult hard_instance_trial(const AgnosticHardSpec& spec, const CcqLearner& learner, std::size_t draws,
                                    std::uint64_t seed, std::size_t capacity) {
    HardTrialResult res;
    res.gamma = hard_instance_gamma(spec.eta, spec.eps);
    res.in_regime = spec.eps > 0.0 && 2.0 * spec.eps <= spec.eta && spec.eta < 0.25;
    const GroundTruth gt = build_distribution(spec);
    const DataSet original = DataSet::draw(gt, draws, seed, capacity);

    {
        DataSet ds = original;
        QueryLedger ledger;
        Oracle oracle(ds, ledger);
        auto h = learner(oracle, gt);
        res.direct.ok = h.has_value();
        if (h) res.direct.error = true_error(h->labels, gt);
        res.direct.ccq = ledger.ccq_count();
        res.direct.label_requests = ledger.label_request_count();
    }
    {
        DataSet ds = original;
        QueryLedger ledger;
        Oracle oracle(ds, ledger);
        Rng rng(derive_seed(seed, {0x7265647563ULL}));
        use_label_request_backend(oracle, hard_instance_restriction(ds, spec), res.reduction, rng);
        auto h = learner(oracle, gt);
        res.reduced.ok = h.has_value();
        if (h) res.reduced.error = true_error(h->labels, gt);
        res.reduced.ccq = ledger.ccq_count();
        res.reduced.label_requests = ledger.label_request_count();
    }
    return res;
}

}  // namespace ccq
