#include "ccq/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace ccq {

namespace {

void check_target(const Domain& dom, int k, const Hypothesis& h) {
    if (k < 2 || k > kMaxLabels) throw Error("k must be in [2, 255]");
    if (h.size() != dom.size()) throw Error("target hypothesis does not match the domain");
    for (Label y : h.labels) {
        if (y < 1 || y > k) throw Error("target label out of range");
    }
}

GroundTruth point_mass(const Domain& dom, int k, const Hypothesis& h) {
    GroundTruth gt;
    gt.domain = dom;
    gt.k = k;
    gt.cond.assign(dom.size() * static_cast<std::size_t>(k), 0.0);
    for (std::size_t x = 0; x < dom.size(); ++x) gt.cond[x * k + (h(x) - 1)] = 1.0;
    gt.best = h;
    return gt;
}

GroundTruth build(const RealizableSpec& s) {
    check_target(s.domain, s.k, s.target);
    return point_mass(s.domain, s.k, s.target);
}

GroundTruth build(const RcnSpec& s) {
    check_target(s.domain, s.k, s.target);
    if (!(s.alpha >= 0.0 && s.alpha < 0.5)) throw Error("noise rate alpha must be in [0, 1/2)");
    GroundTruth gt = point_mass(s.domain, s.k, s.target);
    const double wrong = s.alpha / (s.k - 1);
    for (std::size_t x = 0; x < s.domain.size(); ++x) {
        for (int y = 1; y <= s.k; ++y) gt.cond[x * s.k + (y - 1)] = y == s.target(x) ? 1.0 - s.alpha : wrong;
    }
    return gt;
}

GroundTruth build(const BoundedSpec& s) {
    check_target(s.domain, s.k, s.target);
    if (!(s.alpha >= 0.0 && s.alpha < 0.5)) throw Error("noise bound alpha must be in [0, 1/2)");
    const std::size_t n = s.domain.size();
    if (s.flip.size() != n) throw Error("bounded noise needs one flip probability per point");
    if (!s.wrong.empty() && s.wrong.size() != n) throw Error("wrong-label distributions must be per point");
    GroundTruth gt = point_mass(s.domain, s.k, s.target);
    for (std::size_t x = 0; x < n; ++x) {
        const double f = s.flip[x];
        if (!(f >= 0.0 && f <= s.alpha + 1e-15)) throw Error("flip probability must lie in [0, alpha]");
        const Label t = s.target(x);
        std::vector<double> share(s.k, 0.0);
        if (s.wrong.empty()) {
            for (int y = 1; y <= s.k; ++y) share[y - 1] = y == t ? 0.0 : 1.0 / (s.k - 1);
        } else {
            if (s.wrong[x].size() != static_cast<std::size_t>(s.k)) throw Error("wrong-label distribution needs k entries");
            double tot = 0.0;
            for (int y = 1; y <= s.k; ++y) {
                const double v = y == t ? 0.0 : s.wrong[x][y - 1];
                if (v < 0.0) throw Error("negative wrong-label weight");
                share[y - 1] = v;
                tot += v;
            }
            if (tot <= 0.0) {
                if (f > 0.0) throw Error("flip mass needs somewhere to go");
            } else {
                for (double& v : share) v /= tot;
            }
        }
        for (int y = 1; y <= s.k; ++y) gt.cond[x * s.k + (y - 1)] = y == t ? 1.0 - f : f * share[y - 1];
    }
    return gt;
}

GroundTruth build(const AgnosticHardSpec& s) {
    if (s.d < 2) throw Error("hard instance needs d >= 2");
    if (!(s.eps > 0.0) || !(s.eta >= 0.0)) throw Error("hard instance needs eta >= 0 and eps > 0");
    if (s.eta + 2.0 * s.eps >= 0.5) throw Error("hard instance needs eta + 2 eps < 1/2");
    if (s.b.size() != s.d - 1) throw Error("hard instance needs d-1 signs");
    if (s.k < 2 || s.k > kMaxLabels) throw Error("k must be in [2, 255]");
    const double beta = 2.0 * (s.eta + 2.0 * s.eps);
    const double gamma = s.eps / (s.eta + 2.0 * s.eps);
    std::vector<double> w(s.d, beta / static_cast<double>(s.d - 1));
    w[0] = 1.0 - beta;
    // renormalise rounding so the domain invariant holds exactly
    double tot = 0.0;
    for (double v : w) tot += v;
    w[0] += 1.0 - tot;

    GroundTruth gt;
    gt.domain = Domain(std::move(w));
    gt.k = s.k;
    gt.cond.assign(s.d * static_cast<std::size_t>(s.k), 0.0);
    if (s.y0 < 1 || s.y0 > s.k) throw Error("label out of range");
    gt.cond[s.y0 - 1] = 1.0;
    Hypothesis best;
    best.labels.assign(s.d, s.y0);
    for (std::size_t i = 1; i < s.d; ++i) {
        const Label yi = s.y.empty() ? Label{1} : s.y[i - 1];
        const Label zi = s.z.empty() ? Label{2} : s.z[i - 1];
        if (yi == zi || yi < 1 || zi < 1 || yi > s.k || zi > s.k) throw Error("bad witness label pair");
        const int bi = s.b[i - 1];
        if (bi != 1 && bi != -1) throw Error("signs must be +1 or -1");
        const double pz = 0.5 + gamma * bi;
        gt.cond[i * s.k + (zi - 1)] = pz;
        gt.cond[i * s.k + (yi - 1)] = 1.0 - pz;
        best.labels[i] = pz > 0.5 ? zi : yi;
    }
    gt.best = std::move(best);
    return gt;
}

}  // namespace

GroundTruth build_distribution(const DistributionSpec& spec) {
    GroundTruth gt = std::visit([](const auto& s) { return build(s); }, spec);
    for (std::size_t x = 0; x < gt.domain.size(); ++x) {
        double t = 0.0;
        for (int y = 0; y < gt.k; ++y) t += gt.cond[x * gt.k + y];
        if (std::abs(t - 1.0) > 1e-12) throw Error("conditional label distribution does not sum to 1");
    }
    return gt;
}

double GroundTruth::noise_rate() const {
    if (!best) throw Error("noise rate needs a best hypothesis");
    return true_error(best->labels, *this);
}

double true_error(std::span<const Label> h, const GroundTruth& gt) {
    if (h.size() != gt.domain.size()) throw Error("hypothesis does not match the distribution's domain");
    double e = 0.0;
    for (std::size_t x = 0; x < h.size(); ++x) e += gt.domain.weight(x) * (1.0 - gt.p(x, h[x]));
    return std::max(0.0, e);
}

DataSet DataSet::draw(const GroundTruth& gt, std::size_t n, std::uint64_t seed, std::size_t capacity) {
    if (n == 0) throw Error("draw at least one point");
    DataSet ds;
    ds.seed_ = seed;
    ds.capacity_ = std::max(n, capacity);
    ds.k_ = gt.k;
    ds.uniform_ = gt.domain.is_uniform();
    ds.rng_.seed(seed);
    const std::size_t m = gt.domain.size();
    ds.weights_cdf_.resize(m);
    double c = 0.0;
    for (std::size_t x = 0; x < m; ++x) ds.weights_cdf_[x] = c += gt.domain.weight(x);
    ds.cond_cdf_.resize(m * gt.k);
    for (std::size_t x = 0; x < m; ++x) {
        double cc = 0.0;
        for (int y = 0; y < gt.k; ++y) ds.cond_cdf_[x * gt.k + y] = cc += gt.cond[x * gt.k + y];
    }
    ds.extend(n);
    return ds;
}

bool DataSet::ensure(std::size_t n) {
    if (n <= xs_.size()) return true;
    if (n > capacity_) return false;
    // grow geometrically to keep the number of refills small
    extend(std::min(capacity_, std::max(n, xs_.size() + xs_.size() / 2)));
    return true;
}

void DataSet::extend(std::size_t n) {
    const std::size_t m = weights_cdf_.size();
    const std::size_t k = static_cast<std::size_t>(k_);
    xs_.reserve(n);
    ys_.reserve(n);
    while (xs_.size() < n) {
        std::size_t x;
        if (uniform_) {
            x = static_cast<std::size_t>(below(rng_, m));
        } else {
            const double u = unit_real(rng_);
            x = static_cast<std::size_t>(std::upper_bound(weights_cdf_.begin(), weights_cdf_.end(), u) - weights_cdf_.begin());
            if (x >= m) x = m - 1;
            while (x > 0 && weights_cdf_[x] == weights_cdf_[x - 1]) --x;  // never land on a zero-weight point
        }
        const double u = unit_real(rng_);
        const double* cdf = cond_cdf_.data() + x * k;
        std::size_t y = 0;
        while (y + 1 < k && !(u < cdf[y])) ++y;
        // skip zero-probability labels that rounding could select
        while (y > 0 && cdf[y] == cdf[y - 1]) --y;
        xs_.push_back(static_cast<std::uint32_t>(x));
        ys_.push_back(static_cast<Label>(y + 1));
    }
}

Label privileged::hidden_label(const DataSet& ds, std::size_t position) {
    if (position >= ds.size()) throw Error("position out of range");
    return ds.ys_[position];
}

Oracle::Oracle(DataSet& ds, QueryLedger& ledger, AnswerPolicy policy, std::uint64_t policy_seed,
               WitnessChooser chooser)
    : ds_(ds), ledger_(ledger), policy_(policy), rng_(policy_seed), chooser_(std::move(chooser)) {
    if (policy_ == AnswerPolicy::Custom && !chooser_) throw Error("custom answer policy needs a chooser");
}

CCQResponse Oracle::answer_ccq(const CCQQuery& q) {
    const auto& pos = q.positions;
    const std::size_t n = ds_.size();
    const Label* ys = ds_.ys_.data();
    if (q.label < 1 || q.label > ds_.k()) throw Error("query label out of range 1..k");
    bool sorted = true;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (pos[i] >= n) throw Error("query position out of range");
        if (i > 0 && pos[i] <= pos[i - 1]) sorted = false;
    }
    if (backend_) {
        if (!sorted) {
            std::vector<std::size_t> tmp(pos.begin(), pos.end());
            std::sort(tmp.begin(), tmp.end());
            if (std::adjacent_find(tmp.begin(), tmp.end()) != tmp.end()) throw Error("query positions must be distinct");
        }
        ledger_.record_ccq();
        return backend_(q);
    }
    if (!sorted) {
        std::vector<std::size_t> tmp(pos.begin(), pos.end());
        std::sort(tmp.begin(), tmp.end());
        if (std::adjacent_find(tmp.begin(), tmp.end()) != tmp.end()) throw Error("query positions must be distinct");
        ledger_.record_ccq();
        // first-index means lowest position, whatever order the caller used
        std::vector<std::size_t> wit;
        for (std::size_t p : tmp) {
            if (ys[p] == q.label) wit.push_back(p);
        }
        if (wit.empty()) return CCQResponse::none();
        std::size_t pick = 0;
        if (policy_ == AnswerPolicy::UniformRandom) pick = static_cast<std::size_t>(below(rng_, wit.size()));
        else if (policy_ == AnswerPolicy::Custom) pick = chooser_(wit);
        if (pick >= wit.size()) throw Error("witness chooser returned an invalid index");
        return CCQResponse::hit(wit[pick], q.label);
    }
    ledger_.record_ccq();
    if (policy_ == AnswerPolicy::FirstIndex) {
        for (std::size_t p : pos) {
            if (ys[p] == q.label) return CCQResponse::hit(p, q.label);
        }
        return CCQResponse::none();
    }
    if (policy_ == AnswerPolicy::UniformRandom) {
        // reservoir sample of size one
        std::size_t seen = 0, chosen = 0;
        for (std::size_t p : pos) {
            if (ys[p] != q.label) continue;
            ++seen;
            if (below(rng_, seen) == 0) chosen = p;
        }
        return seen ? CCQResponse::hit(chosen, q.label) : CCQResponse::none();
    }
    std::vector<std::size_t> wit;
    for (std::size_t p : pos) {
        if (ys[p] == q.label) wit.push_back(p);
    }
    if (wit.empty()) return CCQResponse::none();
    const std::size_t pick = chooser_(wit);
    if (pick >= wit.size()) throw Error("witness chooser returned an invalid index");
    return CCQResponse::hit(wit[pick], q.label);
}

Label Oracle::answer_label_request(std::size_t position) {
    if (position >= ds_.size()) throw Error("label request position out of range");
    if (requested_.size() < ds_.size()) requested_.resize(ds_.size(), false);
    if (!requested_[position]) {
        requested_[position] = true;
        ledger_.record_label_request();
    }
    return ds_.ys_[position];
}

bool Oracle::was_requested(std::size_t position) const {
    return position < requested_.size() && requested_[position];
}

}  // namespace ccq
