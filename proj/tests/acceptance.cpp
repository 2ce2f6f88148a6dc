// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. `acceptance 3 9` runs a subset.

#include "brute.hpp"

#include "ccq/agnostic.hpp"
#include "ccq/bounded_noise.hpp"
#include "ccq/harness.hpp"
#include "ccq/measures.hpp"
#include "ccq/oracle.hpp"
#include "ccq/reductions.hpp"
#include "ccq/rng.hpp"
#include "ccq/spaces.hpp"
#include "ccq/splitting.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace ccq;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmtd(const char* f, double v) {
    char b[64];
    std::snprintf(b, sizeof b, f, v);
    return b;
}

Label hidden(const DataSet& ds, std::size_t p) { return privileged::hidden_label(ds, p); }

std::vector<Label> random_labels(Rng& rng, std::size_t n, int k) {
    std::vector<Label> v(n);
    for (auto& l : v) l = static_cast<Label>(1 + below(rng, static_cast<std::uint64_t>(k)));
    return v;
}

// ---------------------------------------------------------------- 1
Outcome refining_exactness() {
    std::size_t deviations = 0, total_mistakes = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        Rng rng(derive_seed(101, {i}));
        const int k = 2 + static_cast<int>(below(rng, 3));
        const std::size_t n = 10 + below(rng, 91);
        const Domain dom = Domain::uniform(n);
        const Hypothesis target{random_labels(rng, n, k)};
        const double alpha = 0.4 * unit_real(rng);
        const GroundTruth gt = build_distribution(RcnSpec{dom, k, target, alpha});
        const std::size_t m = 1 + below(rng, 2000);
        DataSet ds = DataSet::draw(gt, m, derive_seed(102, {i}));
        QueryLedger ledger;
        Oracle oracle(ds, ledger, i % 2 ? AnswerPolicy::UniformRandom : AnswerPolicy::FirstIndex,
                      derive_seed(103, {i}));
        std::vector<std::size_t> U;
        const bool subset = below(rng, 2) == 1;
        for (std::size_t p = 0; p < m; ++p) {
            if (!subset || below(rng, 3) != 0) U.push_back(p);
        }
        if (U.empty()) U.push_back(0);
        const Hypothesis h = below(rng, 2) ? target : Hypothesis{random_labels(rng, n, k)};
        std::size_t expected = 0;
        for (std::size_t p : U) expected += hidden(ds, p) != h(ds.x(p));

        const auto r = refining(oracle, U, h.labels);
        bool ok = r.complete && r.L.size() == U.size() && r.fm_calls == r.mistakes + 1 && r.mistakes == expected;
        std::set<std::size_t> seen;
        for (const auto& e : r.L.entries()) {
            ok = ok && e.label == hidden(ds, e.position) && seen.insert(e.position).second;
        }
        ok = ok && std::equal(seen.begin(), seen.end(), U.begin(), U.end());
        deviations += !ok;
        total_mistakes += r.mistakes;
    }
    return {deviations == 0, "200 instances, " + std::to_string(deviations) + " deviations, " +
                                 std::to_string(total_mistakes) + " mistakes located"};
}

// ---------------------------------------------------------------- 2
Outcome halving_shrinkage() {
    std::size_t qualifying = 0, violations = 0, rounds = 0;
    const double eps = 0.005, delta = 0.1;
    for (std::uint64_t i = 0; i < 100; ++i) {
        Rng rng(derive_seed(201, {i}));
        const auto B = parse_space_spec(i % 2 ? "intervals:40:3" : "thresholds:200");
        const double beta = i % 4 < 2 ? 0.0 : 0.002;
        const Hypothesis target = B.space.hypothesis(below(rng, B.space.size()));
        const GroundTruth gt = build_distribution(RcnSpec{B.domain, B.space.k(), target, beta});
        DataSet ds = DataSet::draw(gt, 4000, derive_seed(202, {i}));
        QueryLedger ledger;
        Oracle oracle(ds, ledger);
        const HypothesisSpace V = epsilon_cover(B.space, B.domain, eps / 2);
        std::vector<std::size_t> U(4000);
        for (std::size_t p = 0; p < U.size(); ++p) U[p] = p;
        HalvingConfig hc;
        hc.s = static_cast<std::size_t>(std::floor(1.0 / (16.0 * (beta + eps))));
        hc.N = halving_draws(V.size(), delta, 48.0, 24);
        const auto res = generalized_halving(oracle, U, V, hc, rng);
        for (const auto& rd : res.rounds) {
            ++rounds;
            if (!rd.triggered) continue;
            std::size_t wrong = 0;
            for (std::size_t p : U) wrong += rd.plur(ds.x(p)) != hidden(ds, p);
            if (static_cast<double>(wrong) / U.size() < 10.0 * (beta + eps)) continue;
            ++qualifying;
            violations += 4 * rd.removed < rd.size_before;
        }
    }
    return {qualifying > 0 && violations == 0, std::to_string(qualifying) + " qualifying removal rounds of " +
                                                   std::to_string(rounds) + ", " + std::to_string(violations) +
                                                   " removed < |V|/4"};
}

// ---------------------------------------------------------------- harness-driven cells

struct CellStats {
    Cell cell;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double median_total = 0.0;
    double rate() const { return static_cast<double>(successes) / static_cast<double>(trials); }
};

std::vector<CellStats> run_config(const std::string& toml_text) {
    const auto cfg = parse_config(toml::parse_string(toml_text));
    std::vector<CellStats> out;
    for (const auto& cell : make_cells(cfg)) {
        const auto ctx = make_context(cfg, cell);
        std::vector<TrialRecord> recs(cfg.trials);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(cfg.trials); ++t) {
            recs[t] = run_trial(cfg, *ctx, t, trial_seed(cfg.seed, cell.index, t));
        }
        CellStats s;
        s.cell = ctx->cell;
        s.trials = recs.size();
        std::vector<double> q;
        for (const auto& r : recs) {
            s.successes += r.success;
            q.push_back(static_cast<double>(r.ccq + r.label_requests));
        }
        s.median_total = median(q);
        out.push_back(s);
    }
    return out;
}

std::string agnostic_cells_config(const std::string& space, const std::string& algorithm, std::size_t trials) {
    std::ostringstream os;
    os << "schema_version = 1\n[experiment]\ntrials = " << trials << "\nseed = 303\n"
       << "[space]\nspec = \"" << space << "\"\n[distribution]\nkind = \"rcn\"\n"
       << "[learner]\nalgorithm = \"" << algorithm << "\"\ndelta = 0.1\n"
       << "[sweep]\neps = [0.05]\neta = [0.0, 0.03, 0.06]\n";
    return os.str();
}

const std::vector<std::string> kAgnosticSpaces{"thresholds:200", "thresholds:200:3", "intervals:200",
                                               "intervals:200:3"};

std::map<std::string, std::vector<CellStats>> g_known_agnostic;

std::string cell_name(const std::string& space, const CellStats& s) {
    return space + " eta=" + fmtd("%.2f", s.cell.eta);
}

// ---------------------------------------------------------------- 3
Outcome agnostic_success() {
    bool pass = true;
    std::string worst;
    double worst_rate = 2.0;
    for (const auto& sp : kAgnosticSpaces) {
        auto cells = run_config(agnostic_cells_config(sp, "agnostic", 200));
        for (const auto& c : cells) {
            pass = pass && c.rate() >= 0.90;
            if (c.rate() < worst_rate) {
                worst_rate = c.rate();
                worst = cell_name(sp, c);
            }
        }
        g_known_agnostic[sp] = std::move(cells);
    }
    return {pass, "12 cells x 200 trials, lowest success " + fmtd("%.3f", worst_rate) + " (" + worst + ")"};
}

// ---------------------------------------------------------------- 4
Outcome scaling() {
    auto sweep_axis = [](const std::string& axis_lines, bool by_eps) {
        std::ostringstream os;
        os << "schema_version = 1\n[experiment]\ntrials = 30\nseed = 404\n[space]\nspec = \"thresholds:200\"\n"
           << "[distribution]\nkind = \"rcn\"\n[learner]\nalgorithm = \"agnostic\"\ndelta = 0.1\nchunk = \"auto\"\n"
           << "[sweep]\n"
           << axis_lines;
        const auto cfg = parse_config(toml::parse_string(os.str()));
        std::vector<std::pair<double, double>> samples;
        for (const auto& cell : make_cells(cfg)) {
            const auto ctx = make_context(cfg, cell);
            std::vector<TrialRecord> recs(cfg.trials);
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(cfg.trials); ++t) {
                recs[t] = run_trial(cfg, *ctx, t, trial_seed(cfg.seed, cell.index, t));
            }
            for (const auto& r : recs) {
                samples.emplace_back(by_eps ? 1.0 / cell.eps : cell.eta, static_cast<double>(r.ccq));
            }
        }
        return fit_scaling_samples(samples, 1000, 405);
    };
    const auto fe = sweep_axis("eps = [0.01]\neta = [0.02, 0.04, 0.08, 0.16]\n", false);
    const auto fi = sweep_axis("eps = [0.01, 0.02, 0.04, 0.08]\neta = [0.1]\n", true);
    const bool pass = fe.slope >= 1.3 && fe.slope <= 2.7 && fi.slope >= 1.3 && fi.slope <= 2.7;
    return {pass, "slope vs eta " + fmtd("%.3f", fe.slope) + " [" + fmtd("%.3f", fe.ci_lo) + ", " +
                      fmtd("%.3f", fe.ci_hi) + "], vs 1/eps " + fmtd("%.3f", fi.slope) + " [" + fmtd("%.3f", fi.ci_lo) +
                      ", " + fmtd("%.3f", fi.ci_hi) + "]"};
}

// ---------------------------------------------------------------- 5
Outcome realizable_economy() {
    const double eps = 0.002, delta = 0.1;
    const auto B = parse_space_spec("thresholds:200");
    const int k = B.space.k();
    const Hypothesis target = B.space.hypothesis(B.space.size() / 2);
    const GroundTruth gt = build_distribution(RealizableSpec{B.domain, k, target});
    AgnosticConfig cfg;
    cfg.rule = SetSizeRule::BetaOnly;
    const HypothesisSpace cover = epsilon_cover(B.space, B.domain, cfg.cover_factor * eps);
    const double V = static_cast<double>(cover.size());
    // per removal round at most k N CCQs, at most log_{4/3}|V| + 1 rounds, then refining
    const double c = 2.0 * cfg.c_halving / std::log(4.0 / 3.0);
    const double bound = c * k * std::log(V) * std::log(4.0 * std::log2(V) / delta);
    const std::size_t u = agnostic_sample_size(cfg.c_u, 1, k, 0.0, eps, delta);
    std::size_t over_bound = 0, over_frac = 0, successes = 0;
    double max_q = 0.0;
    std::vector<std::uint64_t> q(100);
    std::vector<char> succ(100);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < 100; ++t) {
        DataSet ds = DataSet::draw(gt, 4096, derive_seed(505, {static_cast<std::uint64_t>(t)}), 1u << 22);
        QueryLedger ledger;
        Oracle oracle(ds, ledger);
        AgnosticConfig c2 = cfg;
        c2.seed = derive_seed(506, {static_cast<std::uint64_t>(t)});
        const auto r = agnostic_learn(oracle, B.space, B.domain, 0.0, eps, delta, c2, &cover);
        q[t] = ledger.ccq_count();
        succ[t] = r.ok && true_error(r.h.labels, gt) <= eps + 1e-12;
    }
    for (std::size_t t = 0; t < 100; ++t) {
        over_bound += static_cast<double>(q[t]) > bound;
        over_frac += static_cast<double>(q[t]) > 0.05 * static_cast<double>(u);
        successes += succ[t];
        max_q = std::max(max_q, static_cast<double>(q[t]));
    }
    return {over_bound == 0 && over_frac == 0,
            "100 trials, max ccq " + fmtd("%.0f", max_q) + ", bound " + fmtd("%.0f", bound) + ", 5% of u " +
                fmtd("%.0f", 0.05 * static_cast<double>(u)) + ", " + std::to_string(over_bound + over_frac) +
                " exceedances, " + std::to_string(successes) + "/100 within eps"};
}

// ---------------------------------------------------------------- 6
Outcome geometric_sum() {
    std::size_t failures = 0;
    double worst_margin = 1.0;
    std::uint64_t cell = 0;
    for (std::uint64_t k : {5u, 20u, 100u}) {
        for (double a : {0.1, 0.3, 0.5}) {
            for (double d : {0.05, 0.1}) {
                const double f =
                    geometric_tail_frequency_parallel(k, a, geometric_sum_bound(k, a, d), 100000, derive_seed(606, {cell++}));
                failures += f < 1.0 - d;
                worst_margin = std::min(worst_margin, f - (1.0 - d));
            }
        }
    }
    return {failures == 0, "18 cells x 1e5 replicates, " + std::to_string(failures) + " cell failures, min margin " +
                               fmtd("%.4f", worst_margin)};
}

// ---------------------------------------------------------------- 7
Outcome reduction_fidelity() {
    const int k = 3;
    const std::size_t n = 60;
    Rng rng(707);
    const Domain dom = Domain::uniform(n);
    const Hypothesis target{random_labels(rng, n, k)};
    const GroundTruth gt = build_distribution(RcnSpec{dom, k, target, 0.3});
    DataSet ds = DataSet::draw(gt, 3200000, 708);
    QueryLedger ql;
    Oracle oracle(ds, ql);
    ReductionLedger rl;
    const Restriction none{};
    std::size_t violations = 0;
    // truthfulness on arbitrary sets
    for (int i = 0; i < 10000; ++i) {
        const Label l = static_cast<Label>(1 + below(rng, k));
        const std::size_t size = 1 + below(rng, 40);
        std::set<std::size_t> s;
        while (s.size() < size) s.insert(below(rng, 200000));
        const std::vector<std::size_t> S(s.begin(), s.end());
        const auto r = ccq_from_label_requests(oracle, {l, S}, none, rl, rng);
        if (r.found) {
            violations += r.label != l || !s.count(r.position) || hidden(ds, r.position) != l;
        } else {
            for (std::size_t p : S) violations += hidden(ds, p) == l;
        }
    }
    // cost on fresh sets where the target never says l; fresh so no request repeats
    std::vector<std::vector<std::size_t>> by_label(k + 1);
    for (std::size_t p = 200000; p < ds.size(); ++p) {
        for (int l = 1; l <= k; ++l) {
            if (target(ds.x(p)) != l) by_label[l].push_back(p);
        }
    }
    std::vector<std::size_t> next(k + 1, 0);
    ReductionLedger cost;
    std::size_t misses = 0;
    for (int i = 0; i < 10000; ++i) {
        const Label l = static_cast<Label>(1 + i % k);
        const auto& pool = by_label[l];
        if (next[l] + 200 > pool.size()) throw Error("stream too short for the cost check");
        const std::span<const std::size_t> S(pool.data() + next[l], 200);
        next[l] += 200;
        const auto r = ccq_from_label_requests(oracle, {l, S}, none, cost, rng);
        misses += !r.found;
    }
    const double mean = static_cast<double>(cost.label_requests_spent) / static_cast<double>(cost.ccq_answered);
    const double expect = (k - 1) / 0.3;
    const bool pass = violations == 0 && std::abs(mean - expect) <= 0.1 * expect;
    return {pass, std::to_string(violations) + " violations in 1e4 queries; mean requests per CCQ " +
                      fmtd("%.3f", mean) + " vs " + fmtd("%.3f", expect) + " (" + std::to_string(misses) +
                      " empty answers)"};
}

// ---------------------------------------------------------------- 8
Outcome theta_exactness() {
    const auto B = parse_space_spec("thresholds:1000");
    const double w = 1.0 / 1000.0;
    bool pass = true;
    std::string detail;
    for (double eps : {0.01, 0.05}) {
        const auto t = class_disagreement_coefficient_parallel(B.space, B.domain, eps);
        const double bf = brute::class_theta_entry(B.space, B.domain, eps);
        const bool ok = std::abs(t.theta - bf) <= 1e-9 && std::abs(t.theta * eps - 2.0 * eps) <= 2.0 * w;
        pass = pass && ok;
        detail += "eps=" + fmtd("%.2f", eps) + ": theta " + fmtd("%.6f", t.theta) + " brute " + fmtd("%.6f", bf) + "; ";
    }
    return {pass, detail};
}

// ---------------------------------------------------------------- 9
struct BoundedCell {
    double alpha;
    std::size_t successes = 0;
    double median_total = 0.0;
};

std::vector<BoundedCell> g_known_bounded;

Outcome bounded_pipeline() {
    const double eps = 0.05, delta = 0.1;
    const auto B = parse_space_spec("thresholds:200");
    const Hypothesis target = B.space.hypothesis(B.space.size() / 2);
    bool pass = true;
    std::size_t untruthful = 0, rounds = 0;
    std::string detail;
    g_known_bounded.clear();
    for (double alpha : {0.1, 0.2}) {
        const GroundTruth gt = build_distribution(RcnSpec{B.domain, 2, target, alpha});
        const HypothesisSpace cover = epsilon_cover(B.space, B.domain, 0.5 * eps);
        std::vector<char> succ(100);
        std::vector<double> q(100);
        std::vector<std::size_t> bad(100), nr(100);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t t = 0; t < 100; ++t) {
            const std::uint64_t s = derive_seed(909, {static_cast<std::uint64_t>(alpha * 100), static_cast<std::uint64_t>(t)});
            DataSet ds = DataSet::draw(gt, 4096, s, 1u << 24);
            QueryLedger ledger;
            Oracle oracle(ds, ledger);
            DisagreementConfig dc;
            DisagreementBatchLearner learner(B.space, B.domain, eps, delta, alpha, dc);
            BoundedNoiseConfig bc;
            bc.cover = &cover;
            bc.seed = derive_seed(s, {1});
            const auto r = bounded_noise_learn(oracle, B.space, B.domain, eps, delta, alpha, learner, bc);
            succ[t] = r.ok && true_error(r.h.labels, gt) <= alpha + eps + 1e-12;
            q[t] = static_cast<double>(ledger.ccq_count() + ledger.label_request_count());
            for (const auto& rd : r.rounds) {
                ++nr[t];
                for (const auto& e : rd.L.entries()) bad[t] += e.label != hidden(ds, e.position);
            }
        }
        BoundedCell c{alpha};
        for (std::size_t t = 0; t < 100; ++t) {
            c.successes += succ[t];
            untruthful += bad[t];
            rounds += nr[t];
        }
        c.median_total = median(q);
        pass = pass && c.successes >= 90;
        detail += "alpha=" + fmtd("%.1f", alpha) + ": " + std::to_string(c.successes) + "/100; ";
        g_known_bounded.push_back(c);
    }
    pass = pass && untruthful == 0;
    return {pass, detail + std::to_string(rounds) + " rounds, " + std::to_string(untruthful) + " untruthful labels"};
}

// ---------------------------------------------------------------- 10
Outcome splitting_learner() {
    const double eps = 0.05, delta = 0.1, alpha = 0.2, tau = 0.1;
    const auto B = parse_space_spec("thresholds:200");
    const Hypothesis target = B.space.hypothesis(B.space.size() / 2);
    const GroundTruth gt = build_distribution(RcnSpec{B.domain, 2, target, alpha});
    std::vector<char> succ(100);
    std::vector<double> labels(100);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < 100; ++t) {
        DataSet ds = DataSet::draw(gt, 4096, derive_seed(1010, {static_cast<std::uint64_t>(t)}), 1u << 26);
        QueryLedger ledger;
        Oracle oracle(ds, ledger);
        const auto r = splitting_active_learn(oracle, B.space, B.domain, eps, tau, alpha, delta,
                                              label_request_labeler(oracle));
        succ[t] = r.ok && true_error(r.h.labels, gt) <= alpha + eps + 1e-12;
        labels[t] = static_cast<double>(ledger.label_request_count());
    }
    std::size_t successes = 0;
    for (char s : succ) successes += s;

    std::size_t deviations = 0;
    Rng rng(1011);
    for (int i = 0; i < 1000; ++i) {
        const auto S = parse_space_spec(i % 2 ? "intervals:30:3" : "thresholds:40:3");
        const auto& V = S.space;
        PairSet Q;
        for (std::uint32_t a = 0; a < V.size(); ++a) {
            for (std::uint32_t b = a + 1; b < V.size(); ++b) {
                if (below(rng, 4) == 0) Q.pairs.emplace_back(a, b);
            }
        }
        if (Q.empty()) Q.pairs.emplace_back(0, 1);
        std::vector<std::uint32_t> pts(64);
        for (auto& p : pts) p = static_cast<std::uint32_t>(below(rng, V.domain_size()));
        const std::size_t window = 1 + below(rng, 32);
        const std::size_t cursor = below(rng, pts.size() - window + 1);
        const auto a = select_splitter(V, Q, pts, cursor, window);
        const auto b = brute::splitter(V, Q, pts, cursor, window);
        deviations += a.position != b.position || a.label != b.label || a.max_count != b.max_count;
    }
    return {successes >= 90 && deviations == 0,
            std::to_string(successes) + "/100 within alpha+eps, median label requests " +
                fmtd("%.0f", median(labels)) + "; splitter " + std::to_string(deviations) + " deviations in 1000 windows"};
}

// ---------------------------------------------------------------- 11
Outcome adaptive_wrappers() {
    if (g_known_agnostic.empty()) agnostic_success();
    if (g_known_bounded.empty()) bounded_pipeline();
    bool pass = true;
    double worst_rate = 2.0, worst_ratio = 0.0;
    std::string worst_ratio_cell;
    for (const auto& sp : kAgnosticSpaces) {
        const auto cells = run_config(agnostic_cells_config(sp, "adaptive_agnostic", 200));
        const auto& known = g_known_agnostic.at(sp);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const double ratio = cells[i].median_total / known[i].median_total;
            pass = pass && cells[i].rate() >= 0.90 && ratio <= 4.0;
            worst_rate = std::min(worst_rate, cells[i].rate());
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                worst_ratio_cell = cell_name(sp, cells[i]);
            }
        }
    }
    std::string detail = "adaptive_agnostic: lowest success " + fmtd("%.3f", worst_rate) + ", worst median ratio " +
                         fmtd("%.2f", worst_ratio) + " (" + worst_ratio_cell + ")";

    const double eps = 0.05, delta = 0.1;
    const auto B = parse_space_spec("thresholds:200");
    const Hypothesis target = B.space.hypothesis(B.space.size() / 2);
    const HypothesisSpace cover = epsilon_cover(B.space, B.domain, 0.5 * eps);
    for (const auto& kc : g_known_bounded) {
        const GroundTruth gt = build_distribution(RcnSpec{B.domain, 2, target, kc.alpha});
        std::vector<char> succ(100);
        std::vector<double> q(100);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t t = 0; t < 100; ++t) {
            const std::uint64_t s =
                derive_seed(1111, {static_cast<std::uint64_t>(kc.alpha * 100), static_cast<std::uint64_t>(t)});
            DataSet ds = DataSet::draw(gt, 4096, s, 1u << 24);
            QueryLedger ledger;
            Oracle oracle(ds, ledger);
            AdaptiveAlphaConfig ac;
            ac.base.cover = &cover;
            ac.base.seed = derive_seed(s, {1});
            LearnerFactory f = [&](double a) {
                return std::make_unique<DisagreementBatchLearner>(B.space, B.domain, eps, delta, a);
            };
            const auto r = adaptive_alpha(oracle, B.space, B.domain, eps, delta, f, ac);
            succ[t] = r.ok && true_error(r.h.labels, gt) <= kc.alpha + eps + 1e-12;
            q[t] = static_cast<double>(ledger.ccq_count() + ledger.label_request_count());
        }
        std::size_t successes = 0;
        for (char c : succ) successes += c;
        const double ratio = median(q) / kc.median_total;
        pass = pass && successes >= 90 && ratio <= 4.0;
        detail += "; adaptive_alpha alpha=" + fmtd("%.1f", kc.alpha) + ": " + std::to_string(successes) +
                  "/100, median ratio " + fmtd("%.2f", ratio);
    }
    return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<int, std::function<Outcome()>>> all{
        {1, refining_exactness}, {2, halving_shrinkage}, {3, agnostic_success},  {4, scaling},
        {5, realizable_economy}, {6, geometric_sum},     {7, reduction_fidelity}, {8, theta_exactness},
        {9, bounded_pipeline},   {10, splitting_learner}, {11, adaptive_wrappers},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (const auto& [id, fn] : all) {
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d: %s  %s  [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
