#include <doctest.h>

#include "ccq/agnostic.hpp"
#include "ccq/reductions.hpp"
#include "ccq/spaces.hpp"

#include <cmath>
#include <numeric>

using namespace ccq;
using privileged::hidden_label;

namespace {

GroundTruth rcn3() {
    return build_distribution(RcnSpec{Domain::uniform(5), 3, Hypothesis{{1, 2, 3, 1, 2}}, 0.3});
}

}  // namespace

TEST_CASE("simulated CCQs are truthful and cost the requests made") {
    const auto gt = rcn3();
    DataSet ds = DataSet::draw(gt, 500, 1);
    QueryLedger ql;
    Oracle o(ds, ql);
    ReductionLedger rl;
    Rng rng(3);
    std::vector<std::size_t> S(60);
    std::iota(S.begin(), S.end(), 100);
    for (int y = 1; y <= 3; ++y) {
        const auto before = ql.label_request_count();
        const auto r = ccq_from_label_requests(o, {static_cast<Label>(y), S}, {}, rl, rng);
        if (r.found) {
            CHECK(hidden_label(ds, r.position) == y);
            CHECK(r.label == y);
        } else {
            for (std::size_t p : S) CHECK(hidden_label(ds, p) != y);
        }
        CHECK(rl.trace.back() == ql.label_request_count() - before);
    }
    CHECK(rl.ccq_answered == 3);
    CHECK(rl.label_requests_spent == ql.label_request_count());
    CHECK_THROWS_AS(ccq_from_label_requests(o, {4, S}, {}, rl, rng), Error);
    const std::vector<std::size_t> dup{1, 1};
    CHECK_THROWS_AS(ccq_from_label_requests(o, {1, dup}, {}, rl, rng), Error);
}

TEST_CASE("restrictions skip irrelevant points and answer known ones for free") {
    const auto gt = rcn3();
    DataSet ds = DataSet::draw(gt, 200, 2);
    QueryLedger ql;
    Oracle o(ds, ql);
    ReductionLedger rl;
    Rng rng(4);
    std::vector<std::size_t> S(200);
    std::iota(S.begin(), S.end(), 0);
    Restriction none_relevant{[](std::size_t, Label) { return false; }, {}};
    CHECK_FALSE(ccq_from_label_requests(o, {1, S}, none_relevant, rl, rng).found);
    CHECK(ql.label_request_count() == 0);

    Restriction known{{}, [](std::size_t p) -> std::optional<Label> {
                          if (p == 7) return Label{2};
                          return std::nullopt;
                      }};
    const auto r = ccq_from_label_requests(o, {2, S}, known, rl, rng);
    CHECK(r.found);
    CHECK(r.position == 7);
    CHECK(rl.trace.back() == 0);
}

TEST_CASE("geometric pieces") {
    CHECK(geometric_sum_bound(5, 0.5, 0.1) == doctest::Approx(4.0 * (5.0 + 4.0 * std::log(10.0))));
    CHECK_THROWS_AS(geometric_sum_bound(0, 0.5, 0.1), Error);
    Rng rng(1);
    double sum = 0.0;
    for (int i = 0; i < 200000; ++i) sum += static_cast<double>(geometric_draw(rng, 0.25));
    CHECK(sum / 200000.0 == doctest::Approx(4.0).epsilon(0.02));
    CHECK(geometric_draw(rng, 1.0) == 1);
    for (std::uint64_t k : {5u, 20u}) {
        const double b = geometric_sum_bound(k, 0.3, 0.1);
        CHECK(geometric_tail_frequency_serial(k, 0.3, b, 20000, 9) == geometric_tail_frequency_parallel(k, 0.3, b, 20000, 9));
    }
    CHECK(hard_instance_gamma(0.1, 0.05) == doctest::Approx(0.25));
}

TEST_CASE("hard instance restriction") {
    AgnosticHardSpec spec;
    spec.d = 4;
    spec.eta = 0.1;
    spec.eps = 0.05;
    spec.b = {1, -1, 1};
    spec.k = 3;
    spec.y = {1, 2, 1};
    spec.z = {3, 3, 2};
    const auto gt = build_distribution(spec);
    DataSet ds = DataSet::draw(gt, 300, 5);
    const auto r = hard_instance_restriction(ds, spec);
    for (std::size_t p = 0; p < ds.size(); ++p) {
        const auto x = ds.x(p);
        if (x == 0) {
            CHECK(r.known(p) == std::optional<Label>(1));
            CHECK(hidden_label(ds, p) == 1);
        } else {
            CHECK_FALSE(r.known(p).has_value());
            CHECK(r.relevant(p, hidden_label(ds, p)));
        }
    }
}

TEST_CASE("hard instance trial runs both sides on the same draws") {
    AgnosticHardSpec spec;
    spec.d = 3;
    spec.eta = 0.12;
    spec.eps = 0.05;
    spec.b = {1, -1};
    const auto gt = build_distribution(spec);
    const auto B = shattered(3, 2);
    CcqLearner learner = [&](Oracle& o, const GroundTruth& g) -> std::optional<Hypothesis> {
        AgnosticConfig c;
        c.seed = 1;
        auto r = agnostic_learn(o, B.space, g.domain, 0.12, 0.05, 0.1, c);
        if (!r.ok) return std::nullopt;
        return r.h;
    };
    const auto t = hard_instance_trial(spec, learner, 4096, 11, 1u << 22);
    CHECK(t.in_regime);
    CHECK(t.direct.ok);
    CHECK(t.reduced.ok);
    CHECK(t.direct.label_requests == 0);
    CHECK(t.reduced.ccq == t.reduction.ccq_answered);
    CHECK(t.reduced.label_requests == t.reduction.label_requests_spent);
    CHECK(t.gamma == doctest::Approx(hard_instance_gamma(0.12, 0.05)));
}
