#include <doctest.h>

#include "ccq/bounded_noise.hpp"
#include "ccq/spaces.hpp"

#include <cmath>

using namespace ccq;
using privileged::hidden_label;

namespace {

struct Fixture {
    SpaceBundle B = thresholds(100);
    Hypothesis target = B.space.hypothesis(30);
    GroundTruth gt;
    explicit Fixture(double alpha) : gt(build_distribution(RcnSpec{B.domain, 2, target, alpha})) {}
};

// Asks for one batch, then gives up.
class Quitter : public BatchLearner {
public:
    explicit Quitter(std::size_t n) : n_(n) {}
    BatchState initialize() override {
        BatchState s;
        s.region.assign(n_, 1);
        s.region_mass = 1.0;
        s.m = 5;
        s.more = true;
        return s;
    }
    BatchState update(std::span<const LabeledPoint> batch) override {
        seen += batch.size();
        BatchState s;
        s.failure = "injected failure";
        return s;
    }
    std::size_t seen = 0;

private:
    std::size_t n_;
};

}  // namespace

TEST_CASE("default delta prime") {
    CHECK(default_delta_prime(0.1, 0.05, 0.2, 2) == doctest::Approx(0.1 * 0.0025 * 0.36 / 128.0));
}

TEST_CASE("disagreement learner starts from a cover and asks for a first batch") {
    Fixture f(0.1);
    DisagreementBatchLearner L(f.B.space, f.B.domain, 0.05, 0.1, 0.1);
    const auto s = L.initialize();
    CHECK(s.more);
    CHECK(s.m == L.initial_batch());
    CHECK(s.region_mass == doctest::Approx(1.0).epsilon(0.05));
    CHECK(L.cover().size() < f.B.space.size());
    CHECK(L.alive().size() == L.cover().size());
}

TEST_CASE("label-request driver learns under RCN") {
    Fixture f(0.2);
    DataSet ds = DataSet::draw(f.gt, 1024, 3, 1u << 22);
    QueryLedger ledger;
    Oracle o(ds, ledger);
    DisagreementBatchLearner L(f.B.space, f.B.domain, 0.05, 0.1, 0.2);
    const auto r = drive_with_label_requests(o, L);
    REQUIRE(r.ok);
    CHECK(true_error(r.h.labels, f.gt) <= 0.25 + 1e-12);
    CHECK(ledger.ccq_count() == 0);
    CHECK(ledger.label_request_count() > 0);
}

TEST_CASE("CCQ pipeline labels every batch truthfully and records rounds") {
    Fixture f(0.1);
    DataSet ds = DataSet::draw(f.gt, 1024, 5, 1u << 22);
    QueryLedger ledger;
    Oracle o(ds, ledger);
    DisagreementBatchLearner L(f.B.space, f.B.domain, 0.05, 0.1, 0.1);
    BoundedNoiseConfig cfg;
    cfg.seed = 2;
    const auto r = bounded_noise_learn(o, f.B.space, f.B.domain, 0.05, 0.1, 0.1, L, cfg);
    REQUIRE(r.ok);
    CHECK(true_error(r.h.labels, f.gt) <= 0.15 + 1e-12);
    REQUIRE_FALSE(r.rounds.empty());
    std::uint64_t total = 0;
    for (const auto& rd : r.rounds) {
        CHECK(rd.complete);
        CHECK(rd.L.size() == rd.m);
        for (const auto& e : rd.L.entries()) CHECK(e.label == hidden_label(ds, e.position));
        total += rd.ccq_phase1 + rd.ccq_phase2;
        CHECK(rd.phase1_skipped == (r.s == 0));
    }
    CHECK(total == ledger.ccq_count());
    CHECK(ledger.label_request_count() == 0);
}

TEST_CASE("phase 1 is skipped when alpha + eps leaves no room for a set") {
    Fixture f(0.3);
    DataSet ds = DataSet::draw(f.gt, 1024, 6, 1u << 22);
    QueryLedger ledger;
    Oracle o(ds, ledger);
    DisagreementBatchLearner L(f.B.space, f.B.domain, 0.05, 0.1, 0.3);
    const auto r = bounded_noise_learn(o, f.B.space, f.B.domain, 0.05, 0.1, 0.3, L);
    CHECK(r.s == 0);
    REQUIRE_FALSE(r.rounds.empty());
    CHECK(r.rounds.front().phase1_skipped);
    CHECK(r.rounds.front().ccq_phase1 == 0);
}

TEST_CASE("learner and budget failures are reported") {
    Fixture f(0.1);
    DataSet ds = DataSet::draw(f.gt, 1024, 7, 1u << 22);
    QueryLedger ledger;
    Oracle o(ds, ledger);
    Quitter q(f.B.domain.size());
    const auto r = bounded_noise_learn(o, f.B.space, f.B.domain, 0.05, 0.1, 0.1, q);
    CHECK_FALSE(r.ok);
    CHECK(r.failure == "injected failure");
    CHECK(q.seen == 5);

    DisagreementBatchLearner L(f.B.space, f.B.domain, 0.05, 0.1, 0.1);
    BoundedNoiseConfig tight;
    tight.c_b = 1e-9;
    const auto r2 = bounded_noise_learn(o, f.B.space, f.B.domain, 0.05, 0.1, 0.1, L, tight);
    CHECK_FALSE(r2.ok);
    CHECK_FALSE(r2.rounds.back().complete);
}

TEST_CASE("adaptive alpha tries doubling guesses") {
    Fixture f(0.1);
    DataSet ds = DataSet::draw(f.gt, 1024, 8, 1u << 22);
    QueryLedger ledger;
    Oracle o(ds, ledger);
    LearnerFactory make = [&](double a) {
        return std::make_unique<DisagreementBatchLearner>(f.B.space, f.B.domain, 0.05, 0.1, a);
    };
    const auto r = adaptive_alpha(o, f.B.space, f.B.domain, 0.05, 0.1, make);
    REQUIRE(r.ok);
    CHECK(true_error(r.h.labels, f.gt) <= 0.15 + 1e-12);
    REQUIRE(r.attempts.size() == static_cast<std::size_t>(r.i_hat));
    CHECK(r.attempts.front().alpha == doctest::Approx(0.05));
    for (std::size_t i = 1; i < r.attempts.size(); ++i) {
        CHECK(r.attempts[i].alpha == doctest::Approx(2 * r.attempts[i - 1].alpha));
    }
}
