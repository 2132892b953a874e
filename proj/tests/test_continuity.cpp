#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "qmaxent/continuity.hpp"

using namespace qmaxent;
using namespace qtest;

TEST_CASE("detector: disk example") {
    const auto rep = detect_discontinuities(exa_disk());
    CHECK(rep.d == 3);
    CHECK(rep.range_dimension == 2);
    REQUIRE(rep.events.size() == 1);
    REQUIRE(rep.verdicts.size() == 1);
    const auto& v = rep.verdicts[0];
    CHECK(v.status == VerdictStatus::Discontinuous);
    CHECK(v.tag == PointTag::Extreme);
    CHECK(distance(v.alpha, {1.0, 0.0}) <= 1e-6);
    CHECK(v.confidence > 0.9);
    REQUIRE(v.oracle.has_value());
    CHECK(v.oracle->classification == OracleClass::Discontinuous);
    CHECK(v.oracle_agrees);
    CHECK(rep.count(VerdictStatus::Discontinuous) == 1);
    CHECK(rep.exit_code() == 0);
}

TEST_CASE("detector: grid doubling gives the same verdicts") {
    ContinuityConfig cfg;
    cfg.run_oracle = false;
    cfg.n_grid = 1024;
    const auto r1 = detect_discontinuities(exa_disk(), cfg);
    cfg.n_grid = 2048;
    const auto r2 = detect_discontinuities(exa_disk(), cfg);
    REQUIRE(r1.verdicts.size() == r2.verdicts.size());
    for (std::size_t k = 0; k < r1.verdicts.size(); ++k) {
        CHECK(r1.verdicts[k].status == r2.verdicts[k].status);
        CHECK(distance(r1.verdicts[k].alpha, r2.verdicts[k].alpha) <= 1e-6);
    }
}

TEST_CASE("oracle: disk example") {
    const MatrixC a = exa_disk();
    const std::vector<double> radii{1e-2, 1e-3, 1e-4};
    const auto disc = oracle_check(a, {1.0, 0.0}, radii, 16);
    CHECK(disc.classification == OracleClass::Discontinuous);
    for (const auto& r : disc.radii) {
        if (r.radius <= 1e-3) CHECK(r.max_gap >= 0.2);
    }
    for (const ExpectedValue p : {ExpectedValue{-1.0, 0.0}, ExpectedValue{0.0, 0.0}, ExpectedValue{0.5, 0.5}}) {
        const auto res = oracle_check(a, p, radii, 16);
        CHECK(res.classification == OracleClass::Continuous);
        CHECK(res.max_gap <= 0.05);
    }
}

TEST_CASE("classify_oracle thresholds") {
    OracleResult r;
    r.radii.resize(3);
    r.radii[0].max_gap = 0.5;
    r.radii[1].max_gap = 0.3;
    r.radii[2].max_gap = 0.25;
    CHECK(classify_oracle(r) == OracleClass::Discontinuous);
    r.radii[2].max_gap = 0.01;
    CHECK(classify_oracle(r) == OracleClass::Continuous);
    r.radii[2].max_gap = 0.1;
    CHECK(classify_oracle(r) == OracleClass::Inconclusive);
}

TEST_CASE("detector: duplicated block gives identical branches") {
    Rng rng(41);
    const CMatrix b = random_matrix(rng, 2).mat();
    const auto rep = detect_discontinuities(MatrixC(direct_sum(b, b)));
    CHECK(rep.count(VerdictStatus::Discontinuous) == 0);
    CHECK(rep.count(VerdictStatus::IdenticalBranches) >= 1);
    for (const auto& v : rep.verdicts) {
        if (v.oracle) CHECK(v.oracle->classification == OracleClass::Continuous);
    }
    CHECK(rep.exit_code() == 0);
}

TEST_CASE("detector: generic matrices") {
    Rng rng(42);
    ContinuityConfig cfg;
    cfg.n_grid = 1024;
    for (int rep = 0; rep < 5; ++rep) {
        const auto r = detect_discontinuities(random_matrix(rng, 4), cfg);
        CHECK(r.count(VerdictStatus::Discontinuous) == 0);
        CHECK(r.verdicts.size() <= r.events.size());
    }
}

TEST_CASE("detector: segment and point ranges have no verdicts") {
    const auto seg = detect_discontinuities(diag({0.0, 1.0, 0.5}));
    CHECK(seg.range_dimension == 1);
    CHECK(seg.segment_degenerate);
    CHECK(seg.verdicts.empty());
    const auto pt = detect_discontinuities(MatrixC::identity(2));
    CHECK(pt.range_dimension == 0);
    CHECK(pt.verdicts.empty());
}

TEST_CASE("detector: ellipse touching a point") {
    Rng rng(43);
    const MatrixC a = ellipse_touch(rng, 0.9);
    ContinuityConfig cfg;
    cfg.run_oracle = false;
    const auto rep = detect_discontinuities(a, cfg);
    REQUIRE(rep.count(VerdictStatus::Discontinuous) == 1);
}

TEST_CASE("prior invariance on the disk example") {
    Rng rng(44);
    std::vector<DensityMatrix> priors;
    for (int k = 0; k < 2; ++k) priors.push_back(random_prior(rng, 3));
    const auto inv = prior_invariance_check(exa_disk(), priors);
    CHECK(inv.invariant);
    REQUIRE(inv.classes.size() == 3);
    for (const auto& row : inv.discontinuities) {
        REQUIRE(row.size() == 1);
        CHECK(distance(row[0], {1.0, 0.0}) <= 1e-6);
    }
}
