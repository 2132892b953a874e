#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "qmaxent/eigencurves.hpp"

using namespace qmaxent;
using namespace qtest;

namespace {

constexpr double kPi = std::numbers::pi;

void check_invariants(const MatrixC& a, const EigenBranchSet& br) {
    const int d = br.dim();
    const double lip = 2.0 * a.norm2();
    const double dtheta = 2.0 * kPi / br.size();
    for (int j = 0; j < br.size(); ++j) {
        const auto eig = hermitian_eig(rotated_real_part(a, br.grid[j]));
        std::vector<double> tracked(d), sorted(d);
        for (int k = 0; k < d; ++k) {
            tracked[k] = br.values(k, j);
            sorted[k] = eig.values(k);
        }
        std::sort(tracked.rbegin(), tracked.rend());
        for (int k = 0; k < d; ++k) CHECK(std::abs(tracked[k] - sorted[k]) <= 1e-8);
        CHECK(br.values.col(j).sum() ==
              doctest::Approx(rotated_real_part(a, br.grid[j]).trace()).epsilon(1e-8));
        if (j + 1 < br.size()) {
            for (int k = 0; k < d; ++k) {
                CHECK(std::abs(br.values(k, j + 1) - br.values(k, j)) <= lip * dtheta + 1e-12);
            }
        }
    }
    // Periodicity as multisets, with the recorded permutation.
    const auto eig0 = hermitian_eig(rotated_real_part(a, 0.0));
    const auto eig2 = hermitian_eig(rotated_real_part(a, 2.0 * kPi));
    for (int k = 0; k < d; ++k) CHECK(std::abs(eig0.values(k) - eig2.values(k)) <= 1e-8);
    REQUIRE(static_cast<int>(br.wrap_permutation.size()) == d);
}

}  // namespace

TEST_CASE("track_branches: disk example") {
    const MatrixC a = exa_disk();
    const auto br = track_branches(a, 4096);
    check_invariants(a, br);
    // Branches are labeled by their rank at theta = 0 where 1 = cos 0; the
    // constant and cosine branches are told apart by their values elsewhere.
    int one = -1, minus = -1, cosb = -1;
    for (int k = 0; k < 3; ++k) {
        const double v = br.values(k, br.size() / 4);
        if (std::abs(v - 1.0) < 1e-9) one = k;
        else if (std::abs(v + 1.0) < 1e-9) minus = k;
        else cosb = k;
    }
    REQUIRE(one >= 0);
    REQUIRE(minus >= 0);
    REQUIRE(cosb >= 0);
    double worst = 0.0;
    for (int j = 0; j < br.size(); ++j) {
        const double th = br.grid[j];
        worst = std::max({worst, std::abs(br.values(one, j) - 1.0), std::abs(br.values(minus, j) + 1.0),
                          std::abs(br.values(cosb, j) - std::cos(th))});
        CHECK(std::abs(br.derivs(one, j)) <= 1e-9);
        CHECK(std::abs(br.derivs(minus, j)) <= 1e-9);
        CHECK(br.derivs(cosb, j) == doctest::Approx(-std::sin(th)).epsilon(1e-9));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("track_branches: diagonal real matrix gives a_k cos(theta)") {
    const std::vector<Complex> a_k{2.0, 0.5, -1.0};
    const MatrixC a = diag(a_k);
    const auto br = track_branches(a, 256);
    check_invariants(a, br);
    for (int j = 0; j < br.size(); ++j) {
        std::vector<double> got(3), want(3);
        for (int k = 0; k < 3; ++k) {
            got[k] = br.values(k, j);
            want[k] = a_k[k].real() * std::cos(br.grid[j]);
        }
        // Branch k keeps following a_k cos(theta) through the crossings at pi/2.
        for (int k = 0; k < 3; ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-9);
    }
}

TEST_CASE("track_branches: zero matrix and validation") {
    const auto br = track_branches(MatrixC::zero(2), 128);
    CHECK(br.values.cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(br.derivs.cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THROWS_AS(track_branches(exa_disk(), 64), DomainError);
}

TEST_CASE("track_branches: random matrices") {
    Rng rng(21);
    for (int rep = 0; rep < 6; ++rep) {
        const int d = 2 + rep % 5;
        const MatrixC a = random_matrix(rng, d);
        const auto br = track_branches(a, 128 * d);
        check_invariants(a, br);
    }
}

TEST_CASE("Hellmann-Feynman derivatives match finite differences") {
    Rng rng(22);
    const double h = 1e-4;
    for (int rep = 0; rep < 20; ++rep) {
        const int d = 2 + rep % 5;
        const MatrixC a = random_matrix(rng, d);
        std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
        const double th = unif(rng);
        const auto e0 = hermitian_eig(rotated_real_part(a, th));
        double gap = std::numeric_limits<double>::infinity();
        for (int k = 0; k + 1 < d; ++k) gap = std::min(gap, e0.values(k) - e0.values(k + 1));
        if (gap < 1e-2) continue;  // away from degeneracies
        const auto ep = hermitian_eig(rotated_real_part(a, th + h));
        const auto em = hermitian_eig(rotated_real_part(a, th - h));
        const HermitianMatrix dh = rotated_derivative(a, th);
        for (int k = 0; k < d; ++k) {
            const CVector x = e0.vectors.col(k);
            const double hf = x.dot(dh.mat() * x).real();
            const double fd = (ep.values(k) - em.values(k)) / (2.0 * h);
            CHECK(std::abs(hf - fd) <= 1e-5);
        }
    }
}

TEST_CASE("kippenhahn_curve: disk example") {
    const MatrixC a = exa_disk();
    const auto br = track_branches(a, 1024);
    const auto pts = kippenhahn_curve(br);
    CHECK(pts.size() == static_cast<std::size_t>(3 * br.size()));
    for (const auto& p : pts) {
        const Complex e = std::exp(Complex(0.0, p.theta));
        const double v = br.values(p.branch, static_cast<int>(std::lround(p.theta / (2 * kPi) * br.size())) % br.size());
        Complex want;
        if (std::abs(v - 1.0) < 1e-9 && std::abs(p.theta) > 1e-3 && std::abs(p.theta - 2 * kPi) > 1e-3) {
            want = e;
        } else if (std::abs(v + 1.0) < 1e-9) {
            want = -e;
        } else {
            want = 1.0;
        }
        if (std::abs(p.theta) < 1e-3) continue;  // the two top branches coincide at 0
        CHECK(std::abs(p.z.z() - want) <= 1e-9);
    }
}

TEST_CASE("kippenhahn_curve: top points are support points") {
    Rng rng(23);
    for (int rep = 0; rep < 5; ++rep) {
        const MatrixC a = random_matrix(rng, 3 + rep % 3);
        const auto br = track_branches(a, 64 * a.dim());
        const auto scan = support_scan(a, br.size());
        for (int j = 0; j < br.size(); ++j) {
            int top = 0;
            br.values.col(j).maxCoeff(&top);
            const auto z = kippenhahn_point(br.grid[j], br.values(top, j), br.derivs(top, j));
            CHECK((std::exp(Complex(0.0, -br.grid[j])) * z.z()).real() ==
                  doctest::Approx(br.values(top, j)).epsilon(1e-9));
            if (scan[j].top_multiplicity == 1) CHECK(distance(z, scan[j].boundary_point) <= 1e-7);
        }
    }
    // Constant branch c gives z(theta) = c e^{i theta}.
    const auto z = kippenhahn_point(0.8, 2.5, 0.0);
    CHECK(std::abs(z.z() - 2.5 * std::exp(Complex(0.0, 0.8))) <= 1e-15);
}

TEST_CASE("kippenhahn_curve: Hermitian matrix is real at theta = 0") {
    Rng rng(24);
    const MatrixC h(HermitianMatrix(ginibre(rng, 4, 4)).mat());
    const auto br = track_branches(h, 256);
    for (const auto& p : kippenhahn_curve(br)) {
        if (p.theta == 0.0) CHECK(std::abs(p.z.im) <= 1e-12);
    }
    for (int k = 0; k < 4; ++k) CHECK(std::abs(br.derivs(k, 0)) <= 1e-12);
}

TEST_CASE("find_top_degeneracies: disk example") {
    const MatrixC a = exa_disk();
    const auto br = track_branches(a, 4096);
    const auto events = find_top_degeneracies(a, br);
    REQUIRE(events.size() == 1);
    const auto& ev = events[0];
    CHECK(std::abs(std::remainder(ev.theta_star, 2 * kPi)) <= 1e-6);
    CHECK(ev.multiplicity == 2);
    CHECK(ev.level == doctest::Approx(1.0));
    CHECK_FALSE(ev.persistent);
    REQUIRE(ev.deriv_groups.size() == 1);
    CHECK(ev.deriv_groups[0].branches.size() == 2);
    CHECK(std::abs(ev.deriv_groups[0].derivative) <= 1e-7);
    REQUIRE(ev.identical_flags.size() == 1);
    CHECK_FALSE(ev.identical_flags[0].identical);
    CHECK(ev.identical_flags[0].sup_distance == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("find_top_degeneracies: generic matrices have none") {
    Rng rng(25);
    int empty = 0;
    for (int rep = 0; rep < 10; ++rep) {
        const MatrixC a = random_matrix(rng, 4);
        const auto br = track_branches(a, 1024);
        if (find_top_degeneracies(a, br).empty()) ++empty;
    }
    CHECK(empty >= 9);
}

TEST_CASE("find_top_degeneracies: duplicated blocks are identical") {
    Rng rng(26);
    for (int rep = 0; rep < 3; ++rep) {
        const CMatrix b = random_matrix(rng, 2 + rep).mat();
        const MatrixC a(direct_sum(b, b));
        const auto br = track_branches(a, 64 * a.dim());
        const auto events = find_top_degeneracies(a, br);
        REQUIRE_FALSE(events.empty());
        for (const auto& ev : events) {
            CHECK(ev.persistent);
            REQUIRE_FALSE(ev.identical_flags.empty());
            for (const auto& f : ev.identical_flags) CHECK(f.identical);
        }
    }
}

TEST_CASE("find_top_degeneracies: transversal crossing in a normal matrix") {
    // Square with corners 0, 1, i, 1+i: the top eigenvalue changes owner at
    // theta = 0, pi/2, pi, 3pi/2, where an edge is exposed.
    const MatrixC sq = diag({0.0, 1.0, Complex(0.0, 1.0), Complex(1.0, 1.0)});
    const auto br = track_branches(sq, 1024);
    const auto events = find_top_degeneracies(sq, br);
    REQUIRE(events.size() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(events[k].theta_star == doctest::Approx(k * kPi / 2).epsilon(1e-9));
        CHECK(events[k].multiplicity == 2);
        CHECK(events[k].deriv_groups.size() == 2);
    }
}
