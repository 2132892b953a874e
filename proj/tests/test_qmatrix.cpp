#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

using namespace qmaxent;
using namespace qtest;

namespace {

HermitianMatrix herm(std::initializer_list<std::initializer_list<Complex>> rows) {
    const int d = static_cast<int>(rows.size());
    CMatrix m(d, d);
    int r = 0;
    for (const auto& row : rows) {
        int c = 0;
        for (const auto& x : row) m(r, c++) = x;
        ++r;
    }
    return HermitianMatrix(m);
}

void check_decomposition(const HermitianMatrix& h, const EigDecomposition& e) {
    const double scale = std::max(1.0, h.mat().norm());
    for (int k = 0; k < e.dim(); ++k) {
        const CVector v = e.vectors.col(k);
        CHECK((h.mat() * v - e.values(k) * v).norm() <= 1e-9 * scale);
        if (k > 0) CHECK(e.values(k) <= e.values(k - 1));
    }
    const CMatrix gram = e.vectors.adjoint() * e.vectors;
    CHECK(max_abs(gram - CMatrix::Identity(e.dim(), e.dim())) <= 1e-9);
}

}  // namespace

TEST_CASE("hermitian_eig: zero, diagonal and Pauli x") {
    const auto zero = hermitian_eig(HermitianMatrix::zero(2));
    CHECK(zero.values(0) == doctest::Approx(0.0));
    CHECK(zero.values(1) == doctest::Approx(0.0));
    check_decomposition(HermitianMatrix::zero(2), zero);

    const auto h = herm({{1.0, 0.0}, {0.0, -1.0}});
    const auto e = hermitian_eig(h);
    CHECK(e.values(0) == doctest::Approx(1.0));
    CHECK(e.values(1) == doctest::Approx(-1.0));
    CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(1, 1)) == doctest::Approx(1.0));

    const auto sx = herm({{0.0, 1.0}, {1.0, 0.0}});
    const auto ex = hermitian_eig(sx);
    CHECK(ex.values(0) == doctest::Approx(1.0));
    CHECK(ex.values(1) == doctest::Approx(-1.0));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(ex.vectors(0, 0) - s) <= 1e-12);
    CHECK(std::abs(ex.vectors(1, 0) - s) <= 1e-12);
    CHECK(std::abs(std::abs(ex.vectors(0, 1)) - s) <= 1e-12);
    CHECK(std::abs(ex.vectors(0, 1) + ex.vectors(1, 1)) <= 1e-12);
}

TEST_CASE("hermitian_eig: random matrices with repeated eigenvalues") {
    Rng rng(11);
    for (int d : {1, 2, 3, 5, 8}) {
        for (int rep = 0; rep < 20; ++rep) {
            const CMatrix g = ginibre(rng, d, d);
            const HermitianMatrix h(g + g.adjoint());
            check_decomposition(h, hermitian_eig(h));
        }
        // Degenerate spectrum: U diag(1,1,...,-1) U*.
        const CMatrix u = random_unitary(rng, d);
        RVector spectrum = RVector::Ones(d);
        spectrum(d - 1) = -1.0;
        const HermitianMatrix h(u * spectrum.cast<Complex>().asDiagonal() * u.adjoint());
        const auto e = hermitian_eig(h);
        check_decomposition(h, e);
        for (int k = 0; k + 1 < d; ++k) CHECK(e.values(k) == doctest::Approx(1.0));
    }
}

TEST_CASE("hermitian_eig: deterministic") {
    Rng rng(3);
    const CMatrix g = ginibre(rng, 4, 4);
    const HermitianMatrix h(g + g.adjoint());
    const auto a = hermitian_eig(h);
    const auto b = hermitian_eig(h);
    CHECK(a.values == b.values);
    CHECK(a.vectors == b.vectors);
}

TEST_CASE("herm_map: exp and log") {
    CHECK(max_abs(herm_exp(HermitianMatrix::zero(3)).mat() - CMatrix::Identity(3, 3)) <= 1e-14);
    CHECK(max_abs(herm_log(HermitianMatrix::identity(3)).mat()) <= 1e-14);
    const auto e = herm_exp(herm({{1.0, 0.0}, {0.0, 2.0}}));
    CHECK(e(0, 0).real() == doctest::Approx(std::exp(1.0)));
    CHECK(e(1, 1).real() == doctest::Approx(std::exp(2.0)));
    CHECK(std::abs(e(0, 1)) <= 1e-14);

    CHECK_THROWS_AS(herm_log(herm({{1.0, 0.0}, {0.0, 0.0}})), DomainError);
    CHECK_THROWS_AS(herm_log(herm({{1.0, 0.0}, {0.0, -1.0}})), DomainError);
}

TEST_CASE("herm_map: exp then log round trip") {
    Rng rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        const int d = 2 + rep % 4;
        const CMatrix u = random_unitary(rng, d);
        RVector spectrum(d);
        std::uniform_real_distribution<double> unif(-5.0, 5.0);
        for (int k = 0; k < d; ++k) spectrum(k) = unif(rng);
        const HermitianMatrix h(u * spectrum.cast<Complex>().asDiagonal() * u.adjoint());
        const auto back = herm_log(herm_exp(h));
        CHECK(max_abs(back.mat() - h.mat()) <= 1e-8 * std::max(1.0, spectrum.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("Hermitian construction symmetrizes exactly") {
    Rng rng(8);
    const HermitianMatrix h(ginibre(rng, 4, 4));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) CHECK(h(i, j) == std::conj(h(j, i)));
    }
}

TEST_CASE("re_part and im_part") {
    Rng rng(2);
    const MatrixC a(ginibre(rng, 4, 4));
    const CMatrix back = re_part(a).mat() + Complex(0.0, 1.0) * im_part(a).mat();
    CHECK(max_abs(back - a.mat()) <= 1e-15);

    const HermitianMatrix herm_a(ginibre(rng, 3, 3));
    const MatrixC ha(herm_a.mat());
    CHECK(max_abs(re_part(ha).mat() - ha.mat()) <= 1e-15);
    CHECK(max_abs(im_part(ha).mat()) <= 1e-15);

    CMatrix j = CMatrix::Zero(2, 2);
    j(0, 1) = 2.0;
    const MatrixC jm(j);
    CMatrix sx(2, 2), sy(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    sy << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    CHECK(max_abs(re_part(jm).mat() - sx) <= 1e-15);
    CHECK(max_abs(im_part(jm).mat() - sy) <= 1e-15);

    const MatrixC ii(Complex(0.0, 1.0) * CMatrix::Identity(3, 3));
    CHECK(max_abs(re_part(ii).mat()) <= 1e-15);
    CHECK(max_abs(im_part(ii).mat() - CMatrix::Identity(3, 3)) <= 1e-15);
}

TEST_CASE("expected_value") {
    const MatrixC h(HermitianMatrix(CMatrix::Random(3, 3)).mat());
    const auto mixed = expected_value(DensityMatrix::maximally_mixed(3), h);
    CHECK(mixed.re == doctest::Approx(h.mat().trace().real() / 3.0));
    CHECK(std::abs(mixed.im) <= 1e-15);

    const auto e3 = expected_value(beta(UnitVector::basis(3, 2)), exa_disk());
    CHECK(e3.re == doctest::Approx(1.0));
    CHECK(std::abs(e3.im) <= 1e-15);

    Rng rng(4);
    for (int rep = 0; rep < 100; ++rep) {
        const MatrixC a = random_matrix(rng, 4);
        const auto x = random_unit_vector(rng, 4);
        CHECK(distance(expected_value(beta(x), a), numerical_range_map(x, a)) <= 1e-12);
    }
    CHECK_THROWS_AS(expected_value(DensityMatrix::maximally_mixed(2), exa_disk()), DimensionMismatch);
}

TEST_CASE("beta") {
    const auto p = beta(UnitVector::basis(3, 0));
    CHECK(p(0, 0).real() == doctest::Approx(1.0));
    CHECK(std::abs(p.mat().sum() - 1.0) <= 1e-15);

    CVector v(2);
    v << 1.0, 1.0;
    const auto q = beta(UnitVector::normalized(v));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) CHECK(std::abs(q(i, j) - 0.5) <= 1e-15);
    }

    Rng rng(6);
    const auto x = random_unit_vector(rng, 4);
    const UnitVector y(x.vec() * std::polar(1.0, 0.7));
    CHECK(max_abs(beta(x).mat() - beta(y).mat()) <= 1e-15);
    CHECK(max_abs(beta(x).mat() * beta(x).mat() - beta(x).mat()) <= 1e-12);
    CHECK(beta(x).hermitian().trace() == doctest::Approx(1.0));
}

TEST_CASE("UnitVector and DensityMatrix validation") {
    CVector v(2);
    v << 1.0, 1.0;
    CHECK_THROWS_AS(UnitVector{v}, DomainError);
    CMatrix bad = CMatrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix::from(bad), DomainError);  // trace 2
    bad << 1.5, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(DensityMatrix::from(bad), DomainError);  // negative eigenvalue
    CHECK_NOTHROW(DensityMatrix::from(CMatrix::Identity(2, 2) * 0.5));
    const auto proj = DensityMatrix::project(bad);
    CHECK(hermitian_eig(proj.hermitian()).min() >= 0.0);
    CHECK(proj.hermitian().trace() == doctest::Approx(1.0));
}

TEST_CASE("trace distance and fidelity examples") {
    const auto rho = DensityMatrix::maximally_mixed(3);
    CHECK(trace_distance(rho, rho) <= 1e-15);
    CHECK(fidelity(rho, rho) == doctest::Approx(1.0));

    const auto e1 = beta(UnitVector::basis(2, 0));
    const auto e2 = beta(UnitVector::basis(2, 1));
    CHECK(trace_distance(e1, e2) == doctest::Approx(1.0));
    CHECK(fidelity(e1, e2) <= 1e-12);

    CVector v(2);
    v << 1.0, 1.0;
    const auto plus = beta(UnitVector::normalized(v));
    CHECK(fidelity(e1, plus) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK_THROWS_AS(trace_distance(e1, rho), DimensionMismatch);
}

TEST_CASE("pure-state fidelity equals the overlap") {
    Rng rng(9);
    for (int rep = 0; rep < 100; ++rep) {
        const auto x = random_unit_vector(rng, 3);
        const auto y = random_unit_vector(rng, 3);
        CHECK(fidelity(beta(x), beta(y)) == doctest::Approx(std::abs(x.vec().dot(y.vec()))).epsilon(1e-8));
    }
}

TEST_CASE("Fuchs-van de Graaf inequalities") {
    Rng rng(12);
    for (int d : {2, 3, 4}) {
        for (int rep = 0; rep < 1000; ++rep) {
            const auto rho = random_density_matrix(rng, d);
            const auto sigma = random_density_matrix(rng, d);
            const double dist = trace_distance(rho, sigma);
            const double f = fidelity(rho, sigma);
            CHECK(dist >= 0.0);
            CHECK(dist <= 1.0 + 1e-12);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0 + 1e-12);
            CHECK(1.0 - f <= dist + 1e-9);
            CHECK(dist <= std::sqrt(std::max(0.0, 1.0 - f * f)) + 1e-9);
        }
    }
}

TEST_CASE("beta is Lipschitz and co-open") {
    Rng rng(13);
    for (int rep = 0; rep < 1000; ++rep) {
        const int d = 2 + rep % 3;
        const auto x = random_unit_vector(rng, d);
        auto yv = random_unit_vector(rng, d).vec();
        if (rep % 2 == 0) yv = x.vec() + 0.1 * yv;  // nearby pairs too
        const Complex ov = x.vec().dot(yv);
        if (std::abs(ov) > 0.0) yv *= std::conj(ov) / std::abs(ov);  // <x, y> >= 0
        const auto y = UnitVector::normalized(yv);
        const double dist = trace_distance(beta(x), beta(y));
        const double gap = (x.vec() - y.vec()).norm();
        CHECK(dist <= gap + 1e-9);
        CHECK(gap * gap <= 2.0 * dist + 1e-9);
    }
}

TEST_CASE("entropy and relative entropy") {
    Rng rng(14);
    const auto pure = beta(random_unit_vector(rng, 4));
    CHECK(std::abs(von_neumann_entropy(pure)) <= 1e-12);
    CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(4)) == doctest::Approx(std::log(4.0)));

    for (int rep = 0; rep < 100; ++rep) {
        const int d = 2 + rep % 4;
        const auto sigma = random_density_matrix(rng, d);
        const auto rho = random_prior(rng, d);
        const double s = von_neumann_entropy(sigma);
        CHECK(s >= -1e-12);
        CHECK(s <= std::log(d) + 1e-12);
        CHECK(relative_entropy(sigma, DensityMatrix::maximally_mixed(d)) ==
              doctest::Approx(std::log(d) - s).epsilon(1e-10));
        CHECK(relative_entropy(sigma, rho) >= 0.0);
        CHECK(std::abs(relative_entropy(rho, rho)) <= 1e-10);
    }
    CHECK_THROWS_AS(relative_entropy(DensityMatrix::maximally_mixed(2), beta(UnitVector::basis(2, 0))),
                    DomainError);
}
