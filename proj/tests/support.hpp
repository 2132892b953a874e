#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qmaxent/numrange.hpp"
#include "qmaxent/qmatrix.hpp"
#include "qmaxent/random.hpp"

namespace qtest {

using namespace qmaxent;

/// [[0, 2], [0, 0]] (+) [1]: the unit disk with a discontinuity at 1.
inline MatrixC exa_disk() {
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 1) = 2.0;
    m(2, 2) = 1.0;
    return MatrixC(m);
}

inline CMatrix direct_sum(const CMatrix& a, const CMatrix& b) {
    CMatrix m = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
}

inline MatrixC diag(const std::vector<Complex>& entries) {
    const int d = static_cast<int>(entries.size());
    CMatrix m = CMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) m(k, k) = entries[k];
    return MatrixC(m);
}

/// J (+) [c] with J a random 2x2 upper triangular block (elliptical range)
/// and c the boundary point of W(J) with outward normal e^{i theta0}. The
/// tangential contact at theta0 makes c a discontinuity point.
inline MatrixC ellipse_touch(Rng& rng, double theta0) {
    CMatrix j = ginibre(rng, 2, 2) * 0.5;
    j(1, 0) = 0.0;
    j(0, 1) = std::abs(j(0, 1)) + 0.5;
    const MatrixC jm(j);
    const auto eig = hermitian_eig(rotated_real_part(jm, theta0));
    const Complex c = numerical_range_map(eig.vector(0), jm).z();
    CMatrix one(1, 1);
    one(0, 0) = c;
    return MatrixC(direct_sum(j, one));
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace qtest
