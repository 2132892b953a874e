#include "qmaxent/random.hpp"

#include <cmath>

namespace qmaxent {

CMatrix ginibre(Rng& rng, int rows, int cols) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix g(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) g(i, j) = Complex(normal(rng), normal(rng));
    }
    return g;
}

UnitVector random_unit_vector(Rng& rng, int d) {
    return UnitVector::normalized(ginibre(rng, d, 1).col(0));
}

DensityMatrix random_density_matrix(Rng& rng, int d) {
    const CMatrix g = ginibre(rng, d, d);
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix::from(rho);
}

CMatrix random_unitary(Rng& rng, int d) {
    const CMatrix g = ginibre(rng, d, d);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < d; ++k) {
        const Complex rk = r(k, k);
        if (std::abs(rk) > 0.0) q.col(k) *= rk / std::abs(rk);
    }
    return q;
}

MatrixC random_matrix(Rng& rng, int d) {
    return MatrixC(ginibre(rng, d, d) / std::sqrt(static_cast<double>(d)));
}

DensityMatrix random_prior(Rng& rng, int d) {
    const auto sigma = random_density_matrix(rng, d);
    CMatrix rho = 0.5 * (CMatrix::Identity(d, d) / static_cast<double>(d) + sigma.mat());
    rho /= rho.trace().real();
    return DensityMatrix::from(rho);
}

}  // namespace qmaxent
