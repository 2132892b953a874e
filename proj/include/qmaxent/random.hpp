#pragma once

#include <cstdint>
#include <random>

#include "qmaxent/qmatrix.hpp"

namespace qmaxent {

using Rng = std::mt19937_64;

/// Entries i.i.d. standard complex Gaussian (E|z|^2 = 1).
CMatrix ginibre(Rng& rng, int rows, int cols);

/// Uniformly distributed on the unit sphere of C^d.
UnitVector random_unit_vector(Rng& rng, int d);

/// Hilbert-Schmidt random state G G^* / tr(G G^*).
DensityMatrix random_density_matrix(Rng& rng, int d);

/// Haar-random unitary (QR of a Ginibre matrix with the phase fixed).
CMatrix random_unitary(Rng& rng, int d);

/// Ginibre matrix scaled by 1/sqrt(d), so the spectral norm is O(1).
MatrixC random_matrix(Rng& rng, int d);

/// Positive definite state (I/d + sigma) / 2 with sigma Hilbert-Schmidt random.
/// Its eigenvalues lie in [1/(2d), 1/(2d) + 1/2].
DensityMatrix random_prior(Rng& rng, int d);

}  // namespace qmaxent
