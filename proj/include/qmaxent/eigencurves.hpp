#pragma once

#include <string>
#include <vector>

#include "qmaxent/numrange.hpp"
#include "qmaxent/qmatrix.hpp"
#include "qmaxent/tolerances.hpp"

namespace qmaxent {

/// Raised when consecutive grid columns cannot be matched unambiguously.
class TrackingFailure : public Error {
public:
    TrackingFailure(const std::string& what, double theta) : Error(what), theta_(theta) {}
    double theta() const { return theta_; }

private:
    double theta_;
};

/// Eigenvalue branches lambda_k(theta) of Re(e^{-i theta} A) followed
/// continuously over a uniform grid on [0, 2 pi). Branch k is labeled by its
/// rank at theta = 0; afterwards the labels follow the eigenvectors, not the
/// sort order.
struct EigenBranchSet {
    std::vector<double> grid;
    Eigen::MatrixXd values;        // d x n
    Eigen::MatrixXd derivs;        // d x n, Hellmann-Feynman derivatives
    std::vector<CMatrix> vectors;  // per column: d x d, column k is branch k
    /// Branch k arriving at 2 pi continues as branch wrap_permutation[k] at 0.
    std::vector<int> wrap_permutation;

    int dim() const { return static_cast<int>(values.rows()); }
    int size() const { return static_cast<int>(grid.size()); }
    bool wraps_closed() const;
};

struct KippenhahnPoint {
    double theta = 0.0;
    int branch = 0;
    ExpectedValue z;  // e^{i theta} (lambda_k + i lambda_k')
};

/// Branches sharing a derivative at a degeneracy.
struct DerivGroup {
    double derivative = 0.0;
    std::vector<int> branches;
};

struct IdentityFlag {
    int first = 0;
    int second = 0;
    bool identical = false;
    double sup_distance = 0.0;  // max over the grid of |lambda_first - lambda_second|
};

/// The top eigenvalue of Re(e^{-i theta} A) is degenerate at theta_star.
struct DegeneracyEvent {
    double theta_star = 0.0;
    int multiplicity = 2;
    double level = 0.0;
    double gap = 0.0;           // lambda_1 - lambda_{m+1} style gap at theta_star
    double deriv_spread = 0.0;  // largest within-group derivative difference
    bool persistent = false;    // degenerate on a whole run of the grid (identical branches)
    std::vector<DerivGroup> deriv_groups;
    std::vector<IdentityFlag> identical_flags;  // pairs within each group
};

EigenBranchSet track_branches(const MatrixC& a, int n_grid, const Tolerances& tol = {});

std::vector<KippenhahnPoint> kippenhahn_curve(const EigenBranchSet& branches);

std::vector<DegeneracyEvent> find_top_degeneracies(const MatrixC& a, const EigenBranchSet& branches,
                                                   const Tolerances& tol = {});

/// Kippenhahn point e^{i theta}(level + i derivative).
ExpectedValue kippenhahn_point(double theta, double value, double derivative);

}  // namespace qmaxent
