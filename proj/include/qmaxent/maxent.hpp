#pragma once

#include <optional>
#include <vector>

#include "qmaxent/numrange.hpp"
#include "qmaxent/qmatrix.hpp"
#include "qmaxent/random.hpp"
#include "qmaxent/tolerances.hpp"

namespace qmaxent {

/// The dual Newton iteration hit its iteration cap.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double last_residual, int iterations,
                   Eigen::Vector2d last_t = Eigen::Vector2d::Zero())
        : Error(what), last_residual_(last_residual), iterations_(iterations), last_t_(last_t) {}
    double last_residual() const { return last_residual_; }
    int iterations() const { return iterations_; }
    /// Best iterate found.
    const Eigen::Vector2d& last_t() const { return last_t_; }

private:
    double last_residual_;
    int iterations_;
    Eigen::Vector2d last_t_;
};

/// Minimizer of the dual function
///   phi(t) = log tr exp(K + t_1 Re A + t_2 Im A) - t . alpha,
/// K = log(prior) (zero for the uniform prior).
struct DualSolution {
    Eigen::Vector2d t = Eigen::Vector2d::Zero();
    DensityMatrix state;
    double residual = 0.0;  // |E_A(state) - alpha|
    int iterations = 0;
};

/// Value, gradient and exact Hessian of the dual function at t.
struct DualEvaluation {
    double value = 0.0;
    Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
    Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
    DensityMatrix state;
};

/// Exponential family exp(K + t_1 Re A + t_2 Im A) / Z with a fixed
/// log-prior K.
class DualProblem {
public:
    DualProblem(const MatrixC& a, const ExpectedValue& alpha,
                const std::optional<DensityMatrix>& prior, const Tolerances& tol = {});

    DualEvaluation evaluate(const Eigen::Vector2d& t) const;
    /// Gradient only.
    Eigen::Vector2d gradient(const Eigen::Vector2d& t) const;

    int dim() const { return static_cast<int>(re_.rows()); }

private:
    CMatrix exponent(const Eigen::Vector2d& t) const;

    CMatrix re_;
    CMatrix im_;
    CMatrix log_prior_;
    Eigen::Vector2d alpha_;
};

struct DualOptions {
    double tol = 1e-10;
    int max_iter = 200;
    std::optional<Eigen::Vector2d> start;
};

/// Damped Newton on the dual function with a pseudo-inverse Hessian (the
/// Hessian is singular when W(A) is a segment or a point). Each step is
/// followed by an exact line search on the directional derivative.
/// Throws NonConvergence at the iteration cap.
DualSolution dual_solve_interior(const MatrixC& a, const ExpectedValue& alpha,
                                 const std::optional<DensityMatrix>& prior,
                                 const DualOptions& opts, const Tolerances& tol = {});

DualSolution dual_solve_interior(const MatrixC& a, const ExpectedValue& alpha,
                                 const std::optional<DensityMatrix>& prior = std::nullopt,
                                 const Tolerances& tol = {});

/// One compression onto the top eigenspace of Re(e^{-i theta} A).
struct FaceStep {
    double theta = 0.0;
    CMatrix eigenbasis;  // columns span the face's carrier space (in the parent's coordinates)
    MatrixC compressed;
};

struct FaceChain {
    std::vector<FaceStep> steps;
    DensityMatrix final_state;  // the state in the innermost space

    /// Product of the eigenbases: isometry from the innermost space into C^d.
    CMatrix isometry(int d) const;
};

struct MaxEntResult {
    DensityMatrix state;
    FaceChain chain;
    std::optional<DualSolution> dual;  // from the innermost problem, if solved by Newton
    double residual = 0.0;             // |E_A(state) - alpha|
};

/// Maximum-entropy state (or, with a prior, minimum relative entropy state)
/// with expected values alpha. Boundary points are handled by compressing
/// onto exposed faces until alpha is interior or the face is a single state.
/// Throws DomainError if alpha lies outside W(A) or the prior is singular.
MaxEntResult maxent_infer(const MatrixC& a, const ExpectedValue& alpha,
                          const std::optional<DensityMatrix>& prior = std::nullopt,
                          const Tolerances& tol = {});

/// n random states with expected values alpha.
std::vector<DensityMatrix> fiber_sample(const MatrixC& a, const ExpectedValue& alpha, int n,
                                        Rng& rng, const Tolerances& tol = {});

}  // namespace qmaxent
