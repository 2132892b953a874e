#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "qmaxent/tolerances.hpp"

namespace qmaxent {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eigensolver did not converge.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, double matrix_norm)
        : Error(what), matrix_norm_(matrix_norm) {}
    double matrix_norm() const { return matrix_norm_; }

private:
    double matrix_norm_;
};

/// Argument outside the domain of an operation (log of a singular matrix,
/// invalid state, point outside the numerical range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(int expected, int got)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(got)) {}
};

// ---------------------------------------------------------------------------
// Value types

/// Point of the complex plane, identified with the pair of expected values
/// (<Re A>, <Im A>).
struct ExpectedValue {
    double re = 0.0;
    double im = 0.0;

    Complex z() const { return {re, im}; }
    static ExpectedValue from(Complex z) { return {z.real(), z.imag()}; }
};

inline double distance(const ExpectedValue& a, const ExpectedValue& b) {
    return std::abs(a.z() - b.z());
}

/// Dense complex square matrix.
class MatrixC {
public:
    explicit MatrixC(CMatrix m);

    static MatrixC zero(int d) { return MatrixC(CMatrix::Zero(d, d)); }
    static MatrixC identity(int d) { return MatrixC(CMatrix::Identity(d, d)); }

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& mat() const { return m_; }
    Complex operator()(int i, int j) const { return m_(i, j); }

    /// Spectral norm (largest singular value).
    double norm2() const;

private:
    CMatrix m_;
};

/// Complex Hermitian matrix. The constructor symmetrizes its argument,
/// (M + M*) / 2, so entries(i,j) == conj(entries(j,i)) holds exactly.
class HermitianMatrix {
public:
    explicit HermitianMatrix(const CMatrix& m);

    static HermitianMatrix zero(int d) { return HermitianMatrix(CMatrix::Zero(d, d)); }
    static HermitianMatrix identity(int d) { return HermitianMatrix(CMatrix::Identity(d, d)); }

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& mat() const { return m_; }
    Complex operator()(int i, int j) const { return m_(i, j); }
    double trace() const { return m_.trace().real(); }

private:
    CMatrix m_;
};

/// Unit vector of C^d.
class UnitVector {
public:
    /// Throws DomainError unless |v| = 1 within 1e-12.
    explicit UnitVector(CVector v);
    /// Normalizes a nonzero vector.
    static UnitVector normalized(const CVector& v);
    static UnitVector basis(int d, int k);

    int dim() const { return static_cast<int>(v_.size()); }
    const CVector& vec() const { return v_; }
    Complex operator[](int k) const { return v_(k); }

private:
    struct Trusted {};
    UnitVector(CVector v, Trusted) : v_(std::move(v)) {}
    CVector v_;
};

/// Quantum state: positive semidefinite Hermitian matrix of unit trace.
class DensityMatrix {
public:
    /// The 1x1 state [1].
    DensityMatrix() : h_(HermitianMatrix::identity(1)) {}
    /// Validates trace and positivity against `tol`; throws DomainError.
    static DensityMatrix from(const CMatrix& m, const Tolerances& tol = {});
    /// Hermitizes, clamps negative eigenvalues to zero and renormalizes.
    static DensityMatrix project(const CMatrix& m);
    static DensityMatrix maximally_mixed(int d);

    int dim() const { return h_.dim(); }
    const CMatrix& mat() const { return h_.mat(); }
    const HermitianMatrix& hermitian() const { return h_; }
    Complex operator()(int i, int j) const { return h_(i, j); }

private:
    explicit DensityMatrix(HermitianMatrix h) : h_(std::move(h)) {}
    HermitianMatrix h_;
};

/// Spectral decomposition with eigenvalues in descending order. Column k of
/// `vectors` is the unit eigenvector for values(k).
struct EigDecomposition {
    RVector values;
    CMatrix vectors;

    int dim() const { return static_cast<int>(values.size()); }
    double max() const { return values(0); }
    double min() const { return values(values.size() - 1); }
    UnitVector vector(int k) const { return UnitVector::normalized(vectors.col(k)); }
};

// ---------------------------------------------------------------------------
// Operations

/// Full spectral decomposition of a Hermitian matrix.
///
/// The complex problem is solved through the real symmetric embedding
/// [[Re H, -Im H], [Im H, Re H]], whose spectrum is that of H with every
/// eigenvalue doubled. Each eigenvalue pair maps to a single complex
/// eigenvector v = a + i b; partners (i v) are removed by Gram-Schmidt.
/// Eigenvectors are phase-fixed so that their largest component is real
/// and positive. Throws SolverFailure on non-convergence.
EigDecomposition hermitian_eig(const HermitianMatrix& h);

/// Functional calculus sum_k f(lambda_k) v_k v_k^*.
HermitianMatrix herm_map(const HermitianMatrix& h, const std::function<double(double)>& f);
HermitianMatrix herm_map(const EigDecomposition& eig, const std::function<double(double)>& f);

HermitianMatrix herm_exp(const HermitianMatrix& h);
/// Matrix logarithm; throws DomainError if an eigenvalue is <= tol.log_floor.
HermitianMatrix herm_log(const HermitianMatrix& h, const Tolerances& tol = {});
/// Square root of a positive semidefinite matrix, negative eigenvalues clamped to zero.
HermitianMatrix herm_sqrt_psd(const HermitianMatrix& h);

HermitianMatrix re_part(const MatrixC& a);
HermitianMatrix im_part(const MatrixC& a);

/// (tr(rho Re A), tr(rho Im A)).
ExpectedValue expected_value(const DensityMatrix& rho, const MatrixC& a);

/// Numerical range map x -> <x, A x>.
ExpectedValue numerical_range_map(const UnitVector& x, const MatrixC& a);

/// Pure state |x><x|.
DensityMatrix beta(const UnitVector& x);

/// Half the trace norm of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
/// || sqrt(rho) sqrt(sigma) ||_1.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// -tr(rho log rho), with 0 log 0 = 0.
double von_neumann_entropy(const DensityMatrix& rho);
/// Umegaki relative entropy tr sigma (log sigma - log rho). Throws DomainError
/// if rho is singular.
double relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho,
                        const Tolerances& tol = {});

/// Frobenius inner product <X, Y> = tr(X^* Y).
Complex hs_inner(const CMatrix& x, const CMatrix& y);

}  // namespace qmaxent
