#include "qmaxent/qmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qmaxent {

MatrixC::MatrixC(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
        throw DomainError("MatrixC: expected a nonempty square matrix, got " +
                          std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
    }
}

double MatrixC::norm2() const {
    Eigen::JacobiSVD<CMatrix> svd(m_);
    return svd.singularValues()(0);
}

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
        throw DomainError("HermitianMatrix: expected a nonempty square matrix");
    }
    m_ = 0.5 * (m + m.adjoint());
    // The average above is Hermitian up to rounding in the sum; copy the
    // upper triangle so the symmetry is exact.
    const auto d = m_.rows();
    for (Eigen::Index i = 0; i < d; ++i) {
        m_(i, i) = Complex(m_(i, i).real(), 0.0);
        for (Eigen::Index j = i + 1; j < d; ++j) m_(j, i) = std::conj(m_(i, j));
    }
}

UnitVector::UnitVector(CVector v) : v_(std::move(v)) {
    if (v_.size() < 1 || std::abs(v_.norm() - 1.0) > 1e-12) {
        throw DomainError("UnitVector: norm differs from 1");
    }
}

UnitVector UnitVector::normalized(const CVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("UnitVector: zero or non-finite vector");
    return UnitVector(CVector(v / n), Trusted{});
}

UnitVector UnitVector::basis(int d, int k) {
    CVector v = CVector::Zero(d);
    v(k) = 1.0;
    return UnitVector(std::move(v), Trusted{});
}

DensityMatrix DensityMatrix::from(const CMatrix& m, const Tolerances& tol) {
    HermitianMatrix h(m);
    const double tr = h.trace();
    if (!std::isfinite(tr) || std::abs(tr - 1.0) > tol.trace_slack) {
        throw DomainError("DensityMatrix: trace " + std::to_string(tr) + " differs from 1");
    }
    const double lmin = hermitian_eig(h).min();
    if (lmin < -tol.psd_slack) {
        throw DomainError("DensityMatrix: negative eigenvalue " + std::to_string(lmin));
    }
    return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::project(const CMatrix& m) {
    const auto eig = hermitian_eig(HermitianMatrix(m));
    RVector w = eig.values.cwiseMax(0.0);
    const double s = w.sum();
    if (!(s > 0.0)) throw DomainError("DensityMatrix::project: no positive spectrum");
    w /= s;
    CMatrix rho = eig.vectors * w.asDiagonal() * eig.vectors.adjoint();
    // Enforce unit trace exactly after the reconstruction.
    rho /= rho.trace().real();
    return DensityMatrix(HermitianMatrix(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
    return DensityMatrix(HermitianMatrix(CMatrix::Identity(d, d) / static_cast<double>(d)));
}

// ---------------------------------------------------------------------------

EigDecomposition hermitian_eig(const HermitianMatrix& h) {
    const int d = h.dim();
    const Eigen::MatrixXd re = h.mat().real();
    const Eigen::MatrixXd im = h.mat().imag();

    Eigen::MatrixXd m(2 * d, 2 * d);
    m.topLeftCorner(d, d) = re;
    m.topRightCorner(d, d) = -im;
    m.bottomLeftCorner(d, d) = im;
    m.bottomRightCorner(d, d) = re;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
        const double norm = h.mat().norm();
        throw SolverFailure("hermitian_eig: eigensolver did not converge (|H|_F = " +
                                std::to_string(norm) + ")",
                            norm);
    }

    // Walk the real spectrum from the top; each complex eigenvector appears
    // twice (as v and i v). Keep a vector only if it is independent of the
    // ones already accepted.
    std::vector<CVector> accepted;
    accepted.reserve(d);
    std::vector<bool> used(2 * d, false);
    for (double threshold : {0.5, 1e-3}) {
        for (int r = 2 * d - 1; r >= 0 && static_cast<int>(accepted.size()) < d; --r) {
            if (used[r]) continue;
            const auto col = es.eigenvectors().col(r);
            CVector v(d);
            for (int i = 0; i < d; ++i) v(i) = Complex(col(i), col(i + d));
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& u : accepted) v -= u * u.dot(v);
            }
            const double n = v.norm();
            if (n > threshold * col.norm()) {
                accepted.push_back(v / n);
                used[r] = true;
            }
        }
    }
    if (static_cast<int>(accepted.size()) != d) {
        const double norm = h.mat().norm();
        throw SolverFailure("hermitian_eig: could not recover a complex eigenbasis", norm);
    }

    std::vector<double> rayleigh(d);
    for (int k = 0; k < d; ++k) {
        rayleigh[k] = accepted[k].dot(h.mat() * accepted[k]).real();
    }
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return rayleigh[a] > rayleigh[b]; });

    EigDecomposition out;
    out.values.resize(d);
    out.vectors.resize(d, d);
    for (int k = 0; k < d; ++k) {
        CVector v = accepted[order[k]];
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        const Complex phase = v(imax) / std::abs(v(imax));
        v *= std::conj(phase);
        v(imax) = Complex(v(imax).real(), 0.0);
        out.values(k) = rayleigh[order[k]];
        out.vectors.col(k) = v;
    }
    return out;
}

HermitianMatrix herm_map(const EigDecomposition& eig, const std::function<double(double)>& f) {
    RVector w(eig.dim());
    for (int k = 0; k < eig.dim(); ++k) w(k) = f(eig.values(k));
    return HermitianMatrix(eig.vectors * w.asDiagonal() * eig.vectors.adjoint());
}

HermitianMatrix herm_map(const HermitianMatrix& h, const std::function<double(double)>& f) {
    return herm_map(hermitian_eig(h), f);
}

HermitianMatrix herm_exp(const HermitianMatrix& h) {
    return herm_map(h, [](double x) { return std::exp(x); });
}

HermitianMatrix herm_log(const HermitianMatrix& h, const Tolerances& tol) {
    const auto eig = hermitian_eig(h);
    if (eig.min() <= tol.log_floor) {
        throw DomainError("herm_log: eigenvalue " + std::to_string(eig.min()) +
                          " is not strictly positive");
    }
    return herm_map(eig, [](double x) { return std::log(x); });
}

HermitianMatrix herm_sqrt_psd(const HermitianMatrix& h) {
    return herm_map(h, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

HermitianMatrix re_part(const MatrixC& a) { return HermitianMatrix(a.mat()); }

HermitianMatrix im_part(const MatrixC& a) {
    // (A - A*) / (2i) = Re(-i A)
    return HermitianMatrix(Complex(0.0, -1.0) * a.mat());
}

ExpectedValue expected_value(const DensityMatrix& rho, const MatrixC& a) {
    if (rho.dim() != a.dim()) throw DimensionMismatch(a.dim(), rho.dim());
    // tr(rho A) = <Re A> + i <Im A> because rho is Hermitian.
    const Complex t = (rho.mat().cwiseProduct(a.mat().transpose())).sum();
    return {t.real(), t.imag()};
}

ExpectedValue numerical_range_map(const UnitVector& x, const MatrixC& a) {
    if (x.dim() != a.dim()) throw DimensionMismatch(a.dim(), x.dim());
    return ExpectedValue::from(x.vec().dot(a.mat() * x.vec()));
}

DensityMatrix beta(const UnitVector& x) {
    return DensityMatrix::from(x.vec() * x.vec().adjoint());
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionMismatch(rho.dim(), sigma.dim());
    const auto eig = hermitian_eig(HermitianMatrix(rho.mat() - sigma.mat()));
    return std::min(1.0, 0.5 * eig.values.cwiseAbs().sum());
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionMismatch(rho.dim(), sigma.dim());
    // || sqrt(rho) sqrt(sigma) ||_1 = tr sqrt(sqrt(sigma) rho sqrt(sigma))
    const CMatrix s = herm_sqrt_psd(sigma.hermitian()).mat();
    const auto eig = hermitian_eig(HermitianMatrix(s * rho.mat() * s));
    double f = 0.0;
    for (int k = 0; k < eig.dim(); ++k) f += std::sqrt(std::max(eig.values(k), 0.0));
    return std::clamp(f, 0.0, 1.0);
}

namespace {
double entropy_of_spectrum(const RVector& p) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        if (p(k) > 0.0) s -= p(k) * std::log(p(k));
    }
    return s;
}
}  // namespace

double von_neumann_entropy(const DensityMatrix& rho) {
    const auto eig = hermitian_eig(rho.hermitian());
    return std::max(0.0, entropy_of_spectrum(eig.values));
}

double relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho,
                        const Tolerances& tol) {
    if (rho.dim() != sigma.dim()) throw DimensionMismatch(rho.dim(), sigma.dim());
    const CMatrix log_rho = herm_log(rho.hermitian(), tol).mat();
    const double neg_entropy = -von_neumann_entropy(sigma);
    const double cross = hs_inner(sigma.mat(), log_rho).real();
    return std::max(0.0, neg_entropy - cross);
}

Complex hs_inner(const CMatrix& x, const CMatrix& y) {
    return (x.conjugate().cwiseProduct(y)).sum();
}

}  // namespace qmaxent
