#include "qmaxent/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qmaxent {

namespace {

/// Divided difference of exp: (e^a - e^b) / (a - b), e^a on the diagonal.
double exp_kernel(double a, double b) {
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    const double diff = hi - lo;
    if (diff <= 1e-12 * std::max(1.0, std::abs(hi))) return std::exp(0.5 * (a + b));
    return std::exp(hi) * -std::expm1(-diff) / diff;
}

/// Unit vectors n with n_1 Re A + n_2 Im A a multiple of the identity.
std::vector<Eigen::Vector2d> null_directions(const MatrixC& a, const Tolerances& tol) {
    const auto shape = range_shape(a, tol);
    if (shape.dimension == 2) return {};
    if (shape.dimension == 0) return {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0)};
    return {Eigen::Vector2d(std::cos(shape.normal_theta), std::sin(shape.normal_theta))};
}

Eigen::Vector2d project_out(Eigen::Vector2d v, const std::vector<Eigen::Vector2d>& null) {
    for (const auto& n : null) v -= n * n.dot(v);
    return v;
}

double margin_at(const MatrixC& a, const ExpectedValue& alpha, double theta) {
    return support_value(a, theta) - (std::exp(Complex(0.0, -theta)) * alpha.z()).real();
}

std::optional<DensityMatrix> compress_prior(const std::optional<DensityMatrix>& prior,
                                            const CMatrix& v) {
    if (!prior) return std::nullopt;
    CMatrix p = v.adjoint() * prior->mat() * v;
    p /= p.trace().real();
    return DensityMatrix::from(p);
}

DensityMatrix lift(const CMatrix& v, const DensityMatrix& inner) {
    CMatrix rho = v * inner.mat() * v.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix::from(rho);
}

DensityMatrix infer_recursive(const MatrixC& a, const ExpectedValue& alpha,
                              const std::optional<DensityMatrix>& prior, const Tolerances& tol,
                              std::vector<FaceStep>& steps, std::optional<DualSolution>& dual) {
    const int d = a.dim();
    const double tol_int = Tolerances::scaled(tol.interior_rel, a.norm2());
    if (d == 1) {
        if (std::abs(a(0, 0) - alpha.z()) > tol_int) {
            throw DomainError("maxent_infer: point lies outside the numerical range");
        }
        return DensityMatrix();
    }

    const auto shape = range_shape(a, tol);
    const auto scan = support_scan(a, std::max(64, 16 * d), tol);
    const auto sm = support_margin(a, alpha, scan);
    if (sm.margin < -tol_int) {
        throw DomainError("maxent_infer: point (" + std::to_string(alpha.re) + ", " +
                          std::to_string(alpha.im) + ") lies outside the numerical range");
    }
    if (shape.dimension == 0) {
        return prior ? *prior : DensityMatrix::maximally_mixed(d);
    }

    auto solve = [&]() {
        dual = dual_solve_interior(a, alpha, prior, tol);
        return dual->state;
    };

    double theta = sm.theta;
    if (shape.dimension == 1) {
        const double ta = wrap_angle(shape.normal_theta + std::numbers::pi / 2);
        const double tb = wrap_angle(shape.normal_theta - std::numbers::pi / 2);
        const double ma = margin_at(a, alpha, ta);
        const double mb = margin_at(a, alpha, tb);
        if (std::min(ma, mb) > tol_int) return solve();
        theta = ma <= mb ? ta : tb;
    } else if (sm.margin > tol_int) {
        try {
            return solve();
        } catch (const NonConvergence&) {
            if (sm.margin > 10.0 * tol_int) throw;
        }
    }

    const auto face = exposed_face(a, theta, tol);
    if (face.multiplicity() == d) {
        throw Error("maxent_infer: exposed face at theta = " + std::to_string(theta) +
                    " does not reduce the dimension");
    }
    steps.push_back({theta, face.eigenbasis, face.compressed});
    const auto inner = infer_recursive(face.compressed, alpha,
                                       compress_prior(prior, face.eigenbasis), tol, steps, dual);
    return lift(face.eigenbasis, inner);
}

}  // namespace

// ---------------------------------------------------------------------------

DualProblem::DualProblem(const MatrixC& a, const ExpectedValue& alpha,
                         const std::optional<DensityMatrix>& prior, const Tolerances& tol)
    : re_(re_part(a).mat()), im_(im_part(a).mat()), alpha_(alpha.re, alpha.im) {
    const int d = a.dim();
    if (prior) {
        if (prior->dim() != d) throw DimensionMismatch(d, prior->dim());
        log_prior_ = herm_log(prior->hermitian(), tol).mat();
    } else {
        log_prior_ = CMatrix::Zero(d, d);
    }
}

CMatrix DualProblem::exponent(const Eigen::Vector2d& t) const {
    return log_prior_ + t(0) * re_ + t(1) * im_;
}

DualEvaluation DualProblem::evaluate(const Eigen::Vector2d& t) const {
    const auto eig = hermitian_eig(HermitianMatrix(exponent(t)));
    const int d = eig.dim();
    const double shift = eig.max();
    RVector x = eig.values.array() - shift;
    RVector w = x.array().exp();
    const double z = w.sum();
    const RVector p = w / z;

    DualEvaluation ev;
    const CMatrix& u = eig.vectors;
    const CMatrix rho = u * p.asDiagonal() * u.adjoint();
    ev.state = DensityMatrix::project(rho);
    const CMatrix rt = u.adjoint() * re_ * u;
    const CMatrix it = u.adjoint() * im_ * u;
    Eigen::Vector2d mean;
    mean(0) = (p.asDiagonal() * rt).trace().real();
    mean(1) = (p.asDiagonal() * it).trace().real();
    ev.value = shift + std::log(z) - t.dot(alpha_);
    ev.gradient = mean - alpha_;

    // Kubo-Mori covariance through the divided differences of exp.
    Eigen::MatrixXd kern(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) kern(i, j) = exp_kernel(x(i), x(j)) / z;
    }
    // Directions are centered first; the covariance is then a sum of
    // nonnegative-weight terms without cancellation.
    const CMatrix id = CMatrix::Identity(d, d);
    const CMatrix dirs[2] = {rt - mean(0) * id, it - mean(1) * id};
    for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
            const double h = (dirs[i].conjugate().cwiseProduct(dirs[j])).real().cwiseProduct(kern).sum();
            ev.hessian(i, j) = ev.hessian(j, i) = h;
        }
    }
    return ev;
}

Eigen::Vector2d DualProblem::gradient(const Eigen::Vector2d& t) const {
    const auto eig = hermitian_eig(HermitianMatrix(exponent(t)));
    const RVector w = (eig.values.array() - eig.max()).exp();
    const RVector p = w / w.sum();
    const CMatrix& u = eig.vectors;
    Eigen::Vector2d mean;
    mean(0) = (p.asDiagonal() * (u.adjoint() * re_ * u)).trace().real();
    mean(1) = (p.asDiagonal() * (u.adjoint() * im_ * u)).trace().real();
    return mean - alpha_;
}

DualSolution dual_solve_interior(const MatrixC& a, const ExpectedValue& alpha,
                                 const std::optional<DensityMatrix>& prior,
                                 const DualOptions& opts, const Tolerances& tol) {
    const DualProblem problem(a, alpha, prior, tol);
    const auto null = null_directions(a, tol);

    Eigen::Vector2d t = opts.start.value_or(Eigen::Vector2d::Zero());
    double residual = std::numeric_limits<double>::infinity();
    double best = residual;
    Eigen::Vector2d best_t = t;
    int stalled = 0;
    int it = 0;
    for (; it <= opts.max_iter; ++it) {
        const auto ev = problem.evaluate(t);
        residual = ev.gradient.norm();
        const Eigen::Vector2d g = project_out(ev.gradient, null);
        if (g.norm() <= opts.tol) {
            return DualSolution{t, ev.state, residual, it};
        }
        if (residual < 0.5 * best) {
            stalled = 0;
        } else if (++stalled >= 20) {
            break;  // rounding floor reached
        }
        if (residual < best) {
            best = residual;
            best_t = t;
        }
        if (it == opts.max_iter) break;

        // Pseudo-inverse Newton direction.
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(ev.hessian);
        const double lmax = std::max(es.eigenvalues()(1), 0.0);
        Eigen::Vector2d p = Eigen::Vector2d::Zero();
        for (int k = 0; k < 2; ++k) {
            const Eigen::Vector2d q = project_out(es.eigenvectors().col(k), null);
            const double l = es.eigenvalues()(k);
            if (q.norm() < 0.5 || !(l > 1e-14 * lmax) || l <= 0.0) continue;
            p -= q * (q.dot(g) / l);
        }
        if (!(p.squaredNorm() > 0.0) || g.dot(p) >= 0.0) p = -g;  // steepest descent fallback
        p = project_out(p, null);

        // Exact line search on psi(s) = grad(t + s p) . p, increasing in s.
        // Far from the solution the optimal step can be many times the
        // Newton step, so the bracket is expanded geometrically first.
        const double psi0 = g.dot(p);
        const double accept = 0.1 * std::abs(psi0);
        auto psi = [&](double s) { return project_out(problem.gradient(t + s * p), null).dot(p); };
        double lo = 0.0, psi_lo = psi0;
        double hi = 1.0, psi_hi = psi(1.0);
        while (psi_hi < -accept && hi < 1e15) {
            lo = hi;
            psi_lo = psi_hi;
            hi *= 4.0;
            psi_hi = psi(hi);
        }
        double step = hi;
        if (std::abs(psi_hi) > accept && psi_hi > 0.0) {
            step = lo;
            for (int ls = 0; ls < 200; ++ls) {
                double s = lo - psi_lo * (hi - lo) / (psi_hi - psi_lo);
                if (!(s > lo && s < hi) || ls % 3 == 2) s = 0.5 * (lo + hi);
                const double v = psi(s);
                step = s;
                if (std::abs(v) <= accept) break;
                if (v < 0.0) {
                    lo = s;
                    psi_lo = v;
                } else {
                    hi = s;
                    psi_hi = v;
                }
                if (hi - lo <= 1e-16 * hi) break;
            }
        }
        const Eigen::Vector2d next = t + step * p;
        if (next == t) break;
        t = next;
    }
    throw NonConvergence("dual_solve_interior: no convergence after " + std::to_string(it) +
                             " iterations (residual " + std::to_string(best) + ")",
                         best, it, best_t);
}

DualSolution dual_solve_interior(const MatrixC& a, const ExpectedValue& alpha,
                                 const std::optional<DensityMatrix>& prior,
                                 const Tolerances& tol) {
    return dual_solve_interior(a, alpha, prior, DualOptions{tol.dual_tol, tol.dual_max_iter, {}},
                               tol);
}

CMatrix FaceChain::isometry(int d) const {
    CMatrix v = CMatrix::Identity(d, d);
    for (const auto& s : steps) v = v * s.eigenbasis;
    return v;
}

MaxEntResult maxent_infer(const MatrixC& a, const ExpectedValue& alpha,
                          const std::optional<DensityMatrix>& prior, const Tolerances& tol) {
    if (prior) {
        if (prior->dim() != a.dim()) throw DimensionMismatch(a.dim(), prior->dim());
        // Positive definiteness is required for the relative entropy.
        (void)herm_log(prior->hermitian(), tol);
    }
    MaxEntResult out;
    out.state = infer_recursive(a, alpha, prior, tol, out.chain.steps, out.dual);
    const CMatrix iso = out.chain.isometry(a.dim());
    out.chain.final_state = DensityMatrix::project(iso.adjoint() * out.state.mat() * iso);
    out.residual = distance(expected_value(out.state, a), alpha);
    return out;
}

std::vector<DensityMatrix> fiber_sample(const MatrixC& a, const ExpectedValue& alpha, int n,
                                        Rng& rng, const Tolerances& tol) {
    std::vector<DensityMatrix> out;
    if (n <= 0) return out;
    const auto center = maxent_infer(a, alpha, std::nullopt, tol);
    const int d = a.dim();
    const CMatrix iso = center.chain.isometry(d);
    const int m = static_cast<int>(iso.cols());
    if (m == 1) {
        out.assign(n, center.state);
        return out;
    }
    const MatrixC base(iso.adjoint() * a.mat() * iso);
    const CMatrix rho0 = iso.adjoint() * center.state.mat() * iso;

    // Trace-free correction directions and their effect on the expected values.
    const CMatrix id = CMatrix::Identity(m, m);
    const CMatrix re = re_part(base).mat();
    const CMatrix im = im_part(base).mat();
    const CMatrix dirs[2] = {re - id * (re.trace() / static_cast<double>(m)),
                             im - id * (im.trace() / static_cast<double>(m))};
    Eigen::Matrix2d effect;
    for (int i = 0; i < 2; ++i) {
        effect(0, i) = hs_inner(re, dirs[i]).real();
        effect(1, i) = hs_inner(im, dirs[i]).real();
    }
    const auto pinv = effect.completeOrthogonalDecomposition();

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double tol_res = 1e-7;
    int attempts = 0;
    while (static_cast<int>(out.size()) < n) {
        if (++attempts > 100 * n + 100) {
            throw Error("fiber_sample: too many rejected samples");
        }
        const auto tau = random_density_matrix(rng, m);
        double s = 1.0 - unif(rng);  // (0, 1]
        for (int shrink = 0; shrink < 40; ++shrink, s *= 0.5) {
            const CMatrix sigma = (1.0 - s) * rho0 + s * tau.mat();
            const Complex mean = (sigma.cwiseProduct(base.mat().transpose())).sum();
            const Eigen::Vector2d delta(mean.real() - alpha.re, mean.imag() - alpha.im);
            const Eigen::Vector2d c = pinv.solve(delta);
            CMatrix corrected = sigma - c(0) * dirs[0] - c(1) * dirs[1];
            const auto eig = hermitian_eig(HermitianMatrix(corrected));
            if (eig.min() < 0.0) continue;
            corrected /= corrected.trace().real();
            const DensityMatrix lifted = lift(iso, DensityMatrix::from(corrected));
            if (distance(expected_value(lifted, a), alpha) > tol_res) break;
            out.push_back(lifted);
            break;
        }
    }
    return out;
}

}  // namespace qmaxent
