#include "qmaxent/numrange.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "golden.hpp"

namespace qmaxent {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double margin_at(const MatrixC& a, const ExpectedValue& alpha, double theta) {
    const Complex rotated = std::exp(Complex(0.0, -theta)) * alpha.z();
    return support_value(a, theta) - rotated.real();
}

}  // namespace

const char* to_string(PointTag tag) {
    switch (tag) {
        case PointTag::Outside: return "Outside";
        case PointTag::Interior: return "Interior";
        case PointTag::FacetRelint: return "FacetRelint";
        case PointTag::Extreme: return "Extreme";
        case PointTag::SegmentDegenerate: return "SegmentDegenerate";
    }
    return "?";
}

double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

HermitianMatrix rotated_real_part(const MatrixC& a, double theta) {
    return HermitianMatrix(std::cos(theta) * re_part(a).mat() + std::sin(theta) * im_part(a).mat());
}

HermitianMatrix rotated_derivative(const MatrixC& a, double theta) {
    return HermitianMatrix(-std::sin(theta) * re_part(a).mat() +
                           std::cos(theta) * im_part(a).mat());
}

double support_value(const MatrixC& a, double theta) {
    return hermitian_eig(rotated_real_part(a, theta)).max();
}

std::vector<SupportSample> support_scan(const MatrixC& a, int n_grid, const Tolerances& tol) {
    if (n_grid < 16) throw DomainError("support_scan: n_grid must be at least 16");
    const double eps_gap = Tolerances::scaled(tol.gap_rel, a.norm2());
    std::vector<SupportSample> out(n_grid);
    for (int j = 0; j < n_grid; ++j) {
        const double theta = kTwoPi * j / n_grid;
        const auto eig = hermitian_eig(rotated_real_part(a, theta));
        auto& s = out[j];
        s.theta = theta;
        s.h = eig.max();
        s.boundary_point = numerical_range_map(eig.vector(0), a);
        s.top_multiplicity = 1;
        while (s.top_multiplicity < eig.dim() &&
               eig.values(s.top_multiplicity) >= s.h - eps_gap) {
            ++s.top_multiplicity;
        }
    }
    return out;
}

bool contains(const MatrixC& a, const ExpectedValue& alpha, const std::vector<SupportSample>& scan,
              const Tolerances& tol) {
    const double slack = Tolerances::scaled(tol.interior_rel, a.norm2());
    return std::all_of(scan.begin(), scan.end(), [&](const SupportSample& s) {
        const Complex rotated = std::exp(Complex(0.0, -s.theta)) * alpha.z();
        return rotated.real() <= s.h + slack;
    });
}

SupportMargin support_margin(const MatrixC& a, const ExpectedValue& alpha,
                             const std::vector<SupportSample>& scan) {
    if (scan.empty()) throw DomainError("support_margin: empty scan");
    const int n = static_cast<int>(scan.size());
    int best = 0;
    double best_value = 0.0;
    for (int j = 0; j < n; ++j) {
        const Complex rotated = std::exp(Complex(0.0, -scan[j].theta)) * alpha.z();
        const double m = scan[j].h - rotated.real();
        if (j == 0 || m < best_value) {
            best = j;
            best_value = m;
        }
    }
    const double step = kTwoPi / n;
    const double center = scan[best].theta;
    auto [theta, value] =
        detail::golden_min([&](double t) { return margin_at(a, alpha, t); }, center - step, center + step,
                   1e-12);
    if (best_value <= value) return {best_value, center};
    return {value, wrap_angle(theta)};
}

ExposedFace exposed_face(const MatrixC& a, double theta, const Tolerances& tol) {
    const double eps_gap = Tolerances::scaled(tol.gap_rel, a.norm2());
    const auto eig = hermitian_eig(rotated_real_part(a, theta));
    int m = 1;
    while (m < eig.dim() && eig.values(m) >= eig.max() - eps_gap) ++m;

    ExposedFace face{.theta = theta,
                     .level = eig.values.head(m).mean(),
                     .eigenbasis = eig.vectors.leftCols(m),
                     .compressed = MatrixC(CMatrix::Zero(m, m)),
                     .positions = {},
                     .endpoints = {}};
    face.compressed = MatrixC(face.eigenbasis.adjoint() * a.mat() * face.eigenbasis);
    const HermitianMatrix deriv(face.eigenbasis.adjoint() * rotated_derivative(a, theta).mat() *
                                face.eigenbasis);
    const auto deig = hermitian_eig(deriv);
    face.positions = {deig.min(), deig.max()};
    const Complex rot = std::exp(Complex(0.0, theta));
    face.endpoints = {ExpectedValue::from(rot * Complex(face.level, face.positions.first)),
                      ExpectedValue::from(rot * Complex(face.level, face.positions.second))};
    return face;
}

RangeShape range_shape(const MatrixC& a, const Tolerances& tol) {
    const int d = a.dim();
    const CMatrix id = CMatrix::Identity(d, d);
    const CMatrix re = re_part(a).mat();
    const CMatrix im = im_part(a).mat();
    const CMatrix re0 = re - id * (re.trace() / static_cast<double>(d));
    const CMatrix im0 = im - id * (im.trace() / static_cast<double>(d));

    Eigen::Matrix2d gram;
    gram(0, 0) = hs_inner(re0, re0).real();
    gram(0, 1) = gram(1, 0) = hs_inner(re0, im0).real();
    gram(1, 1) = hs_inner(im0, im0).real();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(gram);

    const double eps = Tolerances::scaled(tol.gap_rel, a.norm2());
    const double smin = std::sqrt(std::max(es.eigenvalues()(0), 0.0));
    const double smax = std::sqrt(std::max(es.eigenvalues()(1), 0.0));
    RangeShape shape;
    if (smax <= eps) {
        shape.dimension = 0;
    } else if (smin <= eps) {
        shape.dimension = 1;
        const Eigen::Vector2d null = es.eigenvectors().col(0);
        shape.normal_theta = wrap_angle(std::atan2(null(1), null(0)));
    }
    return shape;
}

PointClass classify_point(const MatrixC& a, const ExpectedValue& alpha,
                          const std::vector<SupportSample>& scan, const Tolerances& tol) {
    const double norm = a.norm2();
    const double tol_int = Tolerances::scaled(tol.interior_rel, norm);
    const auto sm = support_margin(a, alpha, scan);
    if (sm.margin < -tol_int) {
        throw DomainError("classify_point: point (" + std::to_string(alpha.re) + ", " +
                          std::to_string(alpha.im) + ") lies outside the numerical range");
    }
    PointClass pc;
    pc.margin = sm.margin;
    if (range_shape(a, tol).dimension < 2) {
        pc.tag = PointTag::SegmentDegenerate;
        return pc;
    }
    if (sm.margin > tol_int) {
        pc.tag = PointTag::Interior;
        return pc;
    }
    pc.witness_theta = sm.theta;
    const auto face = exposed_face(a, sm.theta, tol);
    const double s = (std::exp(Complex(0.0, -sm.theta)) * alpha.z()).imag();
    const bool at_end = std::abs(s - face.positions.first) <= tol_int ||
                        std::abs(s - face.positions.second) <= tol_int;
    pc.tag = (face.is_point(tol_int) || at_end) ? PointTag::Extreme : PointTag::FacetRelint;
    return pc;
}

}  // namespace qmaxent
