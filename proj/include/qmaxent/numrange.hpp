#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qmaxent/qmatrix.hpp"
#include "qmaxent/tolerances.hpp"

namespace qmaxent {

/// One support line of W(A): {z : Re(e^{-i theta} z) = h}, with outward
/// normal e^{i theta}.
struct SupportSample {
    double theta = 0.0;
    double h = 0.0;                 // largest eigenvalue of Re(e^{-i theta} A)
    ExpectedValue boundary_point;   // <x, A x> for the top eigenvector x
    int top_multiplicity = 1;
};

/// Intersection of W(A) with the support line at `theta`. The face is the
/// segment {e^{i theta}(level + i s) : s in [positions.first, positions.second]}.
struct ExposedFace {
    double theta = 0.0;
    double level = 0.0;
    CMatrix eigenbasis;                  // d x m, orthonormal columns spanning the top eigenspace
    MatrixC compressed;                  // V^* A V
    std::pair<double, double> positions; // min / max eigenvalue of V^* H'(theta) V
    std::pair<ExpectedValue, ExpectedValue> endpoints;

    int multiplicity() const { return static_cast<int>(eigenbasis.cols()); }
    bool is_point(double tol) const { return positions.second - positions.first <= tol; }
};

enum class PointTag { Outside, Interior, FacetRelint, Extreme, SegmentDegenerate };

const char* to_string(PointTag tag);

struct PointClass {
    PointTag tag = PointTag::Interior;
    std::optional<double> witness_theta;
    double margin = 0.0;  // min over theta of h(theta) - Re(e^{-i theta} alpha)
};

/// Affine dimension of W(A): 0 for a point, 1 for a segment, 2 otherwise.
/// For dimension 1, Re(e^{-i normal_theta} A) is a multiple of the identity.
struct RangeShape {
    int dimension = 2;
    double normal_theta = 0.0;
};

/// The minimum of h(theta) - Re(e^{-i theta} alpha) over theta and the angle
/// attaining it. Negative when alpha lies outside W(A).
struct SupportMargin {
    double margin = 0.0;
    double theta = 0.0;
};

/// Re(e^{-i theta} A) = cos(theta) Re(A) + sin(theta) Im(A).
HermitianMatrix rotated_real_part(const MatrixC& a, double theta);
/// d/dtheta Re(e^{-i theta} A) = -sin(theta) Re(A) + cos(theta) Im(A).
HermitianMatrix rotated_derivative(const MatrixC& a, double theta);

/// Largest eigenvalue of Re(e^{-i theta} A).
double support_value(const MatrixC& a, double theta);

std::vector<SupportSample> support_scan(const MatrixC& a, int n_grid, const Tolerances& tol = {});

/// Half-plane test against every sampled support line.
bool contains(const MatrixC& a, const ExpectedValue& alpha, const std::vector<SupportSample>& scan,
              const Tolerances& tol = {});

SupportMargin support_margin(const MatrixC& a, const ExpectedValue& alpha,
                             const std::vector<SupportSample>& scan);

ExposedFace exposed_face(const MatrixC& a, double theta, const Tolerances& tol = {});

RangeShape range_shape(const MatrixC& a, const Tolerances& tol = {});

/// Interior / facet relative interior / extreme point. Throws DomainError
/// for points outside W(A).
PointClass classify_point(const MatrixC& a, const ExpectedValue& alpha,
                          const std::vector<SupportSample>& scan, const Tolerances& tol = {});

/// Angle in [0, 2 pi).
double wrap_angle(double theta);

}  // namespace qmaxent
