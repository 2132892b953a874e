#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmaxent/eigencurves.hpp"
#include "qmaxent/maxent.hpp"
#include "qmaxent/numrange.hpp"
#include "qmaxent/qmatrix.hpp"
#include "qmaxent/tolerances.hpp"

namespace qmaxent {

enum class VerdictStatus { Continuous, Discontinuous, IdenticalBranches, Inconclusive };
const char* to_string(VerdictStatus s);

/// Corroboration class of an oracle run.
enum class OracleClass { Continuous, Discontinuous, Inconclusive };
const char* to_string(OracleClass c);

struct OracleProbe {
    ExpectedValue alpha;
    double margin = 0.0;  // distance-like depth inside W(A)
    double gap = 0.0;     // trace distance to the state at the center
    int iterations = 0;
};

struct OracleRadius {
    double radius = 0.0;
    double max_gap = 0.0;
    bool skipped = false;  // no interior points found on this circle
    int failures = 0;      // probes whose dual solve did not converge
    std::vector<OracleProbe> probes;
};

struct OracleResult {
    ExpectedValue alpha;
    double max_gap = 0.0;  // over the smallest evaluated radius
    OracleClass classification = OracleClass::Inconclusive;
    std::vector<OracleRadius> radii;
};

struct Verdict {
    ExpectedValue alpha;
    double theta_star = 0.0;
    VerdictStatus status = VerdictStatus::Inconclusive;
    PointTag tag = PointTag::Extreme;
    std::vector<int> branches;
    DerivGroup group;
    std::vector<IdentityFlag> identity_flags;
    double confidence = 0.0;
    std::optional<OracleResult> oracle;
    bool oracle_agrees = true;
};

/// Exposed face of positive length.
struct Facet {
    double theta = 0.0;
    ExpectedValue first;
    ExpectedValue second;
};

struct ContinuityConfig {
    int n_grid = 4096;
    Tolerances tol;
    std::vector<double> radii{1e-2, 1e-3, 1e-4};
    int n_directions = 16;
    bool run_oracle = true;
};

struct ContinuityReport {
    int d = 0;
    double norm = 0.0;
    ContinuityConfig config;
    int range_dimension = 2;
    bool segment_degenerate = false;
    std::vector<DegeneracyEvent> events;
    std::vector<Verdict> verdicts;
    std::vector<Verdict> corners;  // simple-top corners of W(A), continuous
    std::vector<Facet> facets;

    int count(VerdictStatus s) const;
    bool has_disagreement() const;
    /// 0 complete, 2 Inconclusive verdicts present, 3 detector/oracle disagreement.
    int exit_code() const;
};

/// Tracking failed; carries what was computed before the failure.
class AnalysisFailure : public Error {
public:
    AnalysisFailure(const std::string& what, ContinuityReport partial)
        : Error(what), partial_(std::move(partial)) {}
    const ContinuityReport& partial() const { return partial_; }

private:
    ContinuityReport partial_;
};

/// Discontinuity points of the maximum-entropy inference map.
ContinuityReport detect_discontinuities(const MatrixC& a, const ContinuityConfig& config = {});

/// Sequential-continuity oracle: states at points on circles of the given
/// radii about alpha, compared in trace distance with the state at alpha.
OracleResult oracle_check(const MatrixC& a, const ExpectedValue& alpha,
                          const std::vector<double>& radii, int n_directions,
                          const std::optional<DensityMatrix>& prior = std::nullopt,
                          const Tolerances& tol = {});

OracleClass classify_oracle(const OracleResult& result, const Tolerances& tol = {});

struct PriorInvariance {
    bool invariant = true;
    std::vector<ExpectedValue> candidates;
    /// classes[p][c]: class for prior p at candidate c. Row 0 is the uniform prior.
    std::vector<std::vector<OracleClass>> classes;
    std::vector<std::vector<double>> max_gaps;
    /// Candidates classified Discontinuous, per row.
    std::vector<std::vector<ExpectedValue>> discontinuities;
};

/// Runs the oracle with each prior at every candidate of the detector.
PriorInvariance prior_invariance_check(const MatrixC& a, const std::vector<DensityMatrix>& priors,
                                       const ContinuityConfig& config = {});

}  // namespace qmaxent
