#include "qmaxent/continuity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qmaxent {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxProbes = 500;

/// Ratio of a quantity to its decision threshold, folded so that 1 means
/// "on the threshold" and values near 0 mean "far from it".
double closeness(double value, double threshold) {
    if (!(threshold > 0.0)) return 0.0;
    if (value <= 0.0) return 0.0;
    return std::min(value / threshold, threshold / value);
}

double below(double value, double threshold) {
    return threshold > 0.0 ? std::max(0.0, value) / threshold : 0.0;
}

double above(double value, double threshold) {
    if (value <= 0.0) return std::numeric_limits<double>::infinity();
    return threshold / value;
}

bool agrees(VerdictStatus s, OracleClass c) {
    if (c == OracleClass::Inconclusive || s == VerdictStatus::Inconclusive) return true;
    if (s == VerdictStatus::Discontinuous) return c == OracleClass::Discontinuous;
    return c == OracleClass::Continuous;
}

VerdictStatus merge_status(VerdictStatus a, VerdictStatus b) {
    return a == b ? a : VerdictStatus::Inconclusive;
}

Verdict judge_candidate(const MatrixC& a, const DegeneracyEvent& ev, const DerivGroup& group,
                        const std::vector<SupportSample>& scan, const Tolerances& tol) {
    const double norm = a.norm2();
    const double eps_gap = Tolerances::scaled(tol.gap_rel, norm);
    const double eps_deriv = Tolerances::scaled(tol.deriv_rel, norm);
    const double eps_id = Tolerances::scaled(tol.identity_rel, norm);
    const double tol_int = Tolerances::scaled(tol.interior_rel, norm);

    Verdict v;
    v.theta_star = ev.theta_star;
    v.alpha = kippenhahn_point(ev.theta_star, ev.level, group.derivative);
    v.branches = group.branches;
    v.group = group;
    for (const auto& f : ev.identical_flags) {
        const bool in_group =
            std::find(group.branches.begin(), group.branches.end(), f.first) != group.branches.end();
        if (in_group) v.identity_flags.push_back(f);
    }

    // Closeness of every decision quantity to its threshold.
    double worst = 0.0;
    worst = std::max(worst, below(ev.gap, eps_gap));
    const auto eig = hermitian_eig(rotated_real_part(a, ev.theta_star));
    if (ev.multiplicity < a.dim()) {
        worst = std::max(worst, above(eig.values(ev.multiplicity - 1) - eig.values(ev.multiplicity),
                                      eps_gap));
    }
    const auto face = exposed_face(a, ev.theta_star, tol);
    const CMatrix cd = face.eigenbasis.adjoint() * rotated_derivative(a, ev.theta_star).mat() *
                       face.eigenbasis;
    const auto deig = hermitian_eig(HermitianMatrix(cd));
    double spread_in = 0.0;
    double sep_out = std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int k = 0; k < deig.dim(); ++k) {
        const double dist = std::abs(deig.values(k) - group.derivative);
        if (dist <= eps_deriv) {
            lo = std::min(lo, deig.values(k));
            hi = std::max(hi, deig.values(k));
        } else {
            sep_out = std::min(sep_out, dist);
        }
    }
    if (hi >= lo) spread_in = hi - lo;
    worst = std::max(worst, below(spread_in, eps_deriv));
    if (std::isfinite(sep_out)) worst = std::max(worst, above(sep_out, eps_deriv));
    for (const auto& f : v.identity_flags) worst = std::max(worst, closeness(f.sup_distance, eps_id));

    PointClass pc;
    try {
        pc = classify_point(a, v.alpha, scan, tol);
    } catch (const DomainError&) {
        v.tag = PointTag::Outside;
        v.status = VerdictStatus::Inconclusive;
        v.confidence = 0.0;
        return v;
    }
    v.tag = pc.tag;
    const double length = face.positions.second - face.positions.first;
    if (length <= tol_int) {
        worst = std::max(worst, below(length, tol_int));
    } else {
        const double e = std::min(std::abs(group.derivative - face.positions.first),
                                  std::abs(face.positions.second - group.derivative));
        worst = std::max(worst, closeness(e, tol_int));
    }

    if (pc.tag == PointTag::FacetRelint || pc.tag == PointTag::Interior) {
        v.status = VerdictStatus::Continuous;
    } else {
        const bool all_identical =
            std::all_of(v.identity_flags.begin(), v.identity_flags.end(),
                        [](const IdentityFlag& f) { return f.identical; });
        v.status = all_identical ? VerdictStatus::IdenticalBranches : VerdictStatus::Discontinuous;
    }
    v.confidence = std::clamp(1.0 - worst, 0.0, 1.0);
    if (worst > 0.1) v.status = VerdictStatus::Inconclusive;
    return v;
}

/// Runs of grid columns on which the simple top branch has a constant
/// Kippenhahn point: corners of W(A) that are not degeneracies.
std::vector<Verdict> find_corners(const MatrixC& a, const EigenBranchSet& br,
                                  const Tolerances& tol) {
    const int d = br.dim();
    const int n = br.size();
    std::vector<Verdict> out;
    if (n < 3) return out;
    const double norm = a.norm2();
    const double eps_gap = Tolerances::scaled(tol.gap_rel, norm);
    const double eps_z = 1e-9 * (1.0 + norm);

    std::vector<int> top(n);
    std::vector<bool> simple(n, true);
    std::vector<Complex> z(n);
    for (int j = 0; j < n; ++j) {
        int k = 0;
        br.values.col(j).maxCoeff(&k);
        top[j] = k;
        for (int l = 0; l < d; ++l) {
            if (l != k && br.values(k, j) - br.values(l, j) <= eps_gap) simple[j] = false;
        }
        z[j] = kippenhahn_point(br.grid[j], br.values(k, j), br.derivs(k, j)).z();
    }
    // link[j]: columns j-1 and j see the same corner.
    std::vector<bool> link(n);
    for (int j = 0; j < n; ++j) {
        const int p = (j + n - 1) % n;
        link[j] = simple[j] && simple[p] && top[j] == top[p] && std::abs(z[j] - z[p]) <= eps_z;
    }
    int start = 0;
    while (start < n && link[start]) ++start;
    if (start == n) return out;
    for (int off = 1; off <= n; ++off) {
        const int j = (start + off) % n;
        if (!link[j] || link[(j + n - 1) % n]) continue;
        int len = 0;
        while (link[(j + len) % n]) ++len;
        if (len < 2) continue;
        const int mid = (j - 1 + (len + 1) / 2 + n) % n;
        Verdict v;
        v.theta_star = br.grid[mid];
        v.alpha = ExpectedValue::from(z[mid]);
        v.branches = {top[mid]};
        v.group = {br.derivs(top[mid], mid), {top[mid]}};
        v.tag = PointTag::Extreme;
        v.status = VerdictStatus::Continuous;
        v.confidence = 1.0;
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Verdict> merge_by_alpha(std::vector<Verdict> in, double tol) {
    std::vector<Verdict> out;
    for (auto& v : in) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const Verdict& w) { return distance(w.alpha, v.alpha) <= tol; });
        if (it == out.end()) {
            out.push_back(std::move(v));
            continue;
        }
        it->status = merge_status(it->status, v.status);
        it->confidence = std::min(it->confidence, v.confidence);
        for (int b : v.branches) {
            if (std::find(it->branches.begin(), it->branches.end(), b) == it->branches.end()) {
                it->branches.push_back(b);
            }
        }
        std::sort(it->branches.begin(), it->branches.end());
        it->identity_flags.insert(it->identity_flags.end(), v.identity_flags.begin(),
                                  v.identity_flags.end());
    }
    return out;
}

double margin_of(const MatrixC& a, const ExpectedValue& beta,
                 const std::vector<SupportSample>& scan) {
    return support_margin(a, beta, scan).margin;
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Continuous: return "Continuous";
        case VerdictStatus::Discontinuous: return "Discontinuous";
        case VerdictStatus::IdenticalBranches: return "IdenticalBranches";
        case VerdictStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

const char* to_string(OracleClass c) {
    switch (c) {
        case OracleClass::Continuous: return "Continuous";
        case OracleClass::Discontinuous: return "Discontinuous";
        case OracleClass::Inconclusive: return "Inconclusive";
    }
    return "?";
}

int ContinuityReport::count(VerdictStatus s) const {
    return static_cast<int>(std::count_if(verdicts.begin(), verdicts.end(),
                                          [&](const Verdict& v) { return v.status == s; }));
}

bool ContinuityReport::has_disagreement() const {
    auto bad = [](const Verdict& v) { return !v.oracle_agrees; };
    return std::any_of(verdicts.begin(), verdicts.end(), bad) ||
           std::any_of(corners.begin(), corners.end(), bad);
}

int ContinuityReport::exit_code() const {
    if (has_disagreement()) return 3;
    auto open = [](const Verdict& v) {
        return v.status == VerdictStatus::Inconclusive ||
               (v.oracle && v.oracle->classification == OracleClass::Inconclusive);
    };
    if (std::any_of(verdicts.begin(), verdicts.end(), open) ||
        std::any_of(corners.begin(), corners.end(), open)) {
        return 2;
    }
    return 0;
}

ContinuityReport detect_discontinuities(const MatrixC& a, const ContinuityConfig& config) {
    ContinuityReport report;
    report.d = a.dim();
    report.norm = a.norm2();
    report.config = config;
    report.config.n_grid = std::max(config.n_grid, 64 * a.dim());
    const Tolerances& tol = config.tol;

    const auto shape = range_shape(a, tol);
    report.range_dimension = shape.dimension;
    if (shape.dimension < 2) {
        report.segment_degenerate = true;
        return report;
    }

    EigenBranchSet branches;
    try {
        branches = track_branches(a, report.config.n_grid, tol);
        report.events = find_top_degeneracies(a, branches, tol);
    } catch (const TrackingFailure& e) {
        throw AnalysisFailure(e.what(), report);
    }

    const auto scan = support_scan(a, std::max(1024, 16 * a.dim()), tol);
    const double tol_int = Tolerances::scaled(tol.interior_rel, report.norm);
    std::vector<Verdict> found;
    for (const auto& ev : report.events) {
        for (const auto& g : ev.deriv_groups) {
            if (g.branches.size() < 2) continue;
            found.push_back(judge_candidate(a, ev, g, scan, tol));
        }
        const auto face = exposed_face(a, ev.theta_star, tol);
        if (!face.is_point(tol_int)) {
            report.facets.push_back({ev.theta_star, face.endpoints.first, face.endpoints.second});
        }
    }
    const double merge_tol = 1e-6 * (1.0 + report.norm);
    report.verdicts = merge_by_alpha(std::move(found), merge_tol);
    for (auto& c : find_corners(a, branches, tol)) {
        const bool known = std::any_of(report.verdicts.begin(), report.verdicts.end(),
                                       [&](const Verdict& v) { return distance(v.alpha, c.alpha) <= merge_tol; });
        if (!known) report.corners.push_back(std::move(c));
    }

    if (config.run_oracle) {
        auto run = [&](Verdict& v) {
            v.oracle = oracle_check(a, v.alpha, config.radii, config.n_directions, std::nullopt, tol);
            v.oracle_agrees = agrees(v.status, v.oracle->classification);
        };
        for (auto& v : report.verdicts) run(v);
        for (auto& v : report.corners) run(v);
    }
    return report;
}

OracleClass classify_oracle(const OracleResult& result, const Tolerances& tol) {
    std::vector<double> gaps;
    for (const auto& r : result.radii) {
        if (!r.skipped) gaps.push_back(r.max_gap);
    }
    if (gaps.empty()) return OracleClass::Inconclusive;
    if (gaps.back() <= tol.oracle_continuous) return OracleClass::Continuous;
    if (gaps.size() >= 2 && gaps[gaps.size() - 1] >= tol.oracle_discontinuous &&
        gaps[gaps.size() - 2] >= tol.oracle_discontinuous) {
        return OracleClass::Discontinuous;
    }
    return OracleClass::Inconclusive;
}

OracleResult oracle_check(const MatrixC& a, const ExpectedValue& alpha,
                          const std::vector<double>& radii, int n_directions,
                          const std::optional<DensityMatrix>& prior, const Tolerances& tol) {
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] < radii[i - 1]))) {
            throw DomainError("oracle_check: radii must be positive and strictly decreasing");
        }
    }
    if (n_directions < 1) throw DomainError("oracle_check: n_directions must be positive");

    const double norm = a.norm2();
    const double tol_int = Tolerances::scaled(tol.interior_rel, norm);
    const double depth_min = 1e-13 * (1.0 + norm);
    const auto scan = support_scan(a, std::max(256, 16 * a.dim()), tol);
    const auto sm = support_margin(a, alpha, scan);
    if (sm.margin < -tol_int) {
        throw DomainError("oracle_check: point lies outside the numerical range");
    }

    OracleResult result;
    result.alpha = alpha;
    const DensityMatrix center = maxent_infer(a, alpha, prior, tol).state;
    const bool boundary = sm.margin <= tol_int;
    const bool flat = range_shape(a, tol).dimension < 2;
    const double inward = sm.theta + kPi;

    int budget = kMaxProbes;
    for (double r : radii) {
        OracleRadius rad;
        rad.radius = r;
        if (flat) {
            rad.skipped = true;
            result.radii.push_back(std::move(rad));
            continue;
        }
        auto point = [&](double phi) {
            return ExpectedValue::from(alpha.z() + std::polar(r, phi));
        };
        auto depth = [&](double phi) { return margin_of(a, point(phi), scan); };

        std::optional<Eigen::Vector2d> warm;
        auto probe = [&](double phi, double m) {
            if (budget <= 0) return;
            --budget;
            OracleProbe p;
            p.alpha = point(phi);
            p.margin = m;
            DualOptions opts;
            opts.tol = std::clamp(1e-3 * m, 1e-14 * (1.0 + norm), tol.dual_tol);
            opts.max_iter = 500;
            opts.start = warm;
            std::optional<DensityMatrix> state;
            try {
                const auto sol = dual_solve_interior(a, p.alpha, prior, opts, tol);
                warm = sol.t;
                state = sol.state;
                p.iterations = sol.iterations;
            } catch (const NonConvergence& e) {
                // Near the boundary the residual floor set by rounding can
                // exceed the target depth. The last iterate is still the
                // exact solution for its own expected values, which are
                // used as the probe point when they stay on the circle.
                if (e.last_residual() <= 1e-3 * r) {
                    warm = e.last_t();
                    state = DualProblem(a, p.alpha, prior, tol).evaluate(e.last_t()).state;
                    p.alpha = expected_value(*state, a);
                    p.margin = margin_of(a, p.alpha, scan);
                    p.iterations = e.iterations();
                }
            }
            if (!state) {
                ++rad.failures;
                return;
            }
            p.gap = trace_distance(*state, center);
            rad.max_gap = std::max(rad.max_gap, p.gap);
            rad.probes.push_back(p);
        };

        // Uniform directions: the inward half circle at boundary points.
        for (int j = 0; j < n_directions; ++j) {
            const double phi = boundary ? inward - kPi / 2 + (j + 0.5) * kPi / n_directions
                                        : 2.0 * kPi * j / n_directions;
            const double m = depth(phi);
            if (m > depth_min) probe(phi, m);
        }

        // Geometric approach to both ends of the arc inside W(A).
        if (boundary && depth(inward) > depth_min) {
            const double m_in = depth(inward);
            for (int side : {-1, 1}) {
                double lo = inward;
                double hi = inward + side * kPi;
                if (depth(hi) > 0.0) continue;  // the whole circle is inside
                for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (depth(mid) > 0.0 ? lo : hi) = mid;
                }
                const double end = hi;
                warm.reset();
                for (double target = 0.5 * std::min(r, m_in); target > depth_min; target *= 0.5) {
                    double a_in = inward;
                    double a_out = end;
                    double m = m_in;
                    for (int it = 0; it < 200 && std::abs(a_out - a_in) > 1e-16; ++it) {
                        const double mid = 0.5 * (a_in + a_out);
                        const double dm = depth(mid);
                        if (dm >= target) {
                            a_in = mid;
                            m = dm;
                        } else {
                            a_out = mid;
                        }
                        if (std::abs(m - target) <= 1e-3 * target) break;
                    }
                    probe(a_in, m);
                }
            }
        }

        rad.skipped = rad.probes.empty();
        result.radii.push_back(std::move(rad));
    }
    for (auto it = result.radii.rbegin(); it != result.radii.rend(); ++it) {
        if (!it->skipped) {
            result.max_gap = it->max_gap;
            break;
        }
    }
    result.classification = classify_oracle(result, tol);
    return result;
}

PriorInvariance prior_invariance_check(const MatrixC& a, const std::vector<DensityMatrix>& priors,
                                       const ContinuityConfig& config) {
    for (const auto& p : priors) {
        if (p.dim() != a.dim()) throw DimensionMismatch(a.dim(), p.dim());
        (void)herm_log(p.hermitian(), config.tol);  // rejects singular priors
    }
    ContinuityConfig det = config;
    det.run_oracle = false;
    const auto report = detect_discontinuities(a, det);

    PriorInvariance out;
    for (const auto& v : report.verdicts) out.candidates.push_back(v.alpha);
    for (const auto& v : report.corners) out.candidates.push_back(v.alpha);

    std::vector<std::optional<DensityMatrix>> rows{std::nullopt};
    for (const auto& p : priors) rows.emplace_back(p);
    for (const auto& prior : rows) {
        std::vector<OracleClass> cls;
        std::vector<double> gaps;
        std::vector<ExpectedValue> disc;
        for (const auto& c : out.candidates) {
            const auto res = oracle_check(a, c, config.radii, config.n_directions, prior, config.tol);
            cls.push_back(res.classification);
            gaps.push_back(res.max_gap);
            if (res.classification == OracleClass::Discontinuous) disc.push_back(c);
        }
        out.classes.push_back(std::move(cls));
        out.max_gaps.push_back(std::move(gaps));
        out.discontinuities.push_back(std::move(disc));
    }
    for (std::size_t p = 1; p < out.classes.size(); ++p) {
        if (out.classes[p] != out.classes[0]) out.invariant = false;
    }
    return out;
}

}  // namespace qmaxent
