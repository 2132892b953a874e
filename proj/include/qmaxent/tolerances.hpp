#pragma once

namespace qmaxent {

/// Numerical tolerances shared by every module.
///
/// Absolute values are used as given; the `*_rel` values are multiplied by
/// (1 + ||A||_2) for the matrix under analysis (see `scaled`).
struct Tolerances {
    double eig_residual = 1e-9;   // |H v - lambda v| <= eig_residual * ||H||
    double psd_slack = 1e-10;     // minimum eigenvalue of a state
    double trace_slack = 1e-12;   // |tr(rho) - 1|
    double log_floor = 1e-14;     // log() of a spectrum below this is a domain error

    double gap_rel = 1e-8;        // eigenvalue clustering (top multiplicity)
    double interior_rel = 1e-7;   // interior / boundary band
    double deriv_rel = 1e-7;      // equal branch derivatives
    double identity_rel = 1e-7;   // identical branches over the full period

    double dual_tol = 1e-10;      // dual gradient norm at convergence
    int dual_max_iter = 200;

    double oracle_continuous = 0.05;    // max_gap at or below: continuity corroborated
    double oracle_discontinuous = 0.2;  // max_gap at or above: discontinuity corroborated

    /// Scale a relative tolerance by (1 + norm).
    static double scaled(double rel, double norm) { return rel * (1.0 + norm); }
};

}  // namespace qmaxent
