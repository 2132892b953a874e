#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "qmaxent/continuity.hpp"
#include "qmaxent/eigencurves.hpp"
#include "qmaxent/matrix_io.hpp"
#include "qmaxent/maxent.hpp"
#include "qmaxent/numrange.hpp"
#include "qmaxent/random.hpp"
#include "qmaxent/report_io.hpp"

using namespace qmaxent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitOutside = 4;

struct Options {
    std::string input;
    std::string output;
    std::string alpha;
    std::string prior;
    std::string radii;
    std::string format = "json";
    int grid = 4096;
    int directions = 16;
    int priors = 0;
    unsigned long long seed = RunConfig{}.seed;
};

RunConfig make_config(const Options& o) {
    RunConfig cfg;
    cfg.n_grid = o.grid;
    cfg.n_directions = o.directions;
    cfg.seed = o.seed;
    if (!o.radii.empty()) cfg.radii = parse_real_list(o.radii);
    cfg.format = o.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    cfg.validate();
    return cfg;
}

std::string document(const std::string& command, const Json& body) {
    Json out;
    out["command"] = command;
    for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = it.value();
    return out.dump(2) + "\n";
}

/// Exit code 4 unless alpha lies in W(A) up to the interior tolerance.
std::optional<int> check_inside(const MatrixC& a, const ExpectedValue& alpha, const RunConfig& cfg) {
    const auto scan = support_scan(a, std::max(256, 16 * a.dim()), cfg.tol);
    const auto sm = support_margin(a, alpha, scan);
    if (sm.margin < -Tolerances::scaled(cfg.tol.interior_rel, a.norm2())) {
        std::cerr << "qmaxent: alpha = (" << format_real(alpha.re) << ", " << format_real(alpha.im)
                  << ") lies outside the numerical range (distance " << format_real(-sm.margin)
                  << ")\n";
        return kExitOutside;
    }
    return std::nullopt;
}

int run_boundary(const Options& o) {
    const RunConfig cfg = make_config(o);
    const MatrixC a = read_matrix_file(o.input);
    const auto scan = support_scan(a, cfg.n_grid, cfg.tol);
    write_output(o.output, cfg.format == OutputFormat::Csv
                               ? boundary_csv(scan)
                               : document("boundary", boundary_json(scan, cfg)));
    return kExitOk;
}

int run_curves(const Options& o) {
    const RunConfig cfg = make_config(o);
    const MatrixC a = read_matrix_file(o.input);
    const auto branches = track_branches(a, cfg.n_grid, cfg.tol);
    write_output(o.output, cfg.format == OutputFormat::Csv
                               ? curves_csv(branches)
                               : document("curves", curves_json(branches, cfg)));
    return kExitOk;
}

int run_infer(const Options& o) {
    const RunConfig cfg = make_config(o);
    const MatrixC a = read_matrix_file(o.input);
    const ExpectedValue alpha = parse_alpha(o.alpha);
    std::optional<DensityMatrix> prior;
    if (!o.prior.empty()) prior = read_prior_file(o.prior, cfg.tol);
    if (auto code = check_inside(a, alpha, cfg)) return *code;

    InferDocument doc;
    doc.alpha = alpha;
    const auto scan = support_scan(a, std::max(256, 16 * a.dim()), cfg.tol);
    doc.tag = classify_point(a, alpha, scan, cfg.tol).tag;
    doc.result = maxent_infer(a, alpha, prior, cfg.tol);
    doc.has_prior = prior.has_value();
    doc.entropy = von_neumann_entropy(doc.result.state);
    if (prior) doc.relative_entropy = relative_entropy(doc.result.state, *prior, cfg.tol);
    write_output(o.output, cfg.format == OutputFormat::Csv ? infer_csv(doc)
                                                           : document("infer", infer_json(doc, cfg)));
    return kExitOk;
}

std::string analyze_csv(const ContinuityReport& r) {
    std::string out = "kind,alpha_re,alpha_im,theta_star,status,confidence,oracle_class,max_gap\n";
    auto row = [&](const char* kind, const Verdict& v) {
        out += std::string(kind) + "," + format_real(v.alpha.re) + "," + format_real(v.alpha.im) +
               "," + format_real(v.theta_star) + "," + to_string(v.status) + "," +
               format_real(v.confidence) + "," +
               (v.oracle ? to_string(v.oracle->classification) : "") + "," +
               (v.oracle ? format_real(v.oracle->max_gap) : "") + "\n";
    };
    for (const auto& v : r.verdicts) row("verdict", v);
    for (const auto& v : r.corners) row("corner", v);
    return out;
}

int run_analyze(const Options& o) {
    const RunConfig cfg = make_config(o);
    const MatrixC a = read_matrix_file(o.input);
    ContinuityConfig cc;
    cc.n_grid = cfg.n_grid;
    cc.tol = cfg.tol;
    cc.radii = cfg.radii;
    cc.n_directions = cfg.n_directions;

    ContinuityReport report;
    try {
        report = detect_discontinuities(a, cc);
    } catch (const AnalysisFailure& e) {
        std::cerr << "qmaxent: analysis failed: " << e.what() << "\n";
        if (cfg.format == OutputFormat::Json) {
            Json body = report_json(e.partial(), cfg);
            body["error"] = e.what();
            write_output(o.output, document("analyze", body));
        }
        return kExitError;
    }
    int code = report.exit_code();
    if (cfg.format == OutputFormat::Csv) {
        write_output(o.output, analyze_csv(report));
        return code;
    }
    Json body = report_json(report, cfg);
    if (o.priors > 0) {
        Rng rng(cfg.seed);
        std::vector<DensityMatrix> priors;
        for (int i = 0; i < o.priors; ++i) priors.push_back(random_prior(rng, a.dim()));
        const auto inv = prior_invariance_check(a, priors, cc);
        body["prior_invariance"] = invariance_json(inv);
        if (!inv.invariant) code = 3;
    }
    write_output(o.output, document("analyze", body));
    return code;
}

int run_oracle(const Options& o) {
    const RunConfig cfg = make_config(o);
    const MatrixC a = read_matrix_file(o.input);
    const ExpectedValue alpha = parse_alpha(o.alpha);
    std::optional<DensityMatrix> prior;
    if (!o.prior.empty()) prior = read_prior_file(o.prior, cfg.tol);
    if (auto code = check_inside(a, alpha, cfg)) return *code;

    const auto res = oracle_check(a, alpha, cfg.radii, cfg.n_directions, prior, cfg.tol);
    if (cfg.format == OutputFormat::Csv) {
        std::string out = "radius,probe_re,probe_im,margin,gap\n";
        for (const auto& r : res.radii) {
            for (const auto& p : r.probes) {
                out += format_real(r.radius) + "," + format_real(p.alpha.re) + "," +
                       format_real(p.alpha.im) + "," + format_real(p.margin) + "," +
                       format_real(p.gap) + "\n";
            }
        }
        write_output(o.output, out);
    } else {
        Json body;
        body["config"] = config_json(cfg);
        body["prior"] = prior.has_value();
        const Json oj = oracle_json(res);
        for (auto it = oj.begin(); it != oj.end(); ++it) body[it.key()] = it.value();
        write_output(o.output, document("oracle", body));
    }
    return res.classification == OracleClass::Inconclusive ? 2 : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum-entropy inference and its continuity on the numerical range"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", o.input, "Matrix document (JSON with d, re, im)")->required();
        sub->add_option("--grid", o.grid, "Number of angles on [0, 2 pi)");
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output", o.output, "Output path (default stdout)");
        sub->add_option("--seed", o.seed, "Seed for randomized procedures");
    };
    auto add_oracle = [&](CLI::App* sub) {
        sub->add_option("--radii", o.radii, "Decreasing radii, comma-separated");
        sub->add_option("--directions", o.directions, "Approach directions per radius");
    };

    auto* boundary = app.add_subcommand("boundary", "Support function and boundary points");
    add_common(boundary);
    auto* curves = app.add_subcommand("curves", "Eigenvalue branches and Kippenhahn points");
    add_common(curves);
    auto* infer = app.add_subcommand("infer", "Maximum-entropy state for given expected values");
    add_common(infer);
    infer->add_option("--alpha", o.alpha, "Expected values RE,IM")->required();
    infer->add_option("--prior", o.prior, "Prior state (matrix document)");
    auto* analyze = app.add_subcommand("analyze", "Discontinuity analysis with oracle checks");
    add_common(analyze);
    add_oracle(analyze);
    analyze->add_option("--priors", o.priors, "Number of random priors for the invariance check");
    auto* oracle = app.add_subcommand("oracle", "Sequential continuity oracle at one point");
    add_common(oracle);
    add_oracle(oracle);
    oracle->add_option("--alpha", o.alpha, "Expected values RE,IM")->required();
    oracle->add_option("--prior", o.prior, "Prior state (matrix document)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*boundary) return run_boundary(o);
        if (*curves) return run_curves(o);
        if (*infer) return run_infer(o);
        if (*analyze) return run_analyze(o);
        if (*oracle) return run_oracle(o);
    } catch (const std::exception& e) {
        std::cerr << "qmaxent: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
