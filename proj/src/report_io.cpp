#include "qmaxent/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qmaxent {

namespace {

Json point_json(const ExpectedValue& z) { return Json::array({z.re, z.im}); }

Json event_json(const DegeneracyEvent& ev) {
    Json j;
    j["theta_star"] = ev.theta_star;
    j["multiplicity"] = ev.multiplicity;
    j["level"] = ev.level;
    j["gap"] = ev.gap;
    j["deriv_spread"] = ev.deriv_spread;
    j["persistent"] = ev.persistent;
    Json groups = Json::array();
    for (const auto& g : ev.deriv_groups) {
        groups.push_back({{"derivative", g.derivative}, {"branches", g.branches}});
    }
    j["deriv_groups"] = groups;
    Json flags = Json::array();
    for (const auto& f : ev.identical_flags) {
        flags.push_back({{"first", f.first},
                         {"second", f.second},
                         {"identical", f.identical},
                         {"sup_distance", f.sup_distance}});
    }
    j["identical_flags"] = flags;
    return j;
}

std::string csv_line(std::initializer_list<std::string> cells) {
    std::string out;
    bool first = true;
    for (const auto& c : cells) {
        if (!first) out += ',';
        out += c;
        first = false;
    }
    out += '\n';
    return out;
}

}  // namespace

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json config_json(const RunConfig& cfg) {
    Json j;
    j["n_grid"] = cfg.n_grid;
    j["radii"] = cfg.radii;
    j["n_directions"] = cfg.n_directions;
    j["format"] = cfg.format == OutputFormat::Json ? "json" : "csv";
    j["seed"] = cfg.seed;
    const Tolerances& t = cfg.tol;
    j["tolerances"] = {{"eig_residual", t.eig_residual},
                       {"psd_slack", t.psd_slack},
                       {"trace_slack", t.trace_slack},
                       {"log_floor", t.log_floor},
                       {"gap_rel", t.gap_rel},
                       {"interior_rel", t.interior_rel},
                       {"deriv_rel", t.deriv_rel},
                       {"identity_rel", t.identity_rel},
                       {"dual_tol", t.dual_tol},
                       {"dual_max_iter", t.dual_max_iter},
                       {"oracle_continuous", t.oracle_continuous},
                       {"oracle_discontinuous", t.oracle_discontinuous}};
    return j;
}

Json matrix_json(const CMatrix& m) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        Json rr = Json::array();
        Json ri = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            rr.push_back(m(j, k).real());
            ri.push_back(m(j, k).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    Json j;
    j["d"] = m.rows();
    j["re"] = re;
    j["im"] = im;
    return j;
}

Json oracle_json(const OracleResult& r) {
    Json j;
    j["alpha"] = point_json(r.alpha);
    j["max_gap"] = r.max_gap;
    j["class"] = to_string(r.classification);
    Json radii = Json::array();
    for (const auto& rad : r.radii) {
        Json probes = Json::array();
        for (const auto& p : rad.probes) {
            probes.push_back({{"alpha", point_json(p.alpha)},
                              {"margin", p.margin},
                              {"gap", p.gap},
                              {"iterations", p.iterations}});
        }
        radii.push_back({{"radius", rad.radius},
                         {"max_gap", rad.max_gap},
                         {"skipped", rad.skipped},
                         {"failures", rad.failures},
                         {"probes", probes}});
    }
    j["radii"] = radii;
    return j;
}

Json verdict_json(const Verdict& v) {
    Json j;
    j["alpha"] = point_json(v.alpha);
    j["theta_star"] = v.theta_star;
    j["status"] = to_string(v.status);
    j["point"] = to_string(v.tag);
    j["branches"] = v.branches;
    j["derivative"] = v.group.derivative;
    Json flags = Json::array();
    for (const auto& f : v.identity_flags) {
        flags.push_back({{"first", f.first},
                         {"second", f.second},
                         {"identical", f.identical},
                         {"sup_distance", f.sup_distance}});
    }
    j["identity_flags"] = flags;
    j["confidence"] = v.confidence;
    if (v.oracle) {
        j["oracle"] = oracle_json(*v.oracle);
        j["oracle_agrees"] = v.oracle_agrees;
    } else {
        j["oracle"] = nullptr;
    }
    return j;
}

Json report_json(const ContinuityReport& r, const RunConfig& cfg) {
    Json j;
    j["config"] = config_json(cfg);
    j["matrix"] = {{"d", r.d}, {"norm", r.norm}};
    j["scan"] = {{"n_grid", r.config.n_grid}, {"oracle", r.config.run_oracle}};
    j["range"] = {{"dimension", r.range_dimension}, {"segment_degenerate", r.segment_degenerate}};
    Json events = Json::array();
    for (const auto& e : r.events) events.push_back(event_json(e));
    j["events"] = events;
    Json verdicts = Json::array();
    for (const auto& v : r.verdicts) verdicts.push_back(verdict_json(v));
    j["verdicts"] = verdicts;
    Json corners = Json::array();
    for (const auto& v : r.corners) corners.push_back(verdict_json(v));
    j["corners"] = corners;
    Json facets = Json::array();
    for (const auto& f : r.facets) {
        facets.push_back({{"theta", f.theta}, {"endpoints", {point_json(f.first), point_json(f.second)}}});
    }
    j["facets"] = facets;
    j["summary"] = {{"continuous", r.count(VerdictStatus::Continuous)},
                    {"discontinuous", r.count(VerdictStatus::Discontinuous)},
                    {"identical_branches", r.count(VerdictStatus::IdenticalBranches)},
                    {"inconclusive", r.count(VerdictStatus::Inconclusive)},
                    {"disagreement", r.has_disagreement()},
                    {"exit_code", r.exit_code()}};
    return j;
}

Json invariance_json(const PriorInvariance& p) {
    Json j;
    j["invariant"] = p.invariant;
    Json cands = Json::array();
    for (const auto& c : p.candidates) cands.push_back(point_json(c));
    j["candidates"] = cands;
    Json rows = Json::array();
    for (std::size_t i = 0; i < p.classes.size(); ++i) {
        Json cls = Json::array();
        for (auto c : p.classes[i]) cls.push_back(to_string(c));
        Json disc = Json::array();
        for (const auto& z : p.discontinuities[i]) disc.push_back(point_json(z));
        rows.push_back({{"prior", i == 0 ? "uniform" : "random " + std::to_string(i)},
                        {"classes", cls},
                        {"max_gaps", p.max_gaps[i]},
                        {"discontinuities", disc}});
    }
    j["priors"] = rows;
    return j;
}

std::string boundary_csv(const std::vector<SupportSample>& scan) {
    std::string out = "theta,h,bx,by\n";
    for (const auto& s : scan) {
        out += csv_line({format_real(s.theta), format_real(s.h), format_real(s.boundary_point.re),
                         format_real(s.boundary_point.im)});
    }
    return out;
}

Json boundary_json(const std::vector<SupportSample>& scan, const RunConfig& cfg) {
    Json j;
    j["config"] = config_json(cfg);
    Json rows = Json::array();
    for (const auto& s : scan) {
        rows.push_back({{"theta", s.theta},
                        {"h", s.h},
                        {"bx", s.boundary_point.re},
                        {"by", s.boundary_point.im}});
    }
    j["boundary"] = rows;
    return j;
}

std::string curves_csv(const EigenBranchSet& branches) {
    std::string out = "theta,branch,lambda,dlambda,z_re,z_im\n";
    const int n = branches.size();
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < branches.dim(); ++k) {
            const double th = branches.grid[j];
            const double l = branches.values(k, j);
            const double dl = branches.derivs(k, j);
            const auto z = kippenhahn_point(th, l, dl);
            out += csv_line({format_real(th), std::to_string(k), format_real(l), format_real(dl),
                             format_real(z.re), format_real(z.im)});
        }
    }
    return out;
}

Json curves_json(const EigenBranchSet& branches, const RunConfig& cfg) {
    Json j;
    j["config"] = config_json(cfg);
    j["wrap_permutation"] = branches.wrap_permutation;
    Json rows = Json::array();
    for (int c = 0; c < branches.size(); ++c) {
        for (int k = 0; k < branches.dim(); ++k) {
            const double th = branches.grid[c];
            const auto z = kippenhahn_point(th, branches.values(k, c), branches.derivs(k, c));
            rows.push_back({{"theta", th},
                            {"branch", k},
                            {"lambda", branches.values(k, c)},
                            {"dlambda", branches.derivs(k, c)},
                            {"z_re", z.re},
                            {"z_im", z.im}});
        }
    }
    j["curves"] = rows;
    return j;
}

Json infer_json(const InferDocument& doc, const RunConfig& cfg) {
    Json j;
    j["config"] = config_json(cfg);
    j["alpha"] = point_json(doc.alpha);
    j["point"] = to_string(doc.tag);
    j["prior"] = doc.has_prior;
    j["state"] = matrix_json(doc.result.state.mat());
    j["entropy"] = doc.entropy;
    if (doc.relative_entropy) j["relative_entropy"] = *doc.relative_entropy;
    j["residual"] = doc.result.residual;
    j["face_steps"] = doc.result.chain.steps.size();
    if (doc.result.dual) {
        j["dual"] = {{"t", Json::array({doc.result.dual->t(0), doc.result.dual->t(1)})},
                     {"iterations", doc.result.dual->iterations},
                     {"residual", doc.result.dual->residual}};
    } else {
        j["dual"] = nullptr;
    }
    return j;
}

std::string infer_csv(const InferDocument& doc) {
    std::string out = "row,col,re,im\n";
    const CMatrix& m = doc.result.state.mat();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out += csv_line({std::to_string(r), std::to_string(c), format_real(m(r, c).real()),
                             format_real(m(r, c).imag())});
        }
    }
    return out;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text << std::flush;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out << text;
        if (!out) throw Error("cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace qmaxent
