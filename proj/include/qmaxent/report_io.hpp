#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qmaxent/continuity.hpp"
#include "qmaxent/eigencurves.hpp"
#include "qmaxent/matrix_io.hpp"
#include "qmaxent/maxent.hpp"
#include "qmaxent/numrange.hpp"

namespace qmaxent {

using Json = nlohmann::ordered_json;

/// %.17g.
std::string format_real(double x);

Json config_json(const RunConfig& cfg);
Json matrix_json(const CMatrix& m);
Json verdict_json(const Verdict& v);
Json oracle_json(const OracleResult& r);
Json report_json(const ContinuityReport& r, const RunConfig& cfg);
Json invariance_json(const PriorInvariance& p);

/// Rows theta, h, bx, by.
std::string boundary_csv(const std::vector<SupportSample>& scan);
Json boundary_json(const std::vector<SupportSample>& scan, const RunConfig& cfg);

/// Rows theta, branch, lambda, dlambda, z_re, z_im.
std::string curves_csv(const EigenBranchSet& branches);
Json curves_json(const EigenBranchSet& branches, const RunConfig& cfg);

struct InferDocument {
    ExpectedValue alpha;
    PointTag tag = PointTag::Interior;
    MaxEntResult result;
    bool has_prior = false;
    double entropy = 0.0;
    std::optional<double> relative_entropy;
};

Json infer_json(const InferDocument& doc, const RunConfig& cfg);
std::string infer_csv(const InferDocument& doc);

/// Writes `text` to `path` through a temporary file and a rename, or to
/// stdout when `path` is empty.
void write_output(const std::string& path, const std::string& text);

}  // namespace qmaxent
