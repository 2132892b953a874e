#pragma once

#include <string>
#include <vector>

#include "qmaxent/qmatrix.hpp"
#include "qmaxent/tolerances.hpp"

namespace qmaxent {

/// Malformed input document; the message names the line and the field.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Matrix document {"d": n, "re": [[...]], "im": [[...]]}. Entry A[j][k] is
/// re[j][k] + i im[j][k].
MatrixC parse_matrix(const std::string& text, const std::string& source = "<input>");
MatrixC read_matrix_file(const std::string& path);
std::string matrix_to_json(const MatrixC& a);

/// Prior state in the matrix document format, validated as a density matrix.
DensityMatrix read_prior_file(const std::string& path, const Tolerances& tol = {});

/// "RE,IM".
ExpectedValue parse_alpha(const std::string& text);
/// Comma-separated list of reals.
std::vector<double> parse_real_list(const std::string& text);

enum class OutputFormat { Json, Csv };

struct RunConfig {
    int n_grid = 4096;
    Tolerances tol;
    std::vector<double> radii{1e-2, 1e-3, 1e-4};
    int n_directions = 16;
    OutputFormat format = OutputFormat::Json;
    unsigned long long seed = 20240611ULL;

    /// Throws DomainError unless n_grid >= 64 and radii are positive and
    /// strictly decreasing.
    void validate() const;
};

}  // namespace qmaxent
