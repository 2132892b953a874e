#include "qmaxent/matrix_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qmaxent {

namespace {

using nlohmann::json;

/// 1-based line of the first occurrence of "key" in the document.
int line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& field,
                       const std::string& msg) {
    std::ostringstream os;
    os << source;
    if (line > 0) os << ":" << line;
    os << ": field '" << field << "': " << msg;
    throw ParseError(os.str());
}

Eigen::MatrixXd read_plane(const json& doc, const std::string& key, int d, const std::string& text,
                           const std::string& source) {
    const int line = line_of_key(text, key);
    if (!doc.contains(key)) fail(source, 0, key, "missing");
    const json& rows = doc.at(key);
    if (!rows.is_array() || static_cast<int>(rows.size()) != d) {
        fail(source, line, key, "expected an array of " + std::to_string(d) + " rows");
    }
    Eigen::MatrixXd out(d, d);
    for (int j = 0; j < d; ++j) {
        const json& row = rows[static_cast<std::size_t>(j)];
        const std::string rname = key + "[" + std::to_string(j) + "]";
        if (!row.is_array() || static_cast<int>(row.size()) != d) {
            fail(source, line, rname, "expected an array of " + std::to_string(d) + " numbers");
        }
        for (int k = 0; k < d; ++k) {
            const json& x = row[static_cast<std::size_t>(k)];
            const std::string name = rname + "[" + std::to_string(k) + "]";
            if (!x.is_number()) fail(source, line, name, "expected a number");
            const double v = x.get<double>();
            if (!std::isfinite(v)) fail(source, line, name, "not finite");
            out(j, k) = v;
        }
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

MatrixC parse_matrix(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source + ":" + std::to_string(line_of_offset(text, e.byte)) +
                         ": malformed document: " + e.what());
    }
    if (!doc.is_object()) throw ParseError(source + ":1: expected an object with d, re, im");
    const int dline = line_of_key(text, "d");
    if (!doc.contains("d")) fail(source, 0, "d", "missing");
    if (!doc.at("d").is_number_integer()) fail(source, dline, "d", "expected an integer");
    const long long d = doc.at("d").get<long long>();
    if (d < 1 || d > 4096) fail(source, dline, "d", "must lie in [1, 4096]");
    const int n = static_cast<int>(d);
    const Eigen::MatrixXd re = read_plane(doc, "re", n, text, source);
    const Eigen::MatrixXd im = read_plane(doc, "im", n, text, source);
    CMatrix m(n, n);
    m.real() = re;
    m.imag() = im;
    return MatrixC(m);
}

MatrixC read_matrix_file(const std::string& path) { return parse_matrix(slurp(path), path); }

std::string matrix_to_json(const MatrixC& a) {
    nlohmann::ordered_json doc;
    const int d = a.dim();
    doc["d"] = d;
    auto plane = [&](bool imag) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int j = 0; j < d; ++j) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int k = 0; k < d; ++k) row.push_back(imag ? a(j, k).imag() : a(j, k).real());
            rows.push_back(row);
        }
        return rows;
    };
    doc["re"] = plane(false);
    doc["im"] = plane(true);
    return doc.dump(2) + "\n";
}

DensityMatrix read_prior_file(const std::string& path, const Tolerances& tol) {
    const MatrixC m = read_matrix_file(path);
    const CMatrix& p = m.mat();
    if ((p - p.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw ParseError(path + ": prior is not Hermitian");
    }
    try {
        return DensityMatrix::from(p, tol);
    } catch (const DomainError& e) {
        throw ParseError(path + ": prior is not a density matrix: " + e.what());
    }
}

ExpectedValue parse_alpha(const std::string& text) {
    const auto v = parse_real_list(text);
    if (v.size() != 2) throw ParseError("--alpha: expected RE,IM, got '" + text + "'");
    return {v[0], v[1]};
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ParseError("cannot parse '" + item + "' as a real number");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size() || !std::isfinite(x)) {
            throw ParseError("cannot parse '" + item + "' as a real number");
        }
        out.push_back(x);
    }
    if (out.empty()) throw ParseError("empty list");
    return out;
}

void RunConfig::validate() const {
    if (n_grid < 64) throw DomainError("grid must be at least 64");
    if (n_directions < 1) throw DomainError("directions must be positive");
    if (radii.empty()) throw DomainError("radii must be nonempty");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] < radii[i - 1]))) {
            throw DomainError("radii must be positive and strictly decreasing");
        }
    }
}

}  // namespace qmaxent
