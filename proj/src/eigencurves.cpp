#include "qmaxent/eigencurves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "golden.hpp"
#include "qmaxent/assignment.hpp"

namespace qmaxent {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Column {
    RVector values;
    RVector derivs;
    CMatrix vectors;
};

/// Half-open index ranges of consecutive values (descending) closer than eps.
std::vector<std::pair<int, int>> chain_clusters(const RVector& v, double eps) {
    std::vector<std::pair<int, int>> out;
    const int n = static_cast<int>(v.size());
    int begin = 0;
    for (int k = 1; k <= n; ++k) {
        if (k == n || std::abs(v(k - 1) - v(k)) > eps) {
            out.emplace_back(begin, k);
            begin = k;
        }
    }
    return out;
}

/// Eigen-data at one grid angle. Inside a degenerate cluster the basis is
/// chosen to diagonalize the compressed derivative; where that is degenerate
/// too, the eigenvectors at theta + delta are projected into the cluster, so
/// the basis is the limit of the analytic eigenvectors from the right.
Column analyze_column(const MatrixC& a, double theta, double delta, double eps_gap,
                      double eps_deriv) {
    const auto eig = hermitian_eig(rotated_real_part(a, theta));
    const CMatrix hp = rotated_derivative(a, theta).mat();
    Column col{eig.values, RVector(eig.dim()), eig.vectors};

    for (auto [b, e] : chain_clusters(col.values, eps_gap)) {
        const int m = e - b;
        if (m == 1) {
            const CVector v = col.vectors.col(b);
            col.derivs(b) = v.dot(hp * v).real();
            continue;
        }
        CMatrix basis = col.vectors.middleCols(b, m);
        const auto deig = hermitian_eig(HermitianMatrix(basis.adjoint() * hp * basis));
        basis = basis * deig.vectors;
        RVector derivs = deig.values;

        for (auto [sb, se] : chain_clusters(derivs, eps_deriv)) {
            const int g = se - sb;
            if (g == 1) continue;
            const CMatrix sub = basis.middleCols(sb, g);
            const auto shifted = hermitian_eig(rotated_real_part(a, theta + delta));
            std::vector<int> idx(shifted.dim());
            std::iota(idx.begin(), idx.end(), 0);
            RVector weight = (sub.adjoint() * shifted.vectors).cwiseAbs2().colwise().sum();
            std::stable_sort(idx.begin(), idx.end(),
                             [&](int x, int y) { return weight(x) > weight(y); });
            idx.resize(g);
            std::sort(idx.begin(), idx.end());  // keep the shifted (descending) order
            CMatrix overlap(g, g);
            for (int c = 0; c < g; ++c) overlap.col(c) = sub.adjoint() * shifted.vectors.col(idx[c]);
            Eigen::JacobiSVD<CMatrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const CMatrix rotated = sub * (svd.matrixU() * svd.matrixV().adjoint());
            basis.middleCols(sb, g) = rotated;
            for (int c = 0; c < g; ++c) {
                const CVector v = rotated.col(c);
                derivs(sb + c) = v.dot(hp * v).real();
            }
        }
        col.vectors.middleCols(b, m) = basis;
        col.derivs.segment(b, m) = derivs;
    }
    return col;
}

/// Matches the slots of `cur` to the slots of `next`. Overlap of eigenvectors
/// first; ties that matter are broken by a first-order prediction.
std::vector<int> match_columns(const Column& cur, const Column& next, double dtheta,
                               double eps_gap, double eps_deriv, double theta_next) {
    const int d = static_cast<int>(cur.values.size());
    const Eigen::MatrixXd overlap = (cur.vectors.adjoint() * next.vectors).cwiseAbs2();
    auto asg = solve_assignment(-overlap);

    auto interchangeable = [&](int l, int lp) {
        return std::abs(next.values(l) - next.values(lp)) <= eps_gap &&
               std::abs(next.derivs(l) - next.derivs(lp)) <= eps_deriv;
    };

    bool ambiguous = false;
    for (int k = 0; k < d && !ambiguous; ++k) {
        const int l = asg[k];
        for (int lp = 0; lp < d; ++lp) {
            if (lp == l || overlap(k, lp) <= 1e-3) continue;
            if (overlap(k, lp) >= overlap(k, l) - 1e-6 && !interchangeable(l, lp)) {
                ambiguous = true;
                break;
            }
        }
    }
    if (!ambiguous) return asg;

    Eigen::MatrixXd cost(d, d);
    for (int k = 0; k < d; ++k) {
        const double predicted = cur.values(k) + dtheta * cur.derivs(k);
        for (int l = 0; l < d; ++l) {
            cost(k, l) = std::abs(predicted - next.values(l)) +
                         dtheta * std::abs(cur.derivs(k) - next.derivs(l));
        }
    }
    asg = solve_assignment(cost);
    const double resolution = 1e-14 * (1.0 + cost.cwiseAbs().maxCoeff());
    for (int k = 0; k < d; ++k) {
        const int l = asg[k];
        for (int lp = 0; lp < d; ++lp) {
            if (lp != l && cost(k, lp) <= cost(k, l) + resolution && !interchangeable(l, lp)) {
                throw TrackingFailure(
                    "track_branches: ambiguous branch assignment at theta = " +
                        std::to_string(theta_next),
                    theta_next);
            }
        }
    }
    return asg;
}

double top_gap(const MatrixC& a, double theta, int c) {
    const auto eig = hermitian_eig(rotated_real_part(a, theta));
    return eig.values(0) - eig.values(c);
}

/// Spread of the compressed derivative on the top-m eigenspace.
double top_deriv_spread(const MatrixC& a, double theta, int m) {
    const auto eig = hermitian_eig(rotated_real_part(a, theta));
    const CMatrix v = eig.vectors.leftCols(m);
    const auto deig =
        hermitian_eig(HermitianMatrix(v.adjoint() * rotated_derivative(a, theta).mat() * v));
    return deig.max() - deig.min();
}

/// Union-find over branches that coincide on the whole grid.
std::vector<int> identity_classes(const Eigen::MatrixXd& sup, double eps_id) {
    const int d = static_cast<int>(sup.rows());
    std::vector<int> parent(d);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
            if (sup(k, l) <= eps_id) parent[find(l)] = find(k);
        }
    }
    std::vector<int> cls(d);
    for (int k = 0; k < d; ++k) cls[k] = find(k);
    return cls;
}

}  // namespace

bool EigenBranchSet::wraps_closed() const {
    for (int k = 0; k < static_cast<int>(wrap_permutation.size()); ++k) {
        if (wrap_permutation[k] != k) return false;
    }
    return true;
}

ExpectedValue kippenhahn_point(double theta, double value, double derivative) {
    return ExpectedValue::from(std::exp(Complex(0.0, theta)) * Complex(value, derivative));
}

EigenBranchSet track_branches(const MatrixC& a, int n_grid, const Tolerances& tol) {
    const int d = a.dim();
    if (n_grid < 64 * d) {
        throw DomainError("track_branches: n_grid must be at least 64 * d = " +
                          std::to_string(64 * d));
    }
    const double norm = a.norm2();
    const double eps_gap = Tolerances::scaled(tol.gap_rel, norm);
    const double eps_deriv = Tolerances::scaled(tol.deriv_rel, norm);
    const double dtheta = kTwoPi / n_grid;

    std::vector<Column> cols;
    cols.reserve(n_grid);
    EigenBranchSet out;
    out.grid.resize(n_grid);
    for (int j = 0; j < n_grid; ++j) {
        out.grid[j] = dtheta * j;
        cols.push_back(analyze_column(a, out.grid[j], dtheta / 4.0, eps_gap, eps_deriv));
    }

    out.values.resize(d, n_grid);
    out.derivs.resize(d, n_grid);
    out.vectors.assign(n_grid, CMatrix(d, d));

    // slot[k]: position of branch k in the current column.
    std::vector<int> slot(d);
    std::iota(slot.begin(), slot.end(), 0);
    for (int j = 0; j < n_grid; ++j) {
        const Column& cur = cols[j];
        Column ordered{RVector(d), RVector(d), CMatrix(d, d)};
        for (int k = 0; k < d; ++k) {
            out.values(k, j) = ordered.values(k) = cur.values(slot[k]);
            out.derivs(k, j) = ordered.derivs(k) = cur.derivs(slot[k]);
            out.vectors[j].col(k) = ordered.vectors.col(k) = cur.vectors.col(slot[k]);
        }
        const int jn = (j + 1) % n_grid;
        const double theta_next = j + 1 == n_grid ? kTwoPi : out.grid[jn];
        const auto asg = match_columns(ordered, cols[jn], dtheta, eps_gap, eps_deriv, theta_next);
        if (j + 1 == n_grid) {
            out.wrap_permutation = asg;  // column-0 slots are branch labels
        } else {
            slot = asg;
        }
    }
    return out;
}

std::vector<KippenhahnPoint> kippenhahn_curve(const EigenBranchSet& branches) {
    std::vector<KippenhahnPoint> out;
    out.reserve(static_cast<std::size_t>(branches.size()) * branches.dim());
    for (int j = 0; j < branches.size(); ++j) {
        for (int k = 0; k < branches.dim(); ++k) {
            out.push_back({branches.grid[j], k,
                           kippenhahn_point(branches.grid[j], branches.values(k, j),
                                            branches.derivs(k, j))});
        }
    }
    return out;
}

std::vector<DegeneracyEvent> find_top_degeneracies(const MatrixC& a, const EigenBranchSet& branches,
                                                   const Tolerances& tol) {
    const int d = branches.dim();
    const int n = branches.size();
    std::vector<DegeneracyEvent> events;
    if (d < 2 || n < 3) return events;

    const double norm = a.norm2();
    const double eps_gap = Tolerances::scaled(tol.gap_rel, norm);
    const double eps_deriv = Tolerances::scaled(tol.deriv_rel, norm);
    const double eps_id = Tolerances::scaled(tol.identity_rel, norm);
    const double dtheta = kTwoPi / n;

    Eigen::MatrixXd sup = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
            sup(k, l) = sup(l, k) = (branches.values.row(k) - branches.values.row(l)).cwiseAbs().maxCoeff();
        }
    }
    const auto cls = identity_classes(sup, eps_id);
    std::vector<int> class_size(d, 0);
    for (int k = 0; k < d; ++k) ++class_size[cls[k]];

    // Top and second identity class per column.
    std::vector<int> top_class(n), second_class(n, -1);
    std::vector<double> gap_eff(n, std::numeric_limits<double>::infinity());
    for (int j = 0; j < n; ++j) {
        int top = -1;
        double top_v = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < d; ++k) {
            if (cls[k] == k && branches.values(k, j) > top_v) {
                top = k;
                top_v = branches.values(k, j);
            }
        }
        int second = -1;
        double second_v = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < d; ++k) {
            if (cls[k] == k && k != top && branches.values(k, j) > second_v) {
                second = k;
                second_v = branches.values(k, j);
            }
        }
        top_class[j] = top;
        second_class[j] = second;
        if (second >= 0) gap_eff[j] = top_v - second_v;
    }

    auto make_event = [&](double theta, bool persistent) {
        const auto eig = hermitian_eig(rotated_real_part(a, theta));
        int m = 1;
        while (m < d && eig.values(m) >= eig.max() - eps_gap) ++m;
        DegeneracyEvent ev;
        ev.theta_star = wrap_angle(theta);
        ev.multiplicity = m;
        ev.level = eig.values.head(m).mean();
        ev.gap = eig.values(0) - eig.values(m - 1);
        ev.persistent = persistent;

        const CMatrix v = eig.vectors.leftCols(m);
        const auto deig =
            hermitian_eig(HermitianMatrix(v.adjoint() * rotated_derivative(a, theta).mat() * v));
        const CMatrix w = v * deig.vectors;
        const auto groups = chain_clusters(deig.values, eps_deriv);
        std::vector<int> group_of_slot(m);
        for (int g = 0; g < static_cast<int>(groups.size()); ++g) {
            for (int s = groups[g].first; s < groups[g].second; ++s) group_of_slot[s] = g;
            ev.deriv_spread = std::max(ev.deriv_spread,
                                       deig.values(groups[g].first) - deig.values(groups[g].second - 1));
        }

        // Tracked branches at the nearest column that belong to the cluster.
        const int jstar = static_cast<int>(std::lround(ev.theta_star / dtheta)) % n;
        std::vector<int> cand(d);
        std::iota(cand.begin(), cand.end(), 0);
        std::stable_sort(cand.begin(), cand.end(), [&](int x, int y) {
            return branches.values(x, jstar) > branches.values(y, jstar);
        });
        cand.resize(m);
        Eigen::MatrixXd slot_weight(m, m);
        for (int i = 0; i < m; ++i) {
            const CVector x = branches.vectors[jstar].col(cand[i]);
            for (int s = 0; s < m; ++s) slot_weight(i, s) = std::norm(w.col(s).dot(x));
        }
        Eigen::MatrixXd cost(m, m);
        for (int i = 0; i < m; ++i) {
            for (int s = 0; s < m; ++s) {
                double gw = 0.0;
                for (int t = 0; t < m; ++t) {
                    if (group_of_slot[t] == group_of_slot[s]) gw += slot_weight(i, t);
                }
                cost(i, s) = -gw;
            }
        }
        const auto asg = solve_assignment(cost);

        ev.deriv_groups.resize(groups.size());
        for (int g = 0; g < static_cast<int>(groups.size()); ++g) {
            const auto [gb, ge] = groups[g];
            ev.deriv_groups[g].derivative = deig.values.segment(gb, ge - gb).mean();
        }
        for (int i = 0; i < m; ++i) ev.deriv_groups[group_of_slot[asg[i]]].branches.push_back(cand[i]);
        for (auto& g : ev.deriv_groups) {
            std::sort(g.branches.begin(), g.branches.end());
            for (std::size_t p = 0; p < g.branches.size(); ++p) {
                for (std::size_t q = p + 1; q < g.branches.size(); ++q) {
                    const int k = g.branches[p];
                    const int l = g.branches[q];
                    ev.identical_flags.push_back({k, l, sup(k, l) <= eps_id, sup(k, l)});
                }
            }
        }
        return ev;
    };

    // Crossings of distinct classes: local minima of the class gap.
    const double bracket_limit = 4.0 * (2.0 * norm) * dtheta + eps_gap;
    for (int j = 0; j < n; ++j) {
        const int jp = (j + n - 1) % n;
        const int jn = (j + 1) % n;
        if (!std::isfinite(gap_eff[j])) continue;
        if (!(gap_eff[j] < gap_eff[jp] && gap_eff[j] <= gap_eff[jn])) continue;
        if (gap_eff[j] > bracket_limit) continue;

        int c = 1;
        for (int jj : {jp, j, jn}) {
            c = std::max(c, class_size[top_class[jj]]);
            if (second_class[jj] >= 0) c = std::max(c, class_size[second_class[jj]]);
        }
        if (c >= d) continue;
        const double center = branches.grid[j];
        auto f = [&](double t) { return top_gap(a, t, c); };
        auto [theta, value] = detail::golden_min(f, center - dtheta, center + dtheta, 1e-13);
        const double at_grid = f(center);
        if (at_grid <= value) {
            theta = center;
            value = at_grid;
        }
        if (value > eps_gap) continue;

        // Tangential contact: the derivatives agree too, so the gap is flat
        // at theta*. The derivative spread has a sharp minimum there instead.
        const auto eig = hermitian_eig(rotated_real_part(a, theta));
        int m = 1;
        while (m < d && eig.values(m) >= eig.max() - eps_gap) ++m;
        if (top_deriv_spread(a, theta, m) <= 100.0 * eps_deriv) {
            auto s = [&](double t) { return top_deriv_spread(a, t, m); };
            const double w = 1e-6;
            auto [t2, s2] = detail::golden_min(s, theta - w, theta + w, 1e-15);
            if (s2 < s(theta) && top_gap(a, t2, m - 1) <= eps_gap) theta = t2;
        }
        events.push_back(make_event(theta, false));
    }

    // Identical branches on top: one event per run of columns.
    for (int k = 0; k < d; ++k) {
        if (cls[k] != k || class_size[k] < 2) continue;
        std::vector<bool> on_top(n);
        for (int j = 0; j < n; ++j) on_top[j] = top_class[j] == k;
        if (std::all_of(on_top.begin(), on_top.end(), [](bool b) { return b; })) {
            events.push_back(make_event(0.0, true));
            continue;
        }
        int start = 0;
        while (on_top[start]) ++start;  // a column not in any run
        for (int off = 1; off <= n; ++off) {
            const int j = (start + off) % n;
            if (!on_top[j] || on_top[(j + n - 1) % n]) continue;
            int len = 0;
            while (on_top[(j + len) % n]) ++len;
            events.push_back(make_event(branches.grid[(j + len / 2) % n], true));
        }
    }

    std::sort(events.begin(), events.end(),
              [](const DegeneracyEvent& x, const DegeneracyEvent& y) { return x.theta_star < y.theta_star; });
    std::vector<DegeneracyEvent> unique;
    for (auto& ev : events) {
        if (!unique.empty() && std::abs(unique.back().theta_star - ev.theta_star) <= 1e-9 &&
            unique.back().persistent == ev.persistent) {
            continue;
        }
        unique.push_back(std::move(ev));
    }
    if (unique.size() > 1 && !unique.front().persistent && !unique.back().persistent &&
        kTwoPi - unique.back().theta_star + unique.front().theta_star <= 1e-9) {
        unique.pop_back();
    }
    return unique;
}

}  // namespace qmaxent
