#include "ddtopo/pd_metric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ddtopo/common.hpp"

namespace ddtopo {

namespace {

double planar_pow_p(const std::pair<double, double>& a, const std::pair<double, double>& b,
                    double p) {
    // ||a-b||_p ^ p
    return std::pow(std::fabs(a.first - b.first), p) + std::pow(std::fabs(a.second - b.second), p);
}

double diag_pow_p(const std::pair<double, double>& q, double p) {
    // ||q - pi(q)||_p ^ p with pi the orthogonal diagonal projection
    return 2.0 * std::pow(std::fabs(q.second - q.first) / 2.0, p);
}

void require_finite(const PersistenceDiagram& d) {
    for (const auto& q : d.pairs)
        if (!std::isfinite(q.first) || !std::isfinite(q.second))
            throw std::invalid_argument("wasserstein: diagram has non-finite coordinates");
}

}  // namespace

double matching_cost(const PartialMatching& m, const PersistenceDiagram& d1,
                     const PersistenceDiagram& d2, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("matching_cost: p must be >= 1");
    const int n1 = static_cast<int>(d1.pairs.size());
    const int n2 = static_cast<int>(d2.pairs.size());
    std::vector<int> seen1(n1, 0), seen2(n2, 0);
    auto touch = [](std::vector<int>& seen, int i) {
        if (i < 0 || i >= static_cast<int>(seen.size()) || seen[i]++)
            throw std::invalid_argument("matching_cost: invalid matching");
    };
    double s = 0.0;
    for (const auto& [i, j] : m.matched) {
        touch(seen1, i);
        touch(seen2, j);
        s += planar_pow_p(d1.pairs[i], d2.pairs[j], p);
    }
    for (int i : m.unmatched1) {
        touch(seen1, i);
        s += diag_pow_p(d1.pairs[i], p);
    }
    for (int j : m.unmatched2) {
        touch(seen2, j);
        s += diag_pow_p(d2.pairs[j], p);
    }
    for (int c : seen1)
        if (c != 1) throw std::invalid_argument("matching_cost: matching does not cover d1");
    for (int c : seen2)
        if (c != 1) throw std::invalid_argument("matching_cost: matching does not cover d2");
    return std::pow(s, 1.0 / p);
}

double solve_assignment(const Matrix& cost, std::vector<int>& row_to_col) {
    if (cost.rows != cost.cols) throw std::invalid_argument("solve_assignment: square matrix required");
    const int n = cost.rows;
    row_to_col.assign(n, -1);
    if (n == 0) return 0.0;

    constexpr double kInf = std::numeric_limits<double>::infinity();
    // shortest augmenting path with potentials, 1-based helpers
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        if (p[j] == 0) continue;
        row_to_col[p[j] - 1] = j - 1;
        total += cost(p[j] - 1, j - 1);
    }
    return total;
}

double wasserstein(const PersistenceDiagram& d1, const PersistenceDiagram& d2, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("wasserstein: p must be >= 1");
    require_finite(d1);
    require_finite(d2);
    // canonical argument order makes symmetry bitwise exact
    if (d2.pairs < d1.pairs) return wasserstein(d2, d1, p);
    const int n1 = static_cast<int>(d1.pairs.size());
    const int n2 = static_cast<int>(d2.pairs.size());
    const int n = n1 + n2;
    if (n == 0) return 0.0;

    // rows: d1 points then n2 diagonal slots; cols: d2 points then n1 slots
    Matrix cost(n, n);
    for (int i = 0; i < n1; ++i) {
        const double dd = diag_pow_p(d1.pairs[i], p);
        for (int j = 0; j < n2; ++j) cost(i, j) = planar_pow_p(d1.pairs[i], d2.pairs[j], p);
        for (int j = n2; j < n; ++j) cost(i, j) = dd;
    }
    for (int i = n1; i < n; ++i) {
        for (int j = 0; j < n2; ++j) cost(i, j) = diag_pow_p(d2.pairs[j], p);
        for (int j = n2; j < n; ++j) cost(i, j) = 0.0;
    }
    std::vector<int> assignment;
    const double total = solve_assignment(cost, assignment);
    return std::pow(std::max(0.0, total), 1.0 / p);
}

DistanceMatrix distance_matrix(const std::vector<PersistenceDiagram>& diagrams, double p) {
    if (diagrams.empty()) throw std::invalid_argument("distance_matrix: no diagrams");
    const int n = static_cast<int>(diagrams.size());
    DistanceMatrix a;
    a.n = n;
    a.p = p;
    a.entries.assign(static_cast<std::size_t>(n) * n, 0.0);

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    parallel_for(pairs.size(), [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        const double w = wasserstein(diagrams[i], diagrams[j], p);
        a.at(i, j) = w;
        a.at(j, i) = w;
    });
    return a;
}

std::vector<double> row_sum_scores(const DistanceMatrix& a) {
    std::vector<double> d(a.n, 0.0);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) d[i] += a.at(i, j);
    return d;
}

}  // namespace ddtopo
