#pragma once

#include <utility>
#include <vector>

#include "ddtopo/linalg.hpp"
#include "ddtopo/persistence.hpp"

namespace ddtopo {

// A partial matching between two diagrams: matched index pairs plus the
// leftovers of each side, covering every point exactly once.
struct PartialMatching {
    std::vector<std::pair<int, int>> matched;  // (index in d1, index in d2)
    std::vector<int> unmatched1, unmatched2;
};

// Symmetric pairwise Wasserstein distances with zero diagonal.
struct DistanceMatrix {
    int n = 0;
    double p = 2.0;
    std::vector<double> entries;  // n*n row-major

    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * n + j]; }
    double& at(int i, int j) { return entries[static_cast<std::size_t>(i) * n + j]; }
};

// Transportation cost of a given matching: matched points pay the planar
// p-norm, unmatched points pay the distance to their diagonal projection
// pi(q) = ((b+d)/2, (b+d)/2), all to the p-th power, then the 1/p root.
// Throws std::invalid_argument if the matching does not cover the diagrams.
double matching_cost(const PartialMatching& m, const PersistenceDiagram& d1,
                     const PersistenceDiagram& d2, double p);

// Exact p-Wasserstein distance: reduction to a balanced (n1+n2) assignment
// problem where each diagram is augmented with the other side's diagonal
// projections (diagonal-to-diagonal pairs cost nothing), solved with the
// O(n^3) shortest-augmenting-path method on p-th power costs.
// Requires finite coordinates and p >= 1.
double wasserstein(const PersistenceDiagram& d1, const PersistenceDiagram& d2, double p);

// entries[i][j] = wasserstein(d_i, d_j, p); upper triangle computed (each
// pair independently, parallelizable) and mirrored.
DistanceMatrix distance_matrix(const std::vector<PersistenceDiagram>& diagrams, double p);

// d(i) = sum_j entries[i][j].
std::vector<double> row_sum_scores(const DistanceMatrix& a);

// Exact min-cost assignment on a square cost matrix; returns the total cost
// and fills row_to_col. Exposed so tests can pin it against brute force.
double solve_assignment(const Matrix& cost, std::vector<int>& row_to_col);

}  // namespace ddtopo
