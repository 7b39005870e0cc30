#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ddtopo/domain_grid.hpp"
#include "ddtopo/persistence.hpp"

namespace ddtopo {

// Rank assigned to infeasible candidates; they are never selected while a
// feasible candidate remains.
inline constexpr int kInfeasibleRank = std::numeric_limits<int>::max();

struct Candidate {
    DensityField field;
    std::vector<double> objectives;  // F1 = max von Mises stress, F2 = volume fraction
    int rank = 0;                    // 0 = unassigned, >= 1 after sorting
    std::optional<PersistenceDiagram> diagram;
    bool feasible = true;
    std::uint64_t id = 0;
};

struct Population {
    std::vector<Candidate> members;
    int generation = 0;
};

// Minimization dominance: a <= b in every objective and < in at least one.
bool dominates(const Candidate& a, const Candidate& b);

// Fronts over the feasible candidates by iterated removal of non-dominated
// sets; ranks (1-based) are written back. Infeasible candidates form one
// trailing pseudo-front with rank kInfeasibleRank.
std::vector<std::vector<int>> non_dominated_sort(std::vector<Candidate>& cands);

// Per-objective neighbor-gap sum for one front. Boundary candidates get
// +infinity; normalization uses the objective range over all *feasible*
// candidates in cands (not just the front), and a degenerate range
// contributes zero.
std::vector<double> crowding_distance(const std::vector<int>& front,
                                      const std::vector<Candidate>& cands);

// NSGA-II survivor selection: whole fronts first, the cut front ordered by
// descending crowding distance, ties by original index.
Population select_conventional(std::vector<Candidate> cands, int n_pop);

// Same front-filling scheme, but while more than one front exists the cut
// front is ordered by descending row sums of the pairwise Wasserstein
// distance matrix computed over ALL candidates' diagrams (exploration).
// Once every candidate is rank 1 it behaves exactly like
// select_conventional (exploitation). Candidates must carry diagrams when
// the exploration path is taken; a missing diagram throws with its index.
// If used_wasserstein is non-null it reports which path was taken.
Population select_ph(std::vector<Candidate> cands, int n_pop, double p,
                     bool* used_wasserstein = nullptr);

// Area dominated by the front and bounded by the reference point. Points
// that fail to strictly dominate ref are discarded first.
double hypervolume_2d(const std::vector<std::array<double, 2>>& front,
                      const std::array<double, 2>& ref);

}  // namespace ddtopo
