#include "ddtopo/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "ddtopo/pd_metric.hpp"

namespace ddtopo {

namespace {

// Orders a front by a score, best (largest) first, ties by original index.
std::vector<int> order_descending(const std::vector<int>& front, const std::vector<double>& score) {
    std::vector<int> pos(front.size());
    for (std::size_t k = 0; k < front.size(); ++k) pos[k] = static_cast<int>(k);
    std::sort(pos.begin(), pos.end(), [&](int a, int b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return front[a] < front[b];
    });
    std::vector<int> out(front.size());
    for (std::size_t k = 0; k < front.size(); ++k) out[k] = front[pos[k]];
    return out;
}

Population take_survivors(std::vector<Candidate>& cands, const std::vector<std::vector<int>>& fronts,
                          int n_pop,
                          const std::function<std::vector<int>(const std::vector<int>&)>& order_cut) {
    std::vector<int> chosen;
    chosen.reserve(n_pop);
    for (const auto& front : fronts) {
        if (static_cast<int>(chosen.size()) >= n_pop) break;
        const int room = n_pop - static_cast<int>(chosen.size());
        if (static_cast<int>(front.size()) <= room) {
            chosen.insert(chosen.end(), front.begin(), front.end());
        } else {
            const std::vector<int> ordered = order_cut(front);
            chosen.insert(chosen.end(), ordered.begin(), ordered.begin() + room);
        }
    }
    Population pop;
    pop.members.reserve(chosen.size());
    for (int i : chosen) pop.members.push_back(std::move(cands[i]));
    return pop;
}

}  // namespace

bool dominates(const Candidate& a, const Candidate& b) {
    if (a.objectives.size() != b.objectives.size())
        throw std::invalid_argument("dominates: objective count mismatch");
    bool strict = false;
    for (std::size_t i = 0; i < a.objectives.size(); ++i) {
        if (a.objectives[i] > b.objectives[i]) return false;
        if (a.objectives[i] < b.objectives[i]) strict = true;
    }
    return strict;
}

std::vector<std::vector<int>> non_dominated_sort(std::vector<Candidate>& cands) {
    if (cands.empty()) throw std::invalid_argument("non_dominated_sort: empty input");
    const int n = static_cast<int>(cands.size());

    std::vector<int> feas, infeas;
    for (int i = 0; i < n; ++i) (cands[i].feasible ? feas : infeas).push_back(i);

    // Deb-style fast sort over the feasible set
    std::vector<std::vector<int>> dominated(n);
    std::vector<int> dom_count(n, 0);
    for (std::size_t a = 0; a < feas.size(); ++a)
        for (std::size_t b = a + 1; b < feas.size(); ++b) {
            const int i = feas[a], j = feas[b];
            if (dominates(cands[i], cands[j])) {
                dominated[i].push_back(j);
                ++dom_count[j];
            } else if (dominates(cands[j], cands[i])) {
                dominated[j].push_back(i);
                ++dom_count[i];
            }
        }

    std::vector<std::vector<int>> fronts;
    std::vector<int> current;
    for (int i : feas)
        if (dom_count[i] == 0) current.push_back(i);
    int rank = 1;
    while (!current.empty()) {
        for (int i : current) cands[i].rank = rank;
        std::vector<int> next;
        for (int i : current)
            for (int j : dominated[i])
                if (--dom_count[j] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
        ++rank;
    }
    if (!infeas.empty()) {
        for (int i : infeas) cands[i].rank = kInfeasibleRank;
        fronts.push_back(std::move(infeas));
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<int>& front,
                                      const std::vector<Candidate>& cands) {
    if (front.empty()) throw std::invalid_argument("crowding_distance: empty front");
    const std::size_t m = cands[front[0]].objectives.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(front.size(), 0.0);
    if (front.size() <= 2) return std::vector<double>(front.size(), inf);

    for (std::size_t obj = 0; obj < m; ++obj) {
        double fmin = inf, fmax = -inf;
        for (const Candidate& c : cands)
            if (c.feasible) {
                fmin = std::min(fmin, c.objectives[obj]);
                fmax = std::max(fmax, c.objectives[obj]);
            }
        std::vector<int> pos(front.size());
        for (std::size_t k = 0; k < front.size(); ++k) pos[k] = static_cast<int>(k);
        std::sort(pos.begin(), pos.end(), [&](int a, int b) {
            const double fa = cands[front[a]].objectives[obj];
            const double fb = cands[front[b]].objectives[obj];
            if (fa != fb) return fa < fb;
            return front[a] < front[b];
        });
        dist[pos.front()] = inf;
        dist[pos.back()] = inf;
        const double range = fmax - fmin;
        if (range <= 0.0) continue;  // degenerate objective contributes nothing
        for (std::size_t k = 1; k + 1 < front.size(); ++k) {
            if (std::isinf(dist[pos[k]])) continue;
            dist[pos[k]] += (cands[front[pos[k + 1]]].objectives[obj] -
                             cands[front[pos[k - 1]]].objectives[obj]) /
                            range;
        }
    }
    return dist;
}

Population select_conventional(std::vector<Candidate> cands, int n_pop) {
    if (static_cast<int>(cands.size()) < n_pop)
        throw std::invalid_argument("select_conventional: fewer candidates than n_pop");
    const auto fronts = non_dominated_sort(cands);
    return take_survivors(cands, fronts, n_pop, [&](const std::vector<int>& front) {
        return order_descending(front, crowding_distance(front, cands));
    });
}

Population select_ph(std::vector<Candidate> cands, int n_pop, double p, bool* used_wasserstein) {
    if (static_cast<int>(cands.size()) < n_pop)
        throw std::invalid_argument("select_ph: fewer candidates than n_pop");
    const auto fronts = non_dominated_sort(cands);

    // convergence stage: everything rank 1 -> crowding distance sorting
    const bool all_rank1 = fronts.size() == 1 && cands[fronts[0][0]].rank == 1;
    if (used_wasserstein) *used_wasserstein = !all_rank1;
    if (all_rank1) {
        return take_survivors(cands, fronts, n_pop, [&](const std::vector<int>& front) {
            return order_descending(front, crowding_distance(front, cands));
        });
    }

    // exploration stage: row sums of the Wasserstein matrix over ALL candidates,
    // computed lazily (only when some front actually has to be cut)
    std::vector<double> scores;
    auto ensure_scores = [&]() {
        if (!scores.empty()) return;
        std::vector<PersistenceDiagram> diagrams;
        diagrams.reserve(cands.size());
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (!cands[i].diagram)
                throw std::invalid_argument("select_ph: candidate " + std::to_string(i) +
                                            " has no persistence diagram");
            diagrams.push_back(*cands[i].diagram);
        }
        scores = row_sum_scores(distance_matrix(diagrams, p));
    };
    return take_survivors(cands, fronts, n_pop, [&](const std::vector<int>& front) {
        ensure_scores();
        std::vector<double> front_scores(front.size());
        for (std::size_t k = 0; k < front.size(); ++k) front_scores[k] = scores[front[k]];
        return order_descending(front, front_scores);
    });
}

double hypervolume_2d(const std::vector<std::array<double, 2>>& front,
                      const std::array<double, 2>& ref) {
    std::vector<std::array<double, 2>> pts;
    for (const auto& q : front)
        if (q[0] < ref[0] && q[1] < ref[1]) pts.push_back(q);
    if (pts.empty()) return 0.0;
    std::sort(pts.begin(), pts.end());
    // keep the staircase: strictly decreasing F2 as F1 grows
    std::vector<std::array<double, 2>> stair;
    for (const auto& q : pts) {
        if (!stair.empty() && q[0] == stair.back()[0]) continue;  // same F1, worse-or-equal F2
        if (stair.empty() || q[1] < stair.back()[1]) stair.push_back(q);
    }
    double area = 0.0;
    for (std::size_t i = 0; i < stair.size(); ++i) {
        const double next_x = (i + 1 < stair.size()) ? stair[i + 1][0] : ref[0];
        area += (next_x - stair[i][0]) * (ref[1] - stair[i][1]);
    }
    return area;
}

}  // namespace ddtopo
