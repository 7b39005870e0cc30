#pragma once

#include <optional>
#include <random>
#include <vector>

#include "ddtopo/domain_grid.hpp"
#include "ddtopo/elasticity_fem.hpp"
#include "ddtopo/evolution.hpp"

namespace ddtopo {

// Seeding parameters of the artificial low-fidelity problem: density filter
// radius and volume-fraction bound.
struct SeedingParams {
    double r = 2.0;
    double v_max = 0.5;
};

struct LowFidConfig {
    double penal = 3.0;
    int max_iters = 200;
    double move_limit = 0.2;
    double convergence_tol = 0.01;  // max density change
    double e_min = 1e-9;
};

// Conic-weight density filter restricted to active cells:
// rho~_e = sum_i w(e,i) x_i / sum_i w(e,i), w = max(0, r - dist(e,i)).
// r = 1 is the identity (only the cell itself has positive weight).
class DensityFilter {
public:
    DensityFilter(MaskPtr mask, double r);

    std::vector<double> apply(const std::vector<double>& x) const;
    // transpose of the normalized operator: out_i = sum_e w(e,i) y_e / s_e
    std::vector<double> apply_transpose(const std::vector<double>& y) const;
    const MaskPtr& mask() const { return mask_; }

private:
    MaskPtr mask_;
    std::vector<int> offsets_;       // flattened neighbor list: active indices
    std::vector<double> weights_;    // matching weights
    std::vector<int> start_;         // per-cell ranges into offsets_/weights_
    std::vector<double> self_sum_;   // s_e
};

DensityField density_filter(const DensityField& x, double r);

// Multiplicative optimality-criteria update with move limits; bisects the
// volume multiplier until the output's own volume fraction matches the
// target to 1e-4 (or the constraint is slack at zero multiplier).
// Compliance sensitivities must be <= 0.
DensityField oc_update(const DensityField& x, const std::vector<double>& sensitivities,
                       double volume_target, double move_limit);

struct LowFidResult {
    DensityField field;        // filtered (physical) densities
    double compliance = 0.0;   // of the final iterate
    bool converged = false;
    int iterations = 0;
};

// SIMP compliance minimization: filter -> FEM -> adjoint sensitivities
// (chain-ruled through the filter) -> OC, until the max density change
// drops below the tolerance. The volume constraint is enforced on the
// returned filtered field (exact via the linearity of the filter). When the
// iteration budget runs out the best feasible iterate seen so far is
// returned with converged = false.
LowFidResult solve_low_fidelity(const MaskPtr& mask, const SeedingParams& s,
                                const BoundaryConditions& bc, const LowFidConfig& cfg,
                                const DensityField* x0 = nullptr);

// Elementwise mean of the population's fields.
DensityField reference_density(const Population& pop);

// Low-fidelity solve with the additional overlap bound
// sum_e rho_e * rho_ref_e <= g_max * N_active, handled by a second
// multiplier in the OC inner loop (nested bisection). The start point is
// uniform v_max plus small seeded uniform noise so mutants differ.
LowFidResult solve_mutation(const MaskPtr& mask, const SeedingParams& s,
                            const DensityField& rho_ref, double g_max,
                            const BoundaryConditions& bc, const LowFidConfig& cfg,
                            std::mt19937_64& rng);

// Seeding grid spanning r in [1.5, 6.0] x v_max in [0.15, 0.60]; n = 100
// yields the 10 x 10 grid with steps 0.5 and 0.05.
std::vector<SeedingParams> seeding_grid(int n);

}  // namespace ddtopo
