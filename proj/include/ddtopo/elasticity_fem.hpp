#pragma once

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "ddtopo/domain_grid.hpp"
#include "ddtopo/linalg.hpp"

namespace ddtopo {

// Plane-stress Q4 analysis on the masked structured grid. Nodes live on the
// (nx+1) x (ny+1) lattice; node(ix,iy) = iy*(nx+1)+ix, dofs 2*node (+0 = ux,
// +1 = uy). Unit base modulus, Poisson 0.3, unit square elements, thickness 1.

inline constexpr double kPoisson = 0.3;

struct BoundaryConditions {
    std::vector<int> fixed_dofs;                 // constrained to zero
    std::vector<std::pair<int, double>> loads;   // (dof, force)
};

// Standard L-bracket setup: top edge of the left column fully fixed, unit
// total downward load spread over the 3 nodes below the arm's upper right
// corner (avoids a pure point singularity at the tip).
BoundaryConditions lbracket_bc(const DomainMask& mask);

struct FemSolution {
    std::vector<double> displacements;   // full lattice dof vector
    double compliance = 0.0;             // f . u
    std::vector<double> element_stress;  // von Mises per active element
};

// Assembled unconstrained stiffness with its dof bookkeeping. Only nodes
// touched by at least one active element carry equations; E(rho) =
// e_min + rho^penal * (1 - e_min).
struct StiffnessSystem {
    MaskPtr mask;
    std::vector<int> dof_map;       // lattice dof -> compact index, -1 if absent
    std::vector<int> compact_dofs;  // compact index -> lattice dof
    int half_bandwidth = 0;
    std::vector<double> element_modulus;  // per active element
    // element contributions kept so constrained systems can be rebuilt
    std::vector<std::array<int, 8>> element_dofs;  // compact indices
};

// 8x8 unit-modulus Q4 plane-stress element stiffness (2x2 Gauss, exact).
const std::array<std::array<double, 8>, 8>& element_stiffness_q4();

StiffnessSystem assemble_stiffness(const DensityField& field, double penal, double e_min);

// Applies the constraints, factors the banded reduced system and solves.
// Returns the full lattice displacement vector (zeros on fixed/absent dofs).
// Throws SingularSystemError when the constrained matrix breaks down.
std::vector<double> solve_displacement(const StiffnessSystem& sys, const BoundaryConditions& bc);

// Centroid von Mises stress per active element from the solid-material
// constitutive law (stress of the material itself, not density-scaled).
std::vector<double> von_mises(const DensityField& field, const std::vector<double>& u);

// One assembly + solve with extras the optimizer needs.
struct FemAnalysis {
    std::vector<double> displacements;
    double compliance = 0.0;
    std::vector<double> unit_energies;  // u_e^T k0 u_e per active element
    bool singular = false;
};
FemAnalysis analyze(const DensityField& field, double penal, double e_min,
                    const BoundaryConditions& bc);

// High-fidelity evaluator: binarize at the threshold, solve with penal=1 on
// the 0/1 field (voids keep E = e_min), F1 = max von Mises over solid
// elements, F2 = volume fraction of the binary field. Candidates whose
// system breaks down or whose compliance exceeds the cap (a disconnected
// load path under soft-kill) are flagged infeasible.
struct HighFidelityResult {
    double f1 = 0.0;
    double f2 = 0.0;
    bool feasible = true;
};
HighFidelityResult evaluate_high_fidelity(const DensityField& field, const BoundaryConditions& bc,
                                          double threshold, double e_min = 1e-9,
                                          double compliance_cap = 1e8);

}  // namespace ddtopo
