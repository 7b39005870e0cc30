#include "ddtopo/elasticity_fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddtopo {

namespace {

// Reference Q4 on [-1,1]^2 mapped to the unit square; node order
// (0,0),(1,0),(1,1),(0,1) counter-clockwise, dofs [u0 v0 u1 v1 u2 v2 u3 v3].
void shape_gradients(double xi, double eta, double dndx[4], double dndy[4]) {
    // d/dx = 2 * d/dxi on the unit square (J = diag(1/2, 1/2))
    dndx[0] = -(1.0 - eta) / 4.0 * 2.0;
    dndx[1] = (1.0 - eta) / 4.0 * 2.0;
    dndx[2] = (1.0 + eta) / 4.0 * 2.0;
    dndx[3] = -(1.0 + eta) / 4.0 * 2.0;
    dndy[0] = -(1.0 - xi) / 4.0 * 2.0;
    dndy[1] = -(1.0 + xi) / 4.0 * 2.0;
    dndy[2] = (1.0 + xi) / 4.0 * 2.0;
    dndy[3] = (1.0 - xi) / 4.0 * 2.0;
}

void bmatrix(double xi, double eta, double B[3][8]) {
    double dndx[4], dndy[4];
    shape_gradients(xi, eta, dndx, dndy);
    for (int i = 0; i < 4; ++i) {
        B[0][2 * i] = dndx[i];
        B[0][2 * i + 1] = 0.0;
        B[1][2 * i] = 0.0;
        B[1][2 * i + 1] = dndy[i];
        B[2][2 * i] = dndy[i];
        B[2][2 * i + 1] = dndx[i];
    }
}

std::array<std::array<double, 3>, 3> dmatrix() {
    const double nu = kPoisson;
    const double c = 1.0 / (1.0 - nu * nu);
    return {{{c, c * nu, 0.0}, {c * nu, c, 0.0}, {0.0, 0.0, c * (1.0 - nu) / 2.0}}};
}

std::array<std::array<double, 8>, 8> integrate_ke() {
    std::array<std::array<double, 8>, 8> ke{};
    const auto D = dmatrix();
    const double g = 1.0 / std::sqrt(3.0);
    const double detJ = 0.25;  // unit square from [-1,1]^2
    for (double xi : {-g, g})
        for (double eta : {-g, g}) {
            double B[3][8];
            bmatrix(xi, eta, B);
            double DB[3][8];
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 8; ++c)
                    DB[r][c] = D[r][0] * B[0][c] + D[r][1] * B[1][c] + D[r][2] * B[2][c];
            for (int r = 0; r < 8; ++r)
                for (int c = 0; c < 8; ++c)
                    ke[r][c] += (B[0][r] * DB[0][c] + B[1][r] * DB[1][c] + B[2][r] * DB[2][c]) * detJ;
        }
    return ke;
}

// lattice dofs of element (x,y), counter-clockwise from the lower-left node
std::array<int, 8> lattice_element_dofs(const DomainMask& m, int x, int y) {
    const int w = m.nx + 1;
    const int n00 = y * w + x, n10 = y * w + x + 1, n11 = (y + 1) * w + x + 1, n01 = (y + 1) * w + x;
    return {2 * n00, 2 * n00 + 1, 2 * n10, 2 * n10 + 1, 2 * n11, 2 * n11 + 1, 2 * n01, 2 * n01 + 1};
}

}  // namespace

const std::array<std::array<double, 8>, 8>& element_stiffness_q4() {
    static const auto ke = integrate_ke();
    return ke;
}

BoundaryConditions lbracket_bc(const DomainMask& mask) {
    if (mask.kind != DomainMask::Kind::LBracket)
        throw std::invalid_argument("lbracket_bc: mask is not an L-bracket");
    const int n = mask.nx;
    const int arm = n - n / mask.cut_den * mask.cut_num;
    if (arm < 2) throw std::invalid_argument("lbracket_bc: arm too narrow for the 3-node load");
    const int w = n + 1;
    BoundaryConditions bc;
    for (int ix = 0; ix <= arm; ++ix) {  // top edge of the left column
        const int node = n * w + ix;
        bc.fixed_dofs.push_back(2 * node);
        bc.fixed_dofs.push_back(2 * node + 1);
    }
    // unit load shared by the 3 right-edge nodes from the arm's top corner down
    for (int k = 0; k < 3; ++k) {
        const int node = (arm - k) * w + n;
        bc.loads.emplace_back(2 * node + 1, -1.0 / 3.0);
    }
    return bc;
}

StiffnessSystem assemble_stiffness(const DensityField& field, double penal, double e_min) {
    if (!(penal >= 1.0)) throw std::invalid_argument("assemble_stiffness: penal must be >= 1");
    if (!(e_min > 0.0 && e_min < 1.0)) throw std::invalid_argument("assemble_stiffness: bad e_min");
    const DomainMask& m = *field.mask;
    const int ndof = 2 * (m.nx + 1) * (m.ny + 1);

    StiffnessSystem sys;
    sys.mask = field.mask;
    sys.dof_map.assign(ndof, -1);
    sys.element_modulus.resize(m.active_count());
    sys.element_dofs.resize(m.active_count());

    for (int k = 0; k < m.active_count(); ++k) {
        const int c = m.active_cells[k];
        const auto dofs = lattice_element_dofs(m, c % m.nx, c / m.nx);
        for (int d : dofs) sys.dof_map[d] = 0;
        sys.element_modulus[k] = e_min + std::pow(field.values[k], penal) * (1.0 - e_min);
    }
    for (int d = 0; d < ndof; ++d) {
        if (sys.dof_map[d] == 0) {
            sys.dof_map[d] = static_cast<int>(sys.compact_dofs.size());
            sys.compact_dofs.push_back(d);
        }
    }
    int hb = 0;
    for (int k = 0; k < m.active_count(); ++k) {
        const int c = m.active_cells[k];
        const auto dofs = lattice_element_dofs(m, c % m.nx, c / m.nx);
        std::array<int, 8> cd;
        int lo = ndof, hi = 0;
        for (int i = 0; i < 8; ++i) {
            cd[i] = sys.dof_map[dofs[i]];
            lo = std::min(lo, cd[i]);
            hi = std::max(hi, cd[i]);
        }
        sys.element_dofs[k] = cd;
        hb = std::max(hb, hi - lo);
    }
    sys.half_bandwidth = hb;
    return sys;
}

std::vector<double> solve_displacement(const StiffnessSystem& sys, const BoundaryConditions& bc) {
    const int n_compact = static_cast<int>(sys.compact_dofs.size());

    std::vector<std::uint8_t> fixed(n_compact, 0);
    for (int d : bc.fixed_dofs) {
        if (d < 0 || d >= static_cast<int>(sys.dof_map.size()))
            throw std::invalid_argument("solve_displacement: fixed dof out of range");
        const int cd = sys.dof_map[d];
        if (cd >= 0) fixed[cd] = 1;
    }
    std::vector<int> free_index(n_compact, -1);
    int n_free = 0;
    for (int i = 0; i < n_compact; ++i)
        if (!fixed[i]) free_index[i] = n_free++;
    if (n_free == 0) throw std::invalid_argument("solve_displacement: no free dofs");

    BandedSpd K(n_free, sys.half_bandwidth);
    const auto& ke = element_stiffness_q4();
    const int n_elem = static_cast<int>(sys.element_dofs.size());
    for (int k = 0; k < n_elem; ++k) {
        const double E = sys.element_modulus[k];
        const auto& cd = sys.element_dofs[k];
        for (int i = 0; i < 8; ++i) {
            const int fi = free_index[cd[i]];
            if (fi < 0) continue;
            for (int j = 0; j < 8; ++j) {
                const int fj = free_index[cd[j]];
                if (fj < 0 || fj > fi) continue;
                K.add(fi, fj, E * ke[i][j]);
            }
        }
    }

    std::vector<double> f(n_free, 0.0);
    for (const auto& [dof, value] : bc.loads) {
        if (dof < 0 || dof >= static_cast<int>(sys.dof_map.size()))
            throw std::invalid_argument("solve_displacement: load dof out of range");
        const int cd = sys.dof_map[dof];
        if (cd < 0)
            throw std::invalid_argument("solve_displacement: load applied outside the active domain");
        if (!fixed[cd]) f[free_index[cd]] += value;
    }

    K.factorize();
    std::vector<double> x = K.solve(f);

    // element-wise K*x on the free dofs; the band now holds the factor
    auto residual = [&](const std::vector<double>& xv) {
        std::vector<double> r = f;
        for (int k = 0; k < n_elem; ++k) {
            const double E = sys.element_modulus[k];
            const auto& cd = sys.element_dofs[k];
            double xe[8];
            for (int j = 0; j < 8; ++j) {
                const int fj = free_index[cd[j]];
                xe[j] = fj < 0 ? 0.0 : xv[fj];
            }
            for (int i = 0; i < 8; ++i) {
                const int fi = free_index[cd[i]];
                if (fi < 0) continue;
                double s = 0.0;
                for (int j = 0; j < 8; ++j) s += ke[i][j] * xe[j];
                r[fi] -= E * s;
            }
        }
        return r;
    };
    double fnorm = 0.0;
    for (double v : f) fnorm += v * v;
    fnorm = std::sqrt(fnorm);
    // the soft-kill modulus contrast costs a few digits of residual;
    // refinement with the existing factor wins them back
    for (int pass = 0; pass < 3; ++pass) {
        const std::vector<double> r = residual(x);
        double rnorm = 0.0;
        for (double v : r) rnorm += v * v;
        if (std::sqrt(rnorm) <= 1e-12 * fnorm) break;
        const std::vector<double> dx = K.solve(r);
        for (int i = 0; i < n_free; ++i) x[i] += dx[i];
    }

    std::vector<double> u(sys.dof_map.size(), 0.0);
    for (int i = 0; i < n_compact; ++i)
        if (!fixed[i]) u[sys.compact_dofs[i]] = x[free_index[i]];
    return u;
}

std::vector<double> von_mises(const DensityField& field, const std::vector<double>& u) {
    const DomainMask& m = *field.mask;
    const auto D = dmatrix();
    double B[3][8];
    bmatrix(0.0, 0.0, B);  // centroid evaluation

    std::vector<double> vm(m.active_count());
    for (int k = 0; k < m.active_count(); ++k) {
        const int c = m.active_cells[k];
        const auto dofs = lattice_element_dofs(m, c % m.nx, c / m.nx);
        double ue[8];
        for (int i = 0; i < 8; ++i) ue[i] = u[dofs[i]];
        double eps[3] = {0, 0, 0};
        for (int r = 0; r < 3; ++r)
            for (int i = 0; i < 8; ++i) eps[r] += B[r][i] * ue[i];
        const double sx = D[0][0] * eps[0] + D[0][1] * eps[1];
        const double sy = D[1][0] * eps[0] + D[1][1] * eps[1];
        const double txy = D[2][2] * eps[2];
        vm[k] = std::sqrt(sx * sx + sy * sy - sx * sy + 3.0 * txy * txy);
    }
    return vm;
}

FemAnalysis analyze(const DensityField& field, double penal, double e_min,
                    const BoundaryConditions& bc) {
    FemAnalysis out;
    const StiffnessSystem sys = assemble_stiffness(field, penal, e_min);
    try {
        out.displacements = solve_displacement(sys, bc);
    } catch (const SingularSystemError&) {
        out.singular = true;
        return out;
    }
    for (const auto& [dof, value] : bc.loads) out.compliance += value * out.displacements[dof];

    const DomainMask& m = *field.mask;
    const auto& ke = element_stiffness_q4();
    out.unit_energies.resize(m.active_count());
    for (int k = 0; k < m.active_count(); ++k) {
        const int c = m.active_cells[k];
        const auto dofs = lattice_element_dofs(m, c % m.nx, c / m.nx);
        double ue[8];
        for (int i = 0; i < 8; ++i) ue[i] = out.displacements[dofs[i]];
        double e = 0.0;
        for (int i = 0; i < 8; ++i) {
            double s = 0.0;
            for (int j = 0; j < 8; ++j) s += ke[i][j] * ue[j];
            e += ue[i] * s;
        }
        out.unit_energies[k] = e;
    }
    return out;
}

HighFidelityResult evaluate_high_fidelity(const DensityField& field, const BoundaryConditions& bc,
                                          double threshold, double e_min, double compliance_cap) {
    const BinaryImage img = binarize(field, threshold);
    const DensityField binary = field_from_image(img, field.mask);

    HighFidelityResult res;
    res.f2 = volume_fraction(binary);
    if (res.f2 <= 0.0) {  // no material at all
        res.f1 = std::numeric_limits<double>::infinity();
        res.feasible = false;
        return res;
    }

    const FemAnalysis an = analyze(binary, 1.0, e_min, bc);
    if (an.singular || !(an.compliance < compliance_cap)) {
        res.f1 = std::numeric_limits<double>::infinity();
        res.feasible = false;
        return res;
    }
    const std::vector<double> vm = von_mises(binary, an.displacements);
    double f1 = 0.0;
    for (std::size_t k = 0; k < vm.size(); ++k)
        if (binary.values[k] >= 0.5) f1 = std::max(f1, vm[k]);  // solid elements only
    res.f1 = f1;
    return res;
}

}  // namespace ddtopo
