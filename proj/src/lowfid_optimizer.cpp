#include "ddtopo/lowfid_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddtopo {

namespace {

// One OC step against up to two linearized constraints g^T x <= bound.
// B_e = -sens_e / (lambda_v * vgrad_e + lambda_o * ograd_e); the candidate
// x_e * sqrt(B_e) is clamped to the move box. Both constraint values are
// monotone non-increasing in their multipliers.
struct OcCore {
    const std::vector<double>& x;
    const std::vector<double>& sens;
    double move;
    const std::vector<double>& vgrad;  // volume gradient (per element)
    double vbound;
    const std::vector<double>* ograd = nullptr;  // overlap gradient, optional
    double obound = 0.0;

    std::vector<double> update(double lv, double lo) const {
        std::vector<double> out(x.size());
        for (std::size_t e = 0; e < x.size(); ++e) {
            const double denom = lv * vgrad[e] + (ograd ? lo * (*ograd)[e] : 0.0);
            double cand;
            if (denom <= 0.0) {
                cand = x[e] + move;  // unconstrained ascent direction
            } else {
                const double b = std::max(0.0, -sens[e]) / denom;
                cand = x[e] * std::sqrt(b);
            }
            cand = std::clamp(cand, x[e] - move, x[e] + move);
            out[e] = std::clamp(cand, 0.0, 1.0);
        }
        return out;
    }

    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }

    // Bisects lambda_v for a fixed lambda_o so the volume constraint holds
    // (equality when active, slack multiplier zero otherwise).
    std::vector<double> solve_volume(double lo) const {
        std::vector<double> cand = update(0.0, lo);
        if (dot(cand, vgrad) <= vbound) return cand;  // inactive at lv = 0
        double l1 = 0.0, l2 = 1.0;
        while (dot(update(l2, lo), vgrad) > vbound) {
            l2 *= 2.0;
            if (l2 > 1e40) break;
        }
        for (int it = 0; it < 80; ++it) {
            const double lm = 0.5 * (l1 + l2);
            if (dot(update(lm, lo), vgrad) > vbound)
                l1 = lm;
            else
                l2 = lm;
        }
        return update(l2, lo);
    }

    // Outer bisection on the overlap multiplier. If even a huge multiplier
    // cannot satisfy the bound within this step's move box, the maximum
    // reduction is taken and feasibility is reached over later iterations.
    std::vector<double> solve() const {
        if (!ograd) return solve_volume(0.0);
        std::vector<double> cand = solve_volume(0.0);
        if (dot(cand, *ograd) <= obound) return cand;
        double l1 = 0.0, l2 = 1.0;
        bool bracketed = false;
        for (int g = 0; g < 60; ++g) {
            if (dot(solve_volume(l2), *ograd) <= obound) {
                bracketed = true;
                break;
            }
            l2 *= 4.0;
        }
        if (!bracketed) return solve_volume(l2);
        for (int it = 0; it < 60; ++it) {
            const double lm = 0.5 * (l1 + l2);
            if (dot(solve_volume(lm), *ograd) > obound)
                l1 = lm;
            else
                l2 = lm;
        }
        return solve_volume(l2);
    }
};

LowFidResult run_simp(const MaskPtr& mask, const SeedingParams& s, const BoundaryConditions& bc,
                      const LowFidConfig& cfg, std::vector<double> x,
                      const DensityField* rho_ref, double g_max) {
    const int n = mask->active_count();
    const DensityFilter filter(mask, s.r);

    // Both constraints are linear in the design variables once pulled back
    // through the filter, so the OC bisections never re-run FEM or filtering.
    const std::vector<double> vgrad_raw = filter.apply_transpose(std::vector<double>(n, 1.0));
    std::vector<double> vgrad(n);
    for (int e = 0; e < n; ++e) vgrad[e] = vgrad_raw[e] / n;  // volume fraction gradient

    std::vector<double> ograd;
    double obound = 0.0;
    if (rho_ref) {
        ograd = filter.apply_transpose(rho_ref->values);
        obound = g_max * n;
    }

    LowFidResult best;
    double best_compliance = std::numeric_limits<double>::infinity();

    LowFidResult out;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        out.iterations = it;
        const std::vector<double> xphys = filter.apply(x);
        const DensityField phys(mask, xphys);
        const FemAnalysis an = analyze(phys, cfg.penal, cfg.e_min, bc);
        if (an.singular) throw SingularSystemError("solve_low_fidelity: singular system");
        out.compliance = an.compliance;
        out.field = phys;

        const bool vol_ok = OcCore::dot(x, vgrad) <= s.v_max + 1e-3;
        const bool ovl_ok = !rho_ref || OcCore::dot(x, ograd) <= obound * (1.0 + 1e-3);
        if (vol_ok && ovl_ok && an.compliance < best_compliance) {
            best_compliance = an.compliance;
            best = out;
        }

        std::vector<double> sens_phys(n);
        for (int e = 0; e < n; ++e)
            sens_phys[e] = -cfg.penal * std::pow(xphys[e], cfg.penal - 1.0) * (1.0 - cfg.e_min) *
                           an.unit_energies[e];
        const std::vector<double> sens = filter.apply_transpose(sens_phys);

        OcCore oc{x, sens, cfg.move_limit, vgrad, s.v_max,
                  rho_ref ? &ograd : nullptr, obound};
        const std::vector<double> xnew = oc.solve();

        double change = 0.0;
        for (int e = 0; e < n; ++e) change = std::max(change, std::fabs(xnew[e] - x[e]));
        x = xnew;
        if (change < cfg.convergence_tol) {
            // one more filter+solve so the returned field matches the final x
            const std::vector<double> xp = filter.apply(x);
            const DensityField ph(mask, xp);
            const FemAnalysis fin = analyze(ph, cfg.penal, cfg.e_min, bc);
            out.field = ph;
            out.compliance = fin.compliance;
            out.converged = true;
            out.iterations = it;
            return out;
        }
    }
    out.converged = false;
    if (best_compliance < std::numeric_limits<double>::infinity()) {
        best.converged = false;
        best.iterations = out.iterations;
        return best;
    }
    return out;
}

}  // namespace

DensityFilter::DensityFilter(MaskPtr mask, double r) : mask_(std::move(mask)) {
    if (!(r >= 1.0)) throw std::invalid_argument("DensityFilter: r must be >= 1");
    const DomainMask& m = *mask_;
    const int n = m.active_count();
    const int reach = static_cast<int>(std::ceil(r)) - 1;
    start_.assign(n + 1, 0);
    self_sum_.assign(n, 0.0);

    for (int k = 0; k < n; ++k) {
        const int c = m.active_cells[k];
        const int x = c % m.nx, y = c / m.nx;
        for (int dy = -reach; dy <= reach; ++dy) {
            const int yy = y + dy;
            if (yy < 0 || yy >= m.ny) continue;
            for (int dx = -reach; dx <= reach; ++dx) {
                const int xx = x + dx;
                if (xx < 0 || xx >= m.nx || !m.is_active(xx, yy)) continue;
                const double w = r - std::sqrt(double(dx) * dx + double(dy) * dy);
                if (w <= 0.0) continue;
                offsets_.push_back(m.cell_to_active[m.cell(xx, yy)]);
                weights_.push_back(w);
                self_sum_[k] += w;
            }
        }
        start_[k + 1] = static_cast<int>(offsets_.size());
    }
}

std::vector<double> DensityFilter::apply(const std::vector<double>& x) const {
    const int n = mask_->active_count();
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("DensityFilter::apply: size");
    std::vector<double> out(n);
    for (int e = 0; e < n; ++e) {
        double s = 0.0;
        for (int q = start_[e]; q < start_[e + 1]; ++q) s += weights_[q] * x[offsets_[q]];
        out[e] = s / self_sum_[e];
    }
    return out;
}

std::vector<double> DensityFilter::apply_transpose(const std::vector<double>& y) const {
    const int n = mask_->active_count();
    if (static_cast<int>(y.size()) != n)
        throw std::invalid_argument("DensityFilter::apply_transpose: size");
    std::vector<double> out(n, 0.0);
    for (int e = 0; e < n; ++e) {
        const double ye = y[e] / self_sum_[e];
        for (int q = start_[e]; q < start_[e + 1]; ++q) out[offsets_[q]] += weights_[q] * ye;
    }
    return out;
}

DensityField density_filter(const DensityField& x, double r) {
    const DensityFilter f(x.mask, r);
    std::vector<double> v = f.apply(x.values);
    for (double& q : v) q = std::clamp(q, 0.0, 1.0);  // guard rounding
    return DensityField(x.mask, std::move(v));
}

DensityField oc_update(const DensityField& x, const std::vector<double>& sensitivities,
                       double volume_target, double move_limit) {
    const int n = static_cast<int>(x.values.size());
    if (static_cast<int>(sensitivities.size()) != n)
        throw std::invalid_argument("oc_update: sensitivity size mismatch");
    for (double s : sensitivities)
        if (s > 0.0) throw std::invalid_argument("oc_update: sensitivities must be <= 0");
    if (!(move_limit > 0.0 && move_limit <= 1.0))
        throw std::invalid_argument("oc_update: move limit must be in (0,1]");

    const std::vector<double> vgrad(n, 1.0 / n);
    OcCore oc{x.values, sensitivities, move_limit, vgrad, volume_target, nullptr, 0.0};
    return DensityField(x.mask, oc.solve());
}

LowFidResult solve_low_fidelity(const MaskPtr& mask, const SeedingParams& s,
                                const BoundaryConditions& bc, const LowFidConfig& cfg,
                                const DensityField* x0) {
    if (!(s.v_max > 0.0 && s.v_max <= 1.0))
        throw std::invalid_argument("solve_low_fidelity: v_max must be in (0,1]");
    std::vector<double> x =
        x0 ? x0->values : std::vector<double>(mask->active_count(), s.v_max);
    return run_simp(mask, s, bc, cfg, std::move(x), nullptr, 0.0);
}

DensityField reference_density(const Population& pop) {
    if (pop.members.empty()) throw std::invalid_argument("reference_density: empty population");
    const MaskPtr mask = pop.members.front().field.mask;
    std::vector<double> mean(mask->active_count(), 0.0);
    for (const Candidate& c : pop.members) {
        if (!c.field.mask->same_grid(*mask))
            throw std::invalid_argument("reference_density: mask mismatch");
        for (std::size_t e = 0; e < mean.size(); ++e) mean[e] += c.field.values[e];
    }
    for (double& v : mean) v /= static_cast<double>(pop.members.size());
    return DensityField(mask, std::move(mean));
}

LowFidResult solve_mutation(const MaskPtr& mask, const SeedingParams& s,
                            const DensityField& rho_ref, double g_max,
                            const BoundaryConditions& bc, const LowFidConfig& cfg,
                            std::mt19937_64& rng) {
    if (!(g_max > 0.0 && g_max <= 1.0))
        throw std::invalid_argument("solve_mutation: g_max must be in (0,1]");
    if (!rho_ref.mask->same_grid(*mask))
        throw std::invalid_argument("solve_mutation: rho_ref mask mismatch");

    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    std::vector<double> x(mask->active_count());
    for (double& v : x) v = std::clamp(s.v_max + noise(rng), 0.0, 1.0);
    return run_simp(mask, s, bc, cfg, std::move(x), &rho_ref, g_max);
}

std::vector<SeedingParams> seeding_grid(int n) {
    if (n < 1) throw std::invalid_argument("seeding_grid: n must be >= 1");
    // factor n as close to square as possible; fall back to a truncated
    // ceil-sized grid when n is prime-ish
    int nr = 1;
    for (int d = 1; d * d <= n; ++d)
        if (n % d == 0) nr = d;
    int nv = n / nr;
    if (nr == 1 && n > 3) {  // prime n: truncated near-square grid
        nr = static_cast<int>(std::ceil(std::sqrt(double(n))));
        nv = (n + nr - 1) / nr;
    }
    const double r_lo = 1.5, r_hi = 6.0, v_lo = 0.15, v_hi = 0.60;
    std::vector<SeedingParams> grid;
    grid.reserve(n);
    for (int i = 0; i < nr && static_cast<int>(grid.size()) < n; ++i) {
        const double r = nr == 1 ? r_lo : r_lo + (r_hi - r_lo) * i / (nr - 1);
        for (int j = 0; j < nv && static_cast<int>(grid.size()) < n; ++j) {
            const double v = nv == 1 ? v_lo : v_lo + (v_hi - v_lo) * j / (nv - 1);
            grid.push_back({r, v});
        }
    }
    return grid;
}

}  // namespace ddtopo
