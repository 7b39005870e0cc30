// Acceptance suite: one self-contained check per criterion, one PASS/FAIL
// line each, nonzero exit if anything fails. `--only N` runs a single
// criterion, `--list` prints the roster.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ddtopo/common.hpp"
#include "ddtopo/domain_grid.hpp"
#include "ddtopo/elasticity_fem.hpp"
#include "ddtopo/evolution.hpp"
#include "ddtopo/generative_crossover.hpp"
#include "ddtopo/io_formats.hpp"
#include "ddtopo/lowfid_optimizer.hpp"
#include "ddtopo/pd_metric.hpp"
#include "ddtopo/persistence.hpp"
#include "ddtopo/pipeline.hpp"
#include "oracles.hpp"

using namespace ddtopo;
namespace fs = std::filesystem;

namespace {

struct Failure {
    std::string detail;
};

#define REQUIRE_OR_FAIL(cond, msg)                                   \
    do {                                                             \
        if (!(cond)) {                                              \
            std::ostringstream os_;                                  \
            os_ << msg;                                              \
            throw Failure{os_.str()};                                \
        }                                                            \
    } while (0)

// ---- criterion 1: PH filtration vs flood-fill oracle -----------------------

void criterion_1() {
    std::mt19937_64 rng(0xA1);
    int tested = 0;
    while (tested < 500) {
        std::uniform_int_distribution<int> dim(2, 16);
        const BinaryImage img = oracles::random_image(dim(rng), dim(rng), rng);
        bool aw = false, ab = false;
        for (auto px : img.white) (px ? aw : ab) = true;
        if (!aw || !ab) continue;
        ++tested;
        const LevelSetField f = signed_distance(img);
        const PersistenceDiagram pd = persistence_diagram_0d(f);
        int min_phi = f.phi[0], max_phi = f.phi[0];
        for (int v : f.phi) {
            min_phi = std::min(min_phi, v);
            max_phi = std::max(max_phi, v);
        }
        for (int t = min_phi - 1; t <= max_phi; ++t) {
            const int comps = oracles::flood_fill_components(
                img.width, img.height, [&](int x, int y) { return f.phi[f.idx(x, y)] <= t; });
            const int living = oracles::living_classes(pd, min_phi, t);
            REQUIRE_OR_FAIL(living == comps, "image " << tested << " at t=" << t << ": living "
                                                      << living << " != components " << comps);
        }
    }
}

// ---- criterion 2: the two-void filtration ----------------------------------

void criterion_2() {
    // full-height slab, single monotone background pocket (essential),
    // 3x3 void behind a 5-wall and 1x1 void behind a 12-wall
    BinaryImage img = oracles::black_canvas(40, 15);
    for (int y = 0; y < 15; ++y)
        for (int x = 0; x < 14; ++x) img.white[img.idx(x, y)] = 1;
    oracles::paint_white_rect(img, 19, 6, 3, 3);
    img.white[img.idx(34, 7)] = 1;

    const PersistenceDiagram pd = persistence_diagram_0d(signed_distance(img));
    REQUIRE_OR_FAIL(pd.pairs.size() == 2, "expected 2 finite pairs, got " << pd.pairs.size());
    const double phi1 = pd.pairs[0].first, phi3 = pd.pairs[0].second;
    const double phi2 = pd.pairs[1].first, phi4 = pd.pairs[1].second;
    REQUIRE_OR_FAIL(phi1 == -2.0 && phi3 == 3.0, "void 1 pair was (" << phi1 << "," << phi3 << ")");
    REQUIRE_OR_FAIL(phi2 == -1.0 && phi4 == 6.0, "void 2 pair was (" << phi2 << "," << phi4 << ")");
    // interleaved ordering phi1 < phi2 < phi3 < phi4: the younger void dies
    // by merging while the elder persists
    REQUIRE_OR_FAIL(phi1 < phi2 && phi2 < phi3 && phi3 < phi4, "ordering violated");
}

// ---- criterion 3: hole counting --------------------------------------------

void criterion_3() {
    for (int k = 1; k <= 7; ++k) {
        const BinaryImage img = oracles::slab_with_holes(34, 24, 8, k);
        REQUIRE_OR_FAIL(oracles::enclosed_hole_count(img) == k, "fixture construction broke");
        const MaskPtr m = full_mask(34, 24);
        const PersistenceDiagram pd = diagram_of(field_from_image(img, m), 0.5);
        REQUIRE_OR_FAIL(static_cast<int>(pd.pairs.size()) == k,
                        "k=" << k << ": got " << pd.pairs.size() << " pairs");
        for (const auto& [b, d] : pd.pairs)
            REQUIRE_OR_FAIL(d - b >= 2.0, "k=" << k << ": lifetime " << (d - b) << " < 2");
    }
}

// ---- criterion 4: Wasserstein exactness ------------------------------------

void criterion_4() {
    std::mt19937_64 rng(0xA4);
    for (int trial = 0; trial < 200; ++trial) {
        const PersistenceDiagram a = oracles::random_diagram(4, rng);
        const PersistenceDiagram b = oracles::random_diagram(4, rng);
        const double got = wasserstein(a, b, 2.0);
        const double want = oracles::brute_wasserstein(a, b, 2.0);
        REQUIRE_OR_FAIL(std::fabs(got - want) <= 1e-9,
                        "pair " << trial << ": " << got << " vs brute " << want);
    }
    for (int trial = 0; trial < 100; ++trial) {
        const PersistenceDiagram a = oracles::random_diagram(5, rng);
        const PersistenceDiagram b = oracles::random_diagram(5, rng);
        const PersistenceDiagram c = oracles::random_diagram(5, rng);
        const double ab = wasserstein(a, b, 2.0);
        const double ba = wasserstein(b, a, 2.0);
        const double ac = wasserstein(a, c, 2.0);
        const double cb = wasserstein(c, b, 2.0);
        REQUIRE_OR_FAIL(wasserstein(a, a, 2.0) == 0.0, "identity violated");
        REQUIRE_OR_FAIL(ab == ba, "symmetry violated");
        REQUIRE_OR_FAIL(ab <= ac + cb + 1e-9, "triangle inequality violated");
        REQUIRE_OR_FAIL(ab >= 0.0, "negativity");
    }
}

// ---- criterion 5: shift-vs-topology ordering --------------------------------

void criterion_5() {
    // 20 fixtures with 1..20 holes; the one-pixel shift twin grows the
    // shallow band from 1 to 2 while every diagram-relevant wall stays put
    const int kFixtures = 20;
    std::vector<DensityField> base(kFixtures), shifted(kFixtures);
    std::vector<PersistenceDiagram> pd_base(kFixtures), pd_shift(kFixtures);
    const MaskPtr mask = full_mask(30, 23);
    for (int i = 0; i < kFixtures; ++i) {
        base[i] = field_from_image(oracles::walled_block(1, 20, 23, 8, i + 1), mask);
        shifted[i] = field_from_image(oracles::walled_block(2, 20, 23, 7, i + 1), mask);
        pd_base[i] = diagram_of(base[i], 0.5);
        pd_shift[i] = diagram_of(shifted[i], 0.5);
        REQUIRE_OR_FAIL(static_cast<int>(pd_base[i].pairs.size()) == i + 2,
                        "fixture " << i << " has " << pd_base[i].pairs.size() << " pairs");
    }
    for (int i = 0; i < kFixtures; ++i)
        for (int j = i + 1; j < kFixtures; ++j)
            REQUIRE_OR_FAIL(!(pd_base[i] == pd_base[j]), "fixtures " << i << "," << j
                                                                     << " not distinct");

    int l2_violations = 0;
    for (int i = 0; i < kFixtures; ++i) {
        const double w_shift = wasserstein(pd_base[i], pd_shift[i], 2.0);
        const double l2_shift = lp_norm_diff(base[i], shifted[i], 2.0);
        for (int j = 0; j < kFixtures; ++j) {
            if (j == i) continue;
            const double w_topo = wasserstein(pd_base[i], pd_base[j], 2.0);
            REQUIRE_OR_FAIL(w_shift < w_topo, "fixture " << i << " vs " << j << ": W2 shift "
                                                         << w_shift << " >= W2 topo " << w_topo);
            if (l2_shift >= lp_norm_diff(base[i], base[j], 2.0)) ++l2_violations;
        }
    }
    REQUIRE_OR_FAIL(l2_violations > 0, "the L2 norm never violated the ordering");
}

// ---- criterion 6: NSGA-II machinery ------------------------------------------

void criterion_6() {
    std::mt19937_64 rng(0xA6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const MaskPtr m = full_mask(2, 2);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Candidate> pool;
        std::vector<std::vector<double>> objs;
        for (int i = 0; i < 30; ++i) {
            Candidate c;
            c.field = DensityField::uniform(m, 0.5);
            c.objectives = {u(rng), u(rng)};
            objs.push_back(c.objectives);
            pool.push_back(std::move(c));
        }
        std::vector<Candidate> sorted = pool;
        auto got_fronts = non_dominated_sort(sorted);
        auto want_fronts = oracles::ref_fronts(objs);
        REQUIRE_OR_FAIL(got_fronts.size() == want_fronts.size(), "front count differs");
        for (std::size_t k = 0; k < got_fronts.size(); ++k) {
            std::sort(got_fronts[k].begin(), got_fronts[k].end());
            std::sort(want_fronts[k].begin(), want_fronts[k].end());
            REQUIRE_OR_FAIL(got_fronts[k] == want_fronts[k], "front " << k << " differs");
        }
        const auto want = oracles::ref_nsga2_select(objs, 10);
        const Population got = select_conventional(pool, 10);
        std::multiset<std::pair<double, double>> got_set, want_set;
        for (const Candidate& c : got.members) got_set.insert({c.objectives[0], c.objectives[1]});
        for (int i : want) want_set.insert({objs[i][0], objs[i][1]});
        REQUIRE_OR_FAIL(got_set == want_set, "survivor sets differ on trial " << trial);
    }
}

// ---- criterion 7: hypervolume vs Monte Carlo ---------------------------------

// independent exact oracle: column strips between consecutive unique F1
// values, best F2 found by a plain scan at each strip midpoint
double exact_hv_oracle(const std::vector<std::array<double, 2>>& front,
                       const std::array<double, 2>& ref) {
    std::vector<std::array<double, 2>> kept;
    std::vector<double> xs;
    for (const auto& q : front)
        if (q[0] < ref[0] && q[1] < ref[1]) {
            kept.push_back(q);
            xs.push_back(q[0]);
        }
    if (kept.empty()) return 0.0;
    xs.push_back(ref[0]);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double mid = 0.5 * (xs[i] + xs[i + 1]);
        double best = ref[1];
        for (const auto& q : kept)
            if (q[0] <= mid) best = std::min(best, q[1]);
        if (best < ref[1]) area += (xs[i + 1] - xs[i]) * (ref[1] - best);
    }
    return area;
}

void criterion_7() {
    std::mt19937_64 rng(0xA7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::array<double, 2> ref{1.05, 1.05};
    // A correct value sits within 3 sigma of one unbiased MC estimate with
    // probability 99.73%, so demanding it 50 times jointly would fail ~12%
    // of the time even for an exact implementation. The batch is therefore
    // judged at an equivalent joint confidence (at most one 3-sigma
    // exceedance, none beyond 4.5), and every front is additionally pinned
    // against an independent *exact* oracle, which is the stronger check.
    int beyond3 = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::array<double, 2>> pts;
        const int n = 5 + trial % 16;
        for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
        const double hv = hypervolume_2d(pts, ref);
        REQUIRE_OR_FAIL(std::fabs(hv - exact_hv_oracle(pts, ref)) <= 1e-12,
                        "trial " << trial << ": exact oracle mismatch");
        const auto mc = oracles::mc_hypervolume(pts, ref, 1000000, rng);
        const double z = std::fabs(hv - mc.value) / std::max(mc.sigma, 1e-300);
        REQUIRE_OR_FAIL(z <= 4.5, "trial " << trial << ": hv " << hv << " vs MC " << mc.value
                                           << " is " << z << " sigma out");
        if (z > 3.0) ++beyond3;
    }
    REQUIRE_OR_FAIL(beyond3 <= 1, beyond3 << " of 50 trials beyond 3 sigma");
}

// ---- criterion 8: FEM checks ---------------------------------------------------

void criterion_8() {
    // patch test: uniaxial tension on a 2x2 patch reproduces the constant
    // stress state and the linear displacement field to 1e-9
    {
        const MaskPtr m = full_mask(2, 2);
        const DensityField field = DensityField::uniform(m, 1.0);
        BoundaryConditions bc;
        const int w = 3;
        for (int iy = 0; iy <= 2; ++iy) bc.fixed_dofs.push_back(2 * (iy * w));
        bc.fixed_dofs.push_back(1);
        for (int iy = 0; iy <= 2; ++iy)
            bc.loads.emplace_back(2 * (iy * w + 2), (iy == 0 || iy == 2) ? 0.5 : 1.0);
        const std::vector<double> u = solve_displacement(assemble_stiffness(field, 1.0, 1e-9), bc);
        for (int iy = 0; iy <= 2; ++iy)
            for (int ix = 0; ix <= 2; ++ix) {
                REQUIRE_OR_FAIL(std::fabs(u[2 * (iy * w + ix)] - ix) <= 1e-9, "patch ux");
                REQUIRE_OR_FAIL(std::fabs(u[2 * (iy * w + ix) + 1] + 0.3 * iy) <= 1e-9, "patch uy");
            }
        for (double vm : von_mises(field, u))
            REQUIRE_OR_FAIL(std::fabs(vm - 1.0) <= 1e-9, "patch von Mises " << vm);
    }
    // bar theory: 10x1 axial bar tip displacement FL/EA to 1e-9
    {
        const MaskPtr m = full_mask(10, 1);
        const DensityField field = DensityField::uniform(m, 1.0);
        BoundaryConditions bc;
        const int w = 11;
        bc.fixed_dofs = {2 * 0, 2 * 0 + 1, 2 * w};
        bc.loads = {{2 * 10, 0.5}, {2 * (w + 10), 0.5}};
        const std::vector<double> u = solve_displacement(assemble_stiffness(field, 1.0, 1e-9), bc);
        REQUIRE_OR_FAIL(std::fabs(u[2 * 10] - 10.0) <= 1e-9, "bar tip " << u[2 * 10]);
    }
    // beam theory: 60x20 cantilever tip deflection within 15% of PL^3/3EI
    {
        const MaskPtr m = full_mask(60, 20);
        BoundaryConditions bc;
        const int w = 61;
        for (int iy = 0; iy <= 20; ++iy) {
            bc.fixed_dofs.push_back(2 * (iy * w));
            bc.fixed_dofs.push_back(2 * (iy * w) + 1);
        }
        bc.loads = {{2 * (10 * w + 60) + 1, -1.0}};
        const FemAnalysis an = analyze(DensityField::uniform(m, 1.0), 1.0, 1e-9, bc);
        REQUIRE_OR_FAIL(!an.singular, "cantilever solve failed");
        const double tip = -an.displacements[2 * (10 * w + 60) + 1];
        const double euler = 60.0 * 60.0 * 60.0 / (3.0 * (8000.0 / 12.0));
        REQUIRE_OR_FAIL(std::fabs(tip - euler) / euler < 0.15,
                        "tip " << tip << " vs Euler-Bernoulli " << euler);
    }
    // adjoint compliance gradient vs central differences, <= 1e-4 relative
    {
        const MaskPtr m = full_mask(6, 6);
        BoundaryConditions bc;
        const int w = 7;
        for (int iy = 0; iy <= 6; ++iy) {
            bc.fixed_dofs.push_back(2 * (iy * w));
            bc.fixed_dofs.push_back(2 * (iy * w) + 1);
        }
        bc.loads = {{2 * (3 * w + 6) + 1, -1.0}};
        const LowFidConfig cfg;
        const DensityFilter filter(m, 1.8);
        std::mt19937_64 rng(0xA8);
        std::uniform_real_distribution<double> u(0.3, 0.7);
        std::vector<double> x(m->active_count());
        for (double& v : x) v = u(rng);

        std::vector<double> xp = filter.apply(x);
        const FemAnalysis an = analyze(DensityField(m, xp), cfg.penal, cfg.e_min, bc);
        std::vector<double> sens_phys(m->active_count());
        for (int e = 0; e < m->active_count(); ++e)
            sens_phys[e] = -cfg.penal * std::pow(xp[e], cfg.penal - 1.0) * (1.0 - cfg.e_min) *
                           an.unit_energies[e];
        const std::vector<double> grad = filter.apply_transpose(sens_phys);
        const std::vector<double> fd = oracles::fd_gradient(
            [&](const std::vector<double>& design) {
                std::vector<double> p = filter.apply(design);
                for (double& v : p) v = std::clamp(v, 0.0, 1.0);
                return analyze(DensityField(m, p), cfg.penal, cfg.e_min, bc).compliance;
            },
            x, 1e-6);
        for (int e = 0; e < m->active_count(); ++e) {
            const double scale = std::max(std::fabs(fd[e]), 1e-8);
            REQUIRE_OR_FAIL(std::fabs(grad[e] - fd[e]) / scale <= 1e-4,
                            "gradient mismatch at element " << e);
        }
    }
}

// ---- criterion 9: low-fidelity solver ------------------------------------------

void criterion_9() {
    const MaskPtr m = full_mask(30, 30);
    BoundaryConditions bc;
    const int w = 31;
    for (int iy = 0; iy <= 30; ++iy) {
        bc.fixed_dofs.push_back(2 * (iy * w));
        bc.fixed_dofs.push_back(2 * (iy * w) + 1);
    }
    bc.loads = {{2 * (15 * w + 30) + 1, -1.0}};
    const LowFidConfig cfg;
    const LowFidResult r = solve_low_fidelity(m, {1.5, 0.5}, bc, cfg);
    REQUIRE_OR_FAIL(r.converged, "30x30 cantilever did not converge");
    REQUIRE_OR_FAIL(std::fabs(volume_fraction(r.field) - 0.5) <= 1e-3,
                    "volume error " << std::fabs(volume_fraction(r.field) - 0.5));
    const double uniform =
        analyze(DensityField::uniform(m, 0.5), cfg.penal, cfg.e_min, bc).compliance;
    const double optimized = analyze(r.field, cfg.penal, cfg.e_min, bc).compliance;
    REQUIRE_OR_FAIL(optimized < uniform,
                    "compliance " << optimized << " not below uniform " << uniform);

    // mutation under the overlapping bound with the benchmark value 0.01
    Population pop;
    for (double v : {0.35, 0.45, 0.5}) {
        Candidate c;
        c.field = solve_low_fidelity(m, {1.5, v}, bc, cfg).field;
        pop.members.push_back(std::move(c));
    }
    const DensityField rho_ref = reference_density(pop);
    std::mt19937_64 rng(0xA9);
    const double g_max = 0.01;
    const LowFidResult mut = solve_mutation(m, {2.0, 0.4}, rho_ref, g_max, bc, cfg, rng);
    double overlap = 0.0;
    for (int e = 0; e < m->active_count(); ++e) overlap += mut.field.values[e] * rho_ref.values[e];
    const double bound = g_max * m->active_count();
    REQUIRE_OR_FAIL(overlap <= bound * (1.0 + 1e-3),
                    "overlap " << overlap << " exceeds " << bound << " by more than 0.1%");
}

// ---- criterion 10: VAE training -----------------------------------------------

void criterion_10() {
    // (a) gradient check on a toy model
    {
        const MaskPtr mask = full_mask(5, 2);
        std::mt19937_64 rng(0xB0);
        VaeModel m = make_vae(mask, 6, 3, rng);
        Matrix X(4, 10), eps(4, 3);
        std::uniform_real_distribution<double> u(0.05, 0.95);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (double& v : X.a) v = u(rng);
        for (double& v : eps.a) v = gauss(rng);
        VaeGradients grads;
        vae_loss_and_grads(m, X, eps, 1e-3, &grads);
        auto params = m.parameters();
        auto gs = grads.parameters();
        for (std::size_t k = 0; k < params.size(); ++k) {
            Matrix& p = *params[k];
            for (std::size_t i = 0; i < p.a.size(); ++i) {
                const double keep = p.a[i];
                p.a[i] = keep + 1e-5;
                const double fp = vae_loss_and_grads(m, X, eps, 1e-3, nullptr);
                p.a[i] = keep - 1e-5;
                const double fm = vae_loss_and_grads(m, X, eps, 1e-3, nullptr);
                p.a[i] = keep;
                const double fd = (fp - fm) / 2e-5;
                const double an = gs[k]->a[i];
                const double scale = std::max({std::fabs(fd), std::fabs(an), 1e-7});
                REQUIRE_OR_FAIL(std::fabs(an - fd) / scale <= 1e-4,
                                "gradient mismatch in parameter block " << k);
            }
        }
    }
    // (b) overfit one repeated sample below 10% of the initial loss
    {
        const MaskPtr mask = full_mask(8, 8);
        std::mt19937_64 rng(0xB1);
        std::vector<DensityField> data(10, oracles::random_field(mask, rng));
        TrainConfig cfg;
        cfg.epochs = 400;
        cfg.kl_weight = 0.0;
        const TrainResult tr = train_vae(data, cfg, rng, 32, 4);
        REQUIRE_OR_FAIL(tr.epoch_loss.back() < 0.1 * tr.epoch_loss.front(),
                        "final " << tr.epoch_loss.back() << " vs initial "
                                 << tr.epoch_loss.front());
    }
    // (c) 500 epochs on 100 L-bracket (n = 50) seeding-grid fields
    {
        const auto tic = std::chrono::steady_clock::now();
        const MaskPtr m = lbracket_mask(50);
        const BoundaryConditions bc = lbracket_bc(*m);
        const LowFidConfig lf;
        const auto grid = seeding_grid(100);
        std::vector<DensityField> fields(grid.size());
        parallel_for(grid.size(), [&](std::size_t i) {
            fields[i] = solve_low_fidelity(m, grid[i], bc, lf).field;
        });
        std::mt19937_64 rng(0xB2);
        const TrainConfig cfg;  // Table-2 settings
        const TrainResult tr = train_vae(fields, cfg, rng, 512, 8);
        const double minutes = std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - tic)
                                   .count() /
                               60.0;
        REQUIRE_OR_FAIL(tr.epoch_loss.back() <= 0.5 * tr.epoch_loss.front(),
                        "loss only fell from " << tr.epoch_loss.front() << " to "
                                               << tr.epoch_loss.back());
        REQUIRE_OR_FAIL(minutes < 15.0, "took " << minutes << " min (target < 15)");
        std::printf("        [criterion 10c: loss %.4f -> %.4f in %.1f min]\n",
                    tr.epoch_loss.front(), tr.epoch_loss.back(), minutes);
    }
}

// ---- criterion 11: end-to-end comparison ----------------------------------------

RunConfig desk_config(const std::string& out_dir) {
    RunConfig cfg;
    cfg.mesh_n = 50;
    cfg.t_max = 30;
    cfg.n_ini = 40;
    cfg.n_pop = 20;
    cfg.n_vae = 20;
    cfg.out_dir = out_dir;
    return cfg;
}

void criterion_11() {
    const std::string out = (fs::temp_directory_path() / "ddtopo_acceptance_compare").string();
    fs::remove_all(out);
    const RunConfig cfg = desk_config(out);
    const CompareResult r = compare_experiment(cfg, {1, 2, 3});
    std::printf("        [criterion 11: mean final hv conventional %.6g, ph %.6g, %+.2f%%]\n",
                r.mean_final_conventional, r.mean_final_ph, r.improvement_percent);
    REQUIRE_OR_FAIL(r.mean_final_ph >= r.mean_final_conventional,
                    "ph selection mean " << r.mean_final_ph << " below conventional "
                                         << r.mean_final_conventional);
}

// ---- criterion 12: byte-identical determinism -------------------------------------

void criterion_12() {
    const fs::path base = fs::temp_directory_path() / "ddtopo_acceptance_det";
    fs::remove_all(base);
    RunConfig cfg;
    cfg.mesh_n = 20;
    cfg.t_max = 3;
    cfg.n_ini = 12;
    cfg.n_pop = 10;
    cfg.n_vae = 10;
    cfg.n_mut = 4;
    cfg.t_mut = 2;
    cfg.conv_window = 0;
    cfg.vae.epochs = 60;
    cfg.seed = 2024;
    cfg.out_dir = (base / "a").string();
    run(cfg);
    cfg.out_dir = (base / "b").string();
    run(cfg);
    REQUIRE_OR_FAIL(read_text_file((base / "a/hypervolume.csv").string()) ==
                        read_text_file((base / "b/hypervolume.csv").string()),
                    "hypervolume.csv differs between runs");
    REQUIRE_OR_FAIL(read_text_file((base / "a/pareto.csv").string()) ==
                        read_text_file((base / "b/pareto.csv").string()),
                    "pareto.csv differs between runs");
    fs::remove_all(base);
}

struct Criterion {
    int id;
    const char* title;
    std::function<void()> fn;
};

const std::vector<Criterion>& roster() {
    static const std::vector<Criterion> list = {
        {1, "persistence vs flood-fill oracle on 500 random images", criterion_1},
        {2, "two-void filtration pairs and ordering", criterion_2},
        {3, "k enclosed holes give k long-lived pairs (k = 1..7)", criterion_3},
        {4, "Wasserstein exactness and metric axioms", criterion_4},
        {5, "shift-vs-topology ordering (and the L2 counterexample)", criterion_5},
        {6, "non-dominated sorting and selection vs reference", criterion_6},
        {7, "hypervolume within 3 sigma of Monte Carlo", criterion_7},
        {8, "FEM patch/bar/beam tests and adjoint gradient", criterion_8},
        {9, "low-fidelity solver and mutation overlap bound", criterion_9},
        {10, "VAE gradients, overfit check and full-size training", criterion_10},
        {11, "end-to-end ph vs conventional comparison (3 seeds)", criterion_11},
        {12, "byte-identical repetition with a fixed seed", criterion_12},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        if (std::strcmp(argv[i], "--list") == 0) {
            for (const Criterion& c : roster()) std::printf("%2d  %s\n", c.id, c.title);
            return 0;
        }
    }
    int failures = 0;
    for (const Criterion& c : roster()) {
        if (only && c.id != only) continue;
        const auto tic = std::chrono::steady_clock::now();
        std::string detail;
        try {
            c.fn();
        } catch (const Failure& f) {
            detail = f.detail;
        } catch (const std::exception& e) {
            detail = std::string("unexpected error: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
        if (detail.empty()) {
            std::printf("[PASS] criterion %2d: %s (%.1f s)\n", c.id, c.title, secs);
        } else {
            std::printf("[FAIL] criterion %2d: %s (%.1f s)\n        %s\n", c.id, c.title, secs,
                        detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
