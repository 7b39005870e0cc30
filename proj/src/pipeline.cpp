#include "ddtopo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ddtopo/common.hpp"
#include "ddtopo/io_formats.hpp"
#include "ddtopo/pd_metric.hpp"
#include "ddtopo/persistence.hpp"

namespace fs = std::filesystem;

namespace ddtopo {

namespace {

enum Stage : std::uint64_t { kStageCrossover = 1, kStageMutation = 2 };

// ---- config ----------------------------------------------------------

template <typename T>
T parse_number(const std::string& key, const std::string& value);

template <>
double parse_number<double>(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': not a number: '" + value + "'");
    }
    if (pos != value.size())
        throw std::runtime_error("config key '" + key + "': trailing junk in '" + value + "'");
    return v;
}

template <>
long parse_number<long>(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(value, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': not an integer: '" + value + "'");
    }
    if (pos != value.size())
        throw std::runtime_error("config key '" + key + "': trailing junk in '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::runtime_error("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

BoundaryConditions boundary_conditions(const RunConfig& cfg, const DomainMask& mask) {
    if (cfg.bc == "lbracket") return lbracket_bc(mask);
    BoundaryConditions bc;
    bc.fixed_dofs = cfg.fixed_dofs;
    bc.loads = cfg.loads;
    return bc;
}

// ---- evaluation helpers ----------------------------------------------

std::vector<Candidate> evaluate_fields(std::vector<DensityField> fields, const RunConfig& cfg,
                                       const BoundaryConditions& bc, std::uint64_t& id_counter) {
    std::vector<Candidate> out(fields.size());
    parallel_for(fields.size(), [&](std::size_t i) {
        const HighFidelityResult r = evaluate_high_fidelity(
            fields[i], bc, cfg.binarize_threshold, cfg.lowfid.e_min, cfg.compliance_cap);
        out[i].field = std::move(fields[i]);
        out[i].objectives = {r.f1, r.f2};
        out[i].feasible = r.feasible;
    });
    for (Candidate& c : out) c.id = id_counter++;
    return out;
}

void ensure_diagrams(std::vector<Candidate>& cands, double threshold) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < cands.size(); ++i)
        if (!cands[i].diagram) todo.push_back(i);
    parallel_for(todo.size(), [&](std::size_t k) {
        Candidate& c = cands[todo[k]];
        c.diagram = diagram_of(c.field, threshold);
    });
}

Population select_with_mode(const RunConfig& cfg, std::vector<Candidate> pool, std::string* mode) {
    if (cfg.selection == "conventional") {
        if (mode) *mode = "exploitation";
        return select_conventional(std::move(pool), cfg.n_pop);
    }
    ensure_diagrams(pool, cfg.binarize_threshold);
    bool used_wasserstein = false;
    Population pop = select_ph(std::move(pool), cfg.n_pop, cfg.wasserstein_p, &used_wasserstein);
    if (mode) *mode = used_wasserstein ? "exploration" : "exploitation";
    return pop;
}

std::vector<Candidate> dedup_pool(std::vector<Candidate> pool, int n_pop) {
    std::unordered_set<std::size_t> seen;
    std::vector<Candidate> kept, dropped;
    for (Candidate& c : pool) {
        std::size_t h = 1469598103934665603ULL;
        for (double v : c.field.values) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            h = (h ^ bits) * 1099511628211ULL;
        }
        if (seen.insert(h).second)
            kept.push_back(std::move(c));
        else
            dropped.push_back(std::move(c));
    }
    // never drop below the selection size
    for (Candidate& c : dropped) {
        if (static_cast<int>(kept.size()) >= n_pop) break;
        kept.push_back(std::move(c));
    }
    return kept;
}

std::array<double, 2> auto_reference(const std::vector<Candidate>& cands) {
    double m0 = -1.0, m1 = -1.0;
    for (const Candidate& c : cands) {
        if (!c.feasible) continue;
        m0 = std::max(m0, c.objectives[0]);
        m1 = std::max(m1, c.objectives[1]);
    }
    if (m0 <= 0.0 || m1 <= 0.0)
        throw std::runtime_error("hypervolume reference: no feasible initial candidate");
    return {1.1 * m0, 1.1 * m1};
}

double population_hypervolume(const Population& pop, const std::array<double, 2>& ref,
                              int* front_size) {
    std::vector<std::array<double, 2>> front;
    for (const Candidate& c : pop.members)
        if (c.feasible && c.rank == 1) front.push_back({c.objectives[0], c.objectives[1]});
    if (front_size) *front_size = static_cast<int>(front.size());
    return hypervolume_2d(front, ref);
}

// ---- artifacts --------------------------------------------------------

void write_hypervolume_csv(const std::vector<IterationRecord>& records, const std::string& path) {
    std::ostringstream out;
    out << "iteration,evaluations,hypervolume\n";
    for (const IterationRecord& r : records)
        out << r.iteration << "," << r.evaluations << "," << g17(r.hypervolume) << "\n";
    write_text_file(path, out.str());
}

void write_iterations_csv(const std::vector<IterationRecord>& records, const std::string& path) {
    std::ostringstream out;
    out << "iteration,evaluations,hypervolume,front_size,mode,wall_ms\n";
    for (const IterationRecord& r : records)
        out << r.iteration << "," << r.evaluations << "," << g17(r.hypervolume) << ","
            << r.front_size << "," << r.mode << "," << g17(r.wall_ms) << "\n";
    write_text_file(path, out.str());
}

void dump_stress_maps(const Population& pop, const RunConfig& cfg, const BoundaryConditions& bc,
                      const std::string& dir) {
    fs::create_directories(dir);
    for (const Candidate& c : pop.members) {
        if (!c.feasible || c.rank != 1) continue;
        const DensityField binary =
            field_from_image(binarize(c.field, cfg.binarize_threshold), c.field.mask);
        const FemAnalysis an = analyze(binary, 1.0, cfg.lowfid.e_min, bc);
        if (an.singular) continue;
        std::vector<double> vm = von_mises(binary, an.displacements);
        double peak = 0.0;
        for (double v : vm) peak = std::max(peak, v);
        if (peak > 0.0)
            for (double& v : vm) v /= peak;
        char name[64];
        std::snprintf(name, sizeof(name), "stress_%06llu.pgm",
                      static_cast<unsigned long long>(c.id));
        write_density_pgm(DensityField(c.field.mask, std::move(vm)), dir + "/" + name);
    }
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string s = canonical_config(cfg);
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    return h;
}

// ---- the loop ---------------------------------------------------------

struct LoopState {
    Population pop;
    std::vector<IterationRecord> records;
    std::array<double, 2> ref{0.0, 0.0};
    long evaluations = 0;
    std::uint64_t id_counter = 0;
};

RunResult run_loop(const RunConfig& cfg, LoopState st, int start_iteration) {
    validate(cfg);
    if (cfg.threads > 0) set_thread_count(cfg.threads);
    const MaskPtr mask = lbracket_mask(cfg.mesh_n, cfg.cut_num, cfg.cut_den);
    const BoundaryConditions bc = boundary_conditions(cfg, *mask);
    const bool has_out = !cfg.out_dir.empty();
    if (has_out) {
        fs::create_directories(cfg.out_dir);
        fs::create_directories(cfg.out_dir + "/checkpoints");
        write_text_file(cfg.out_dir + "/config.txt", canonical_config(cfg));
    }

    const int n_vae = cfg.effective_n_vae();
    std::vector<double> last_loss;
    VaeModel last_model;
    bool have_model = false;
    bool stopped_early = false;

    for (int t = start_iteration; t <= cfg.t_max; ++t) {
        const auto tic = std::chrono::steady_clock::now();

        // crossover; the last generation's model becomes the weight artifact
        std::mt19937_64 rng_x(derive_seed(cfg.seed, kStageCrossover, t));
        std::vector<DensityField> fresh =
            crossover(st.pop, n_vae, cfg.vae, cfg.spx, rng_x, cfg.binarize_threshold, &last_loss,
                      cfg.vae_hidden, cfg.vae_latent, &last_model);
        last_model.train_seed = derive_seed(cfg.seed, kStageCrossover, t);
        have_model = true;
        const bool mutated = cfg.t_mut > 0 && t % cfg.t_mut == 0;
        if (mutated) {
            const DensityField rho_ref = reference_density(st.pop);
            const std::vector<SeedingParams> grid = seeding_grid(cfg.n_ini);
            std::vector<DensityField> mutants(cfg.n_mut);
            parallel_for(static_cast<std::size_t>(cfg.n_mut), [&](std::size_t m) {
                std::mt19937_64 rng_m(derive_seed(cfg.seed, kStageMutation, t, m));
                std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
                const SeedingParams sp = grid[pick(rng_m)];
                mutants[m] = solve_mutation(mask, sp, rho_ref, cfg.g_mut_max, bc, cfg.lowfid, rng_m)
                                 .field;
            });
            for (DensityField& f : mutants) fresh.push_back(std::move(f));
        }

        std::vector<Candidate> pool = std::move(st.pop.members);
        {
            std::vector<Candidate> fresh_cands =
                evaluate_fields(std::move(fresh), cfg, bc, st.id_counter);
            for (Candidate& c : fresh_cands) pool.push_back(std::move(c));
        }
        if (cfg.dedup) pool = dedup_pool(std::move(pool), cfg.n_pop);

        std::string mode;
        st.pop = select_with_mode(cfg, std::move(pool), &mode);
        st.pop.generation = t;
        st.evaluations += cfg.n_pop + n_vae + (mutated ? cfg.n_mut : 0);

        IterationRecord rec;
        rec.iteration = t;
        rec.evaluations = st.evaluations;
        rec.hypervolume = population_hypervolume(st.pop, st.ref, &rec.front_size);
        rec.mode = mode;
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - tic)
                          .count();
        st.records.push_back(rec);

        if (has_out) {
            char name[64];
            std::snprintf(name, sizeof(name), "ckpt_%04d.bin", t);
            save_checkpoint(cfg.out_dir + "/checkpoints/" + name, cfg, t, st.evaluations,
                            st.id_counter, st.ref, st.records, st.pop);
        }

        // hypervolume convergence over the trailing window
        if (cfg.conv_window > 0 && static_cast<int>(st.records.size()) > cfg.conv_window) {
            const double now = st.records.back().hypervolume;
            const double then =
                st.records[st.records.size() - 1 - cfg.conv_window].hypervolume;
            if (std::fabs(now - then) / std::max(std::fabs(now), 1e-300) < cfg.conv_tol) {
                stopped_early = t < cfg.t_max;
                break;
            }
        }
    }

    if (has_out) {
        write_hypervolume_csv(st.records, cfg.out_dir + "/hypervolume.csv");
        write_iterations_csv(st.records, cfg.out_dir + "/iterations.csv");
        // fresh ranks over the final population for the export
        if (!st.pop.members.empty()) {
            non_dominated_sort(st.pop.members);
            write_front_csv(st.pop.members, cfg.out_dir + "/pareto.csv");
        }
        if (have_model) {
            save_vae(last_model, cfg.out_dir + "/vae_final.bin");
            std::ostringstream loss;
            loss << "epoch,loss\n";
            for (std::size_t e = 0; e < last_loss.size(); ++e)
                loss << (e + 1) << "," << g17(last_loss[e]) << "\n";
            write_text_file(cfg.out_dir + "/vae_loss.csv", loss.str());
        }
        if (cfg.dump_stress) dump_stress_maps(st.pop, cfg, bc, cfg.out_dir + "/stress");
    }

    RunResult res;
    res.population = std::move(st.pop);
    res.records = std::move(st.records);
    res.hv_ref = st.ref;
    res.stopped_early = stopped_early;
    return res;
}

LoopState initial_state(const RunConfig& cfg, InitialData data) {
    LoopState st;
    st.id_counter = data.candidates.size();
    st.ref = cfg.hv_ref_auto ? auto_reference(data.candidates) : cfg.hv_ref;

    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir + "/initial");
        std::ostringstream manifest;
        manifest << "id,r,vmax,compliance,volfrac,converged\n";
        for (std::size_t i = 0; i < data.candidates.size(); ++i) {
            manifest << data.candidates[i].id << "," << g17(data.params[i].r) << ","
                     << g17(data.params[i].v_max) << "," << g17(data.compliance[i]) << ","
                     << g17(volume_fraction(data.candidates[i].field)) << ","
                     << int(data.converged[i]) << "\n";
            char name[64];
            std::snprintf(name, sizeof(name), "field_%04zu.pgm", i);
            write_density_pgm(data.candidates[i].field, cfg.out_dir + "/initial/" + name);
        }
        write_text_file(cfg.out_dir + "/initial/manifest.csv", manifest.str());
    }

    std::string mode;
    st.pop = select_with_mode(cfg, std::move(data.candidates), &mode);
    st.pop.generation = 0;
    st.evaluations = cfg.n_ini;

    IterationRecord rec;
    rec.iteration = 0;
    rec.evaluations = st.evaluations;
    rec.hypervolume = population_hypervolume(st.pop, st.ref, &rec.front_size);
    rec.mode = mode;
    st.records.push_back(rec);
    return st;
}

RunResult run_with_initial(const RunConfig& cfg, InitialData data) {
    return run_loop(cfg, initial_state(cfg, std::move(data)), 1);
}

}  // namespace

RunConfig run_config_from_kv(const std::map<std::string, std::string>& kv) {
    RunConfig cfg;
    std::map<std::string, std::string> rest = kv;
    auto take = [&rest](const char* key) -> std::optional<std::string> {
        auto it = rest.find(key);
        if (it == rest.end()) return std::nullopt;
        std::string v = it->second;
        rest.erase(it);
        return v;
    };
    auto geti = [&](const char* key, int& slot) {
        if (auto v = take(key)) slot = static_cast<int>(parse_number<long>(key, *v));
    };
    auto getd = [&](const char* key, double& slot) {
        if (auto v = take(key)) slot = parse_number<double>(key, *v);
    };
    auto getb = [&](const char* key, bool& slot) {
        if (auto v = take(key)) slot = parse_bool(key, *v);
    };

    geti("mesh_n", cfg.mesh_n);
    geti("cut_num", cfg.cut_num);
    geti("cut_den", cfg.cut_den);
    if (auto v = take("bc")) cfg.bc = *v;
    if (auto v = take("fixed_dofs"))
        for (const std::string& s : split(*v, ','))
            cfg.fixed_dofs.push_back(static_cast<int>(parse_number<long>("fixed_dofs", s)));
    if (auto v = take("loads"))
        for (const std::string& s : split(*v, ',')) {
            const auto colon = s.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error("config key 'loads': expected dof:value entries");
            cfg.loads.emplace_back(static_cast<int>(parse_number<long>("loads", s.substr(0, colon))),
                                   parse_number<double>("loads", s.substr(colon + 1)));
        }
    if (auto v = take("selection")) cfg.selection = *v;
    geti("t_max", cfg.t_max);
    geti("n_ini", cfg.n_ini);
    geti("n_pop", cfg.n_pop);
    geti("n_vae", cfg.n_vae);
    geti("n_mut", cfg.n_mut);
    geti("t_mut", cfg.t_mut);
    getd("g_mut_max", cfg.g_mut_max);
    getd("wasserstein_p", cfg.wasserstein_p);
    getd("binarize_threshold", cfg.binarize_threshold);
    if (auto v = take("hv_ref")) {
        if (*v == "auto") {
            cfg.hv_ref_auto = true;
        } else {
            const auto parts = split(*v, ',');
            if (parts.size() != 2)
                throw std::runtime_error("config key 'hv_ref': expected 'auto' or 'f1,f2'");
            cfg.hv_ref_auto = false;
            cfg.hv_ref = {parse_number<double>("hv_ref", parts[0]),
                          parse_number<double>("hv_ref", parts[1])};
        }
    }
    geti("conv_window", cfg.conv_window);
    getd("conv_tol", cfg.conv_tol);
    getd("penal", cfg.lowfid.penal);
    geti("lowfid_max_iters", cfg.lowfid.max_iters);
    getd("move_limit", cfg.lowfid.move_limit);
    getd("lowfid_tol", cfg.lowfid.convergence_tol);
    getd("e_min", cfg.lowfid.e_min);
    geti("vae_epochs", cfg.vae.epochs);
    geti("vae_batch", cfg.vae.batch);
    getd("vae_lr", cfg.vae.learning_rate);
    getd("vae_kl_weight", cfg.vae.kl_weight);
    geti("vae_hidden", cfg.vae_hidden);
    geti("vae_latent", cfg.vae_latent);
    geti("spx_parents", cfg.spx.parents_per_group);
    getd("spx_expansion", cfg.spx.expansion);
    getd("compliance_cap", cfg.compliance_cap);
    getb("dedup", cfg.dedup);
    getb("dump_stress", cfg.dump_stress);
    if (auto v = take("seed")) cfg.seed = static_cast<std::uint64_t>(parse_number<long>("seed", *v));
    if (auto v = take("out_dir")) cfg.out_dir = *v;
    geti("threads", cfg.threads);

    if (!rest.empty()) throw std::runtime_error("unknown config key '" + rest.begin()->first + "'");
    validate(cfg);
    return cfg;
}

RunConfig parse_run_config(const std::string& path) {
    return run_config_from_kv(read_key_value_file(path));
}

void validate(const RunConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::runtime_error("config: " + msg); };
    if (cfg.mesh_n < cfg.cut_den || cfg.mesh_n % cfg.cut_den != 0)
        fail("mesh_n must be a positive multiple of cut_den");
    if (cfg.bc != "lbracket" && cfg.bc != "custom") fail("bc must be 'lbracket' or 'custom'");
    if (cfg.bc == "custom" && (cfg.fixed_dofs.size() < 3 || cfg.loads.empty()))
        fail("custom bc needs >= 3 fixed dofs and at least one load");
    if (cfg.selection != "ph" && cfg.selection != "conventional")
        fail("selection must be 'ph' or 'conventional'");
    if (cfg.t_max < 0) fail("t_max must be >= 0");
    if (cfg.n_ini < 1 || cfg.n_pop < 1) fail("n_ini and n_pop must be positive");
    if (cfg.n_pop > cfg.n_ini) fail("n_pop must not exceed n_ini");
    if (cfg.effective_n_vae() < 1) fail("n_vae must be positive");
    if (cfg.n_mut < 0) fail("n_mut must be >= 0");
    if (cfg.t_mut < 1) fail("t_mut must be >= 1");
    if (!(cfg.g_mut_max > 0.0 && cfg.g_mut_max < 1.0)) fail("g_mut_max must be in (0,1)");
    if (!(cfg.wasserstein_p >= 1.0)) fail("wasserstein_p must be >= 1");
    if (!(cfg.binarize_threshold > 0.0 && cfg.binarize_threshold < 1.0))
        fail("binarize_threshold must be in (0,1)");
    if (cfg.conv_window < 0) fail("conv_window must be >= 0");
    if (cfg.conv_tol < 0.0) fail("conv_tol must be >= 0");
    if (cfg.vae.epochs < 1 || cfg.vae.batch < 1) fail("vae_epochs and vae_batch must be positive");
    if (!(cfg.vae.learning_rate > 0.0)) fail("vae_lr must be positive");
    if (cfg.vae.kl_weight < 0.0) fail("vae_kl_weight must be >= 0");
    if (cfg.vae_hidden < 1 || cfg.vae_latent < 1) fail("vae dims must be positive");
    if (cfg.spx.parents_per_group != cfg.vae_latent + 1)
        fail("spx_parents must equal vae_latent + 1");
    if (!(cfg.spx.expansion > 0.0)) fail("spx_expansion must be positive");
    if (cfg.t_max > 0 && cfg.n_pop < cfg.spx.parents_per_group)
        fail("n_pop must be >= spx_parents to draw distinct parent groups");
    if (!(cfg.lowfid.penal >= 1.0)) fail("penal must be >= 1");
    if (!(cfg.lowfid.move_limit > 0.0 && cfg.lowfid.move_limit <= 1.0))
        fail("move_limit must be in (0,1]");
    if (cfg.lowfid.max_iters < 1) fail("lowfid_max_iters must be >= 1");
    if (!(cfg.lowfid.e_min > 0.0 && cfg.lowfid.e_min < 1.0)) fail("e_min must be in (0,1)");
}

std::string canonical_config(const RunConfig& cfg) {
    std::ostringstream o;
    o << "mesh_n = " << cfg.mesh_n << "\n";
    o << "cut_num = " << cfg.cut_num << "\n";
    o << "cut_den = " << cfg.cut_den << "\n";
    o << "bc = " << cfg.bc << "\n";
    if (!cfg.fixed_dofs.empty()) {
        o << "fixed_dofs = ";
        for (std::size_t i = 0; i < cfg.fixed_dofs.size(); ++i)
            o << (i ? "," : "") << cfg.fixed_dofs[i];
        o << "\n";
    }
    if (!cfg.loads.empty()) {
        o << "loads = ";
        for (std::size_t i = 0; i < cfg.loads.size(); ++i)
            o << (i ? "," : "") << cfg.loads[i].first << ":" << g17(cfg.loads[i].second);
        o << "\n";
    }
    o << "selection = " << cfg.selection << "\n";
    o << "t_max = " << cfg.t_max << "\n";
    o << "n_ini = " << cfg.n_ini << "\n";
    o << "n_pop = " << cfg.n_pop << "\n";
    o << "n_vae = " << cfg.effective_n_vae() << "\n";
    o << "n_mut = " << cfg.n_mut << "\n";
    o << "t_mut = " << cfg.t_mut << "\n";
    o << "g_mut_max = " << g17(cfg.g_mut_max) << "\n";
    o << "wasserstein_p = " << g17(cfg.wasserstein_p) << "\n";
    o << "binarize_threshold = " << g17(cfg.binarize_threshold) << "\n";
    if (cfg.hv_ref_auto)
        o << "hv_ref = auto\n";
    else
        o << "hv_ref = " << g17(cfg.hv_ref[0]) << "," << g17(cfg.hv_ref[1]) << "\n";
    o << "conv_window = " << cfg.conv_window << "\n";
    o << "conv_tol = " << g17(cfg.conv_tol) << "\n";
    o << "penal = " << g17(cfg.lowfid.penal) << "\n";
    o << "lowfid_max_iters = " << cfg.lowfid.max_iters << "\n";
    o << "move_limit = " << g17(cfg.lowfid.move_limit) << "\n";
    o << "lowfid_tol = " << g17(cfg.lowfid.convergence_tol) << "\n";
    o << "e_min = " << g17(cfg.lowfid.e_min) << "\n";
    o << "vae_epochs = " << cfg.vae.epochs << "\n";
    o << "vae_batch = " << cfg.vae.batch << "\n";
    o << "vae_lr = " << g17(cfg.vae.learning_rate) << "\n";
    o << "vae_kl_weight = " << g17(cfg.vae.kl_weight) << "\n";
    o << "vae_hidden = " << cfg.vae_hidden << "\n";
    o << "vae_latent = " << cfg.vae_latent << "\n";
    o << "spx_parents = " << cfg.spx.parents_per_group << "\n";
    o << "spx_expansion = " << g17(cfg.spx.expansion) << "\n";
    o << "compliance_cap = " << g17(cfg.compliance_cap) << "\n";
    o << "dedup = " << (cfg.dedup ? "true" : "false") << "\n";
    o << "dump_stress = " << (cfg.dump_stress ? "true" : "false") << "\n";
    o << "seed = " << cfg.seed << "\n";
    return o.str();
}

InitialData generate_initial_data(const RunConfig& cfg) {
    validate(cfg);
    if (cfg.threads > 0) set_thread_count(cfg.threads);
    const MaskPtr mask = lbracket_mask(cfg.mesh_n, cfg.cut_num, cfg.cut_den);
    const BoundaryConditions bc = boundary_conditions(cfg, *mask);

    InitialData data;
    data.params = seeding_grid(cfg.n_ini);
    const std::size_t n = data.params.size();
    std::vector<DensityField> fields(n);
    data.compliance.assign(n, 0.0);
    data.converged.assign(n, 0);
    parallel_for(n, [&](std::size_t i) {
        const LowFidResult r = solve_low_fidelity(mask, data.params[i], bc, cfg.lowfid);
        fields[i] = r.field;
        data.compliance[i] = r.compliance;
        data.converged[i] = r.converged ? 1 : 0;
    });
    std::uint64_t id_counter = 0;
    data.candidates = evaluate_fields(std::move(fields), cfg, bc, id_counter);
    return data;
}

Population generate_initial(const RunConfig& cfg) {
    InitialData data = generate_initial_data(cfg);
    if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
    LoopState st = initial_state(cfg, std::move(data));
    return std::move(st.pop);
}

RunResult run(const RunConfig& cfg) {
    validate(cfg);
    InitialData data = generate_initial_data(cfg);
    return run_with_initial(cfg, std::move(data));
}

RunResult run_resume(const RunConfig& cfg, const std::string& checkpoint_path) {
    validate(cfg);
    Checkpoint ck = load_checkpoint(checkpoint_path, cfg);
    LoopState st;
    st.pop = std::move(ck.population);
    st.records = std::move(ck.records);
    st.ref = ck.ref;
    st.evaluations = ck.evaluations;
    st.id_counter = ck.id_counter;
    return run_loop(cfg, std::move(st), ck.generation + 1);
}

CompareResult compare_experiment(const RunConfig& cfg_base,
                                 const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw std::invalid_argument("compare_experiment: no seeds");
    const std::string base = cfg_base.out_dir;
    if (base.empty()) throw std::invalid_argument("compare_experiment: out_dir required");
    fs::create_directories(base);

    const char* modes[2] = {"conventional", "ph"};
    // per-mode, per-seed hypervolume series padded to a common length
    std::vector<std::vector<std::vector<double>>> series(2);
    std::vector<long> eval_axis;  // evaluations per iteration (mode-independent)
    std::ostringstream report;
    report << "mode,seed,iteration,evaluations,hypervolume\n";

    for (std::uint64_t seed : seeds) {
        RunConfig cfg_seed = cfg_base;
        cfg_seed.seed = seed;
        cfg_seed.out_dir.clear();
        InitialData shared = generate_initial_data(cfg_seed);

        for (int m = 0; m < 2; ++m) {
            RunConfig cfg = cfg_seed;
            cfg.selection = modes[m];
            cfg.out_dir = base + "/seed_" + std::to_string(seed) + "/" + modes[m];
            InitialData copy = shared;  // both modes start from the same data
            const RunResult res = run_with_initial(cfg, std::move(copy));
            std::vector<double> hv;
            std::vector<long> ev;
            for (const IterationRecord& r : res.records) {
                report << modes[m] << "," << seed << "," << r.iteration << "," << r.evaluations
                       << "," << g17(r.hypervolume) << "\n";
                hv.push_back(r.hypervolume);
                ev.push_back(r.evaluations);
            }
            series[m].push_back(std::move(hv));
            if (ev.size() > eval_axis.size()) eval_axis = std::move(ev);
        }
    }
    write_text_file(base + "/report.csv", report.str());

    // pad early-stopped runs with their final value, then average
    std::size_t len = 0;
    for (int m = 0; m < 2; ++m)
        for (const auto& s : series[m]) len = std::max(len, s.size());
    const std::vector<long>& evals = eval_axis;
    std::ostringstream curves;
    curves << "iteration,evaluations,mean_hv_conventional,mean_hv_ph\n";
    double mean_final[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < len; ++i) {
        double mean[2] = {0.0, 0.0};
        for (int m = 0; m < 2; ++m) {
            for (const auto& s : series[m]) mean[m] += (i < s.size() ? s[i] : s.back());
            mean[m] /= static_cast<double>(series[m].size());
        }
        curves << i << "," << evals[i] << "," << g17(mean[0]) << "," << g17(mean[1]) << "\n";
        if (i + 1 == len) {
            mean_final[0] = mean[0];
            mean_final[1] = mean[1];
        }
    }
    write_text_file(base + "/mean_curves.csv", curves.str());

    CompareResult out;
    out.mean_final_conventional = mean_final[0];
    out.mean_final_ph = mean_final[1];
    out.improvement_percent =
        100.0 * (out.mean_final_ph - out.mean_final_conventional) /
        std::max(out.mean_final_conventional, 1e-300);
    std::ostringstream summary;
    summary << "mean final hypervolume (conventional) = " << g17(out.mean_final_conventional)
            << "\n"
            << "mean final hypervolume (ph)           = " << g17(out.mean_final_ph) << "\n"
            << "improvement = " << g17(out.improvement_percent) << " %\n";
    write_text_file(base + "/summary.txt", summary.str());
    return out;
}

// ---- checkpointing ----------------------------------------------------

namespace {
template <typename T>
void put(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::ifstream& f) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!f) throw std::runtime_error("checkpoint: truncated file");
    return v;
}
}  // namespace

void save_checkpoint(const std::string& path, const RunConfig& cfg, int generation,
                     long evaluations, std::uint64_t id_counter,
                     const std::array<double, 2>& ref, const std::vector<IterationRecord>& records,
                     const Population& pop) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
    f << "ddtopo-ckpt 1\n" << config_hash(cfg) << "\n";
    put(f, generation);
    put(f, evaluations);
    put(f, id_counter);
    put(f, ref[0]);
    put(f, ref[1]);
    put(f, static_cast<int>(records.size()));
    for (const IterationRecord& r : records) {
        put(f, r.iteration);
        put(f, r.evaluations);
        put(f, r.hypervolume);
        put(f, r.front_size);
        put(f, static_cast<std::uint8_t>(r.mode == "exploration" ? 1 : 0));
        put(f, r.wall_ms);
    }
    put(f, static_cast<int>(pop.members.size()));
    put(f, pop.members.empty() ? 0 : static_cast<int>(pop.members[0].field.values.size()));
    for (const Candidate& c : pop.members) {
        put(f, c.id);
        put(f, static_cast<std::uint8_t>(c.feasible ? 1 : 0));
        put(f, c.rank);
        put(f, c.objectives[0]);
        put(f, c.objectives[1]);
        f.write(reinterpret_cast<const char*>(c.field.values.data()),
                static_cast<std::streamsize>(c.field.values.size() * sizeof(double)));
    }
    if (!f) throw std::runtime_error("save_checkpoint: write failed");
}

Checkpoint load_checkpoint(const std::string& path, const RunConfig& cfg) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::string magic;
    int version = 0;
    std::uint64_t hash = 0;
    f >> magic >> version >> hash;
    if (magic != "ddtopo-ckpt" || version != 1)
        throw std::runtime_error("load_checkpoint: not a checkpoint file");
    if (hash != config_hash(cfg))
        throw std::runtime_error("load_checkpoint: checkpoint was written with a different config");
    f.get();  // newline

    Checkpoint ck;
    ck.generation = get<int>(f);
    ck.evaluations = get<long>(f);
    ck.id_counter = get<std::uint64_t>(f);
    ck.ref[0] = get<double>(f);
    ck.ref[1] = get<double>(f);
    const int n_records = get<int>(f);
    for (int i = 0; i < n_records; ++i) {
        IterationRecord r;
        r.iteration = get<int>(f);
        r.evaluations = get<long>(f);
        r.hypervolume = get<double>(f);
        r.front_size = get<int>(f);
        r.mode = get<std::uint8_t>(f) ? "exploration" : "exploitation";
        r.wall_ms = get<double>(f);
        ck.records.push_back(std::move(r));
    }
    const int n_members = get<int>(f);
    const int n_values = get<int>(f);
    const MaskPtr mask = lbracket_mask(cfg.mesh_n, cfg.cut_num, cfg.cut_den);
    if (n_members > 0 && n_values != mask->active_count())
        throw std::runtime_error("load_checkpoint: field size does not match the mesh");
    for (int i = 0; i < n_members; ++i) {
        Candidate c;
        c.id = get<std::uint64_t>(f);
        c.feasible = get<std::uint8_t>(f) != 0;
        c.rank = get<int>(f);
        const double f1 = get<double>(f);
        const double f2 = get<double>(f);
        c.objectives = {f1, f2};
        std::vector<double> values(n_values);
        f.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(values.size() * sizeof(double)));
        if (!f) throw std::runtime_error("load_checkpoint: truncated field data");
        c.field = DensityField(mask, std::move(values));
        ck.population.members.push_back(std::move(c));
    }
    ck.population.generation = ck.generation;
    return ck;
}

}  // namespace ddtopo
