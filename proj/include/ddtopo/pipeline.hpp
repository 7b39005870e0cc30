#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ddtopo/elasticity_fem.hpp"
#include "ddtopo/evolution.hpp"
#include "ddtopo/generative_crossover.hpp"
#include "ddtopo/lowfid_optimizer.hpp"

namespace ddtopo {

// Every tunable of the loop. Defaults follow the benchmark settings
// (t_max 200, n_ini 100, n_pop 50, n_vae = n_pop, n_mut 16, t_mut 5,
// g_mut_max 0.01, p = 2, threshold 0.5).
struct RunConfig {
    // problem
    int mesh_n = 100;
    int cut_num = 3, cut_den = 5;
    std::string bc = "lbracket";  // "lbracket" | "custom"
    std::vector<int> fixed_dofs;  // custom bc only
    std::vector<std::pair<int, double>> loads;

    // loop
    std::string selection = "ph";  // "ph" | "conventional"
    int t_max = 200;
    int n_ini = 100;
    int n_pop = 50;
    int n_vae = -1;  // -1 = n_pop
    int n_mut = 16;
    int t_mut = 5;
    double g_mut_max = 0.01;
    double wasserstein_p = 2.0;
    double binarize_threshold = 0.5;

    // hypervolume + convergence
    bool hv_ref_auto = true;
    std::array<double, 2> hv_ref{0.0, 0.0};
    int conv_window = 20;
    double conv_tol = 1e-4;

    LowFidConfig lowfid;
    TrainConfig vae;
    int vae_hidden = 512, vae_latent = 8;
    SpxConfig spx;

    double compliance_cap = 1e8;
    bool dedup = false;        // drop exact-duplicate fields before selection
    bool dump_stress = false;  // final-front stress graymaps
    std::uint64_t seed = 1;
    std::string out_dir;
    int threads = 0;  // 0 = hardware default

    int effective_n_vae() const { return n_vae < 0 ? n_pop : n_vae; }
};

RunConfig parse_run_config(const std::string& path);
RunConfig run_config_from_kv(const std::map<std::string, std::string>& kv);
void validate(const RunConfig& cfg);
std::string canonical_config(const RunConfig& cfg);

struct IterationRecord {
    int iteration = 0;       // 0 = initial population
    long evaluations = 0;    // n_ini + t*(n_pop+n_vae) + mutants so far
    double hypervolume = 0.0;
    int front_size = 0;      // feasible rank-1 members of the population
    std::string mode;        // "exploration" | "exploitation"
    double wall_ms = 0.0;
};

struct InitialData {
    std::vector<Candidate> candidates;  // ids 0..n_ini-1, objectives evaluated
    std::vector<SeedingParams> params;
    std::vector<double> compliance;  // low-fidelity objective per candidate
    std::vector<std::uint8_t> converged;
};

// n_ini low-fidelity solves over the seeding grid, each evaluated by the
// high-fidelity analysis. Pure function of the config (no files touched).
InitialData generate_initial_data(const RunConfig& cfg);

// Initial data + selection down to n_pop with the configured operator;
// writes the manifest and initial graymaps when cfg.out_dir is set.
Population generate_initial(const RunConfig& cfg);

struct RunResult {
    Population population;
    std::vector<IterationRecord> records;
    std::array<double, 2> hv_ref{0.0, 0.0};
    bool stopped_early = false;
};

// The full loop: crossover, periodic mutation, evaluation, selection,
// hypervolume tracking, per-iteration checkpointing, early stop on a
// converged hypervolume. Artifacts land under cfg.out_dir:
// config.txt, initial/manifest.csv, hypervolume.csv, iterations.csv,
// pareto.csv, checkpoints/, vae_final.bin + vae_loss.csv.
RunResult run(const RunConfig& cfg);
RunResult run_resume(const RunConfig& cfg, const std::string& checkpoint_path);

// Both selection modes per seed from a shared initial dataset; per-run
// artifacts under <out_dir>/seed_<s>/<mode>/ plus report.csv,
// mean_curves.csv and summary.txt.
struct CompareResult {
    double mean_final_conventional = 0.0;
    double mean_final_ph = 0.0;
    double improvement_percent = 0.0;
};
CompareResult compare_experiment(const RunConfig& cfg_base, const std::vector<std::uint64_t>& seeds);

// checkpoint round-trip (exposed for tests)
void save_checkpoint(const std::string& path, const RunConfig& cfg, int generation,
                     long evaluations, std::uint64_t id_counter,
                     const std::array<double, 2>& ref, const std::vector<IterationRecord>& records,
                     const Population& pop);
struct Checkpoint {
    int generation = 0;
    long evaluations = 0;
    std::uint64_t id_counter = 0;
    std::array<double, 2> ref{0.0, 0.0};
    std::vector<IterationRecord> records;
    Population population;
};
Checkpoint load_checkpoint(const std::string& path, const RunConfig& cfg);

}  // namespace ddtopo
