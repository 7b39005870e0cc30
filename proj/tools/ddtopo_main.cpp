// ddtopo command line: the optimization loop plus small utilities around
// its file formats (persistence diagrams, Wasserstein distances,
// hypervolume, single-field evaluation).

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ddtopo/common.hpp"
#include "ddtopo/elasticity_fem.hpp"
#include "ddtopo/evolution.hpp"
#include "ddtopo/io_formats.hpp"
#include "ddtopo/pd_metric.hpp"
#include "ddtopo/persistence.hpp"
#include "ddtopo/pipeline.hpp"

namespace {

ddtopo::RunConfig load_config(const std::string& path, const std::string& out_dir,
                              std::uint64_t seed_override, bool has_seed) {
    ddtopo::RunConfig cfg = ddtopo::parse_run_config(path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (has_seed) cfg.seed = seed_override;
    ddtopo::validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data-driven topology design with persistence-based selection"};
    app.require_subcommand(1);

    std::string config_path, out_dir, resume_path;
    std::uint64_t seed_override = 0;

    auto* init = app.add_subcommand("init", "generate and select the initial population");
    init->add_option("-c,--config", config_path, "run config file")->required();
    init->add_option("-o,--out", out_dir, "output directory (overrides config)");

    auto* runc = app.add_subcommand("run", "run the full optimization loop");
    runc->add_option("-c,--config", config_path, "run config file")->required();
    runc->add_option("-o,--out", out_dir, "output directory (overrides config)");
    runc->add_option("--resume", resume_path, "checkpoint file to continue from");
    auto* runseed = runc->add_option("--seed", seed_override, "seed (overrides config)");

    std::string seeds_arg = "1,2,3";
    auto* cmp = app.add_subcommand("compare", "run both selection modes over several seeds");
    cmp->add_option("-c,--config", config_path, "run config file")->required();
    cmp->add_option("-o,--out", out_dir, "output directory (overrides config)");
    cmp->add_option("--seeds", seeds_arg, "comma-separated seed list (default 1,2,3)");

    std::string in_path, out_path = "-", second_path;
    double threshold = 0.5, wp = 2.0;
    auto* ph = app.add_subcommand("ph", "persistence diagram of a density graymap");
    ph->add_option("-i,--input", in_path, "density .pgm (with .meta sidecar)")->required();
    ph->add_option("-t,--threshold", threshold, "binarization threshold (default 0.5)");
    ph->add_option("-o,--out", out_path, "output CSV path, '-' for stdout");

    auto* wdist = app.add_subcommand("wdist", "Wasserstein distance between two diagram CSVs");
    wdist->add_option("a", in_path, "first diagram CSV")->required();
    wdist->add_option("b", second_path, "second diagram CSV")->required();
    wdist->add_option("-p", wp, "order (default 2)");

    std::string ref_arg;
    auto* hv = app.add_subcommand("hv", "2-objective hypervolume of a front CSV");
    hv->add_option("front", in_path, "CSV with F1,F2 columns")->required();
    hv->add_option("-r,--ref", ref_arg, "reference point 'f1,f2'")->required();

    auto* eval = app.add_subcommand("eval", "high-fidelity (F1,F2) of a density graymap");
    eval->add_option("-i,--input", in_path, "density .pgm (with .meta sidecar)")->required();
    eval->add_option("-t,--threshold", threshold, "binarization threshold (default 0.5)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (init->parsed()) {
            const ddtopo::RunConfig cfg = load_config(config_path, out_dir, 0, false);
            const ddtopo::Population pop = ddtopo::generate_initial(cfg);
            std::printf("initial population: %zu members (generation 0)\n", pop.members.size());
        } else if (runc->parsed()) {
            const ddtopo::RunConfig cfg =
                load_config(config_path, out_dir, seed_override, runseed->count() > 0);
            const ddtopo::RunResult res = resume_path.empty()
                                              ? ddtopo::run(cfg)
                                              : ddtopo::run_resume(cfg, resume_path);
            std::printf("finished after iteration %d%s, final hypervolume %s\n",
                        res.records.back().iteration, res.stopped_early ? " (converged early)" : "",
                        ddtopo::g17(res.records.back().hypervolume).c_str());
        } else if (cmp->parsed()) {
            ddtopo::RunConfig cfg = load_config(config_path, out_dir, 0, false);
            std::vector<std::uint64_t> seeds;
            for (std::size_t pos = 0; pos != std::string::npos;) {
                const std::size_t next = seeds_arg.find(',', pos);
                seeds.push_back(std::stoull(seeds_arg.substr(pos, next - pos)));
                pos = next == std::string::npos ? next : next + 1;
            }
            const ddtopo::CompareResult r = ddtopo::compare_experiment(cfg, seeds);
            std::printf("mean final hypervolume: conventional %s, ph %s (%+.2f%%)\n",
                        ddtopo::g17(r.mean_final_conventional).c_str(),
                        ddtopo::g17(r.mean_final_ph).c_str(), r.improvement_percent);
        } else if (ph->parsed()) {
            const ddtopo::DensityField field = ddtopo::read_density_pgm(in_path);
            const ddtopo::PersistenceDiagram d = ddtopo::diagram_of(field, threshold);
            if (out_path == "-") {
                std::printf("birth,death\n");
                for (const auto& [b, dd] : d.pairs)
                    std::printf("%s,%s\n", ddtopo::g17(b).c_str(), ddtopo::g17(dd).c_str());
            } else {
                ddtopo::write_diagram_csv(d, out_path);
            }
        } else if (wdist->parsed()) {
            const ddtopo::PersistenceDiagram a = ddtopo::read_diagram_csv(in_path);
            const ddtopo::PersistenceDiagram b = ddtopo::read_diagram_csv(second_path);
            std::printf("%s\n", ddtopo::g17(ddtopo::wasserstein(a, b, wp)).c_str());
        } else if (hv->parsed()) {
            const auto front = ddtopo::read_objectives_csv(in_path);
            const std::size_t comma = ref_arg.find(',');
            if (comma == std::string::npos) throw std::runtime_error("--ref expects 'f1,f2'");
            const std::array<double, 2> ref{std::stod(ref_arg.substr(0, comma)),
                                            std::stod(ref_arg.substr(comma + 1))};
            std::printf("%s\n", ddtopo::g17(ddtopo::hypervolume_2d(front, ref)).c_str());
        } else if (eval->parsed()) {
            const ddtopo::DensityField field = ddtopo::read_density_pgm(in_path);
            if (field.mask->kind != ddtopo::DomainMask::Kind::LBracket)
                throw std::runtime_error("eval: built-in boundary conditions need an lbracket mask");
            const ddtopo::BoundaryConditions bc = ddtopo::lbracket_bc(*field.mask);
            const ddtopo::HighFidelityResult r =
                ddtopo::evaluate_high_fidelity(field, bc, threshold);
            if (!r.feasible) {
                std::fprintf(stderr, "infeasible candidate (disconnected load path)\n");
                return 2;
            }
            std::printf("F1=%s F2=%s\n", ddtopo::g17(r.f1).c_str(), ddtopo::g17(r.f2).c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
