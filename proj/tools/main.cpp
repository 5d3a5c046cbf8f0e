#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "dlab/config.hpp"
#include "dlab/harness.hpp"

namespace {

struct CommonFlags {
    std::string output_dir;
    int workers = 0;
    long long seed = -1;
    bool verbose = false;
};

void apply_flags(dlab::ExperimentConfig& cfg, const CommonFlags& f) {
    if (!f.output_dir.empty()) cfg.output_dir = f.output_dir;
    if (f.workers > 0) cfg.workers = f.workers;
    if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
    cfg.verbose = f.verbose;
}

void echo_config(const dlab::ExperimentConfig& cfg) {
    if (!cfg.verbose) return;
    for (const std::string& line : dlab::describe_config(cfg))
        std::printf("[config] %s\n", line.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirac / Wigner / Vlasov semiclassical laboratory"};
    app.require_subcommand(1);

    CommonFlags flags;
    app.add_option("--output-dir", flags.output_dir, "override output directory");
    app.add_option("--workers", flags.workers, "worker thread count");
    app.add_option("--seed", flags.seed, "override rng seed");
    app.add_flag("--verbose", flags.verbose, "chatty progress output");

    auto* identities = app.add_subcommand("identities", "run the algebra identity suite");
    std::string cfg_path, dspn_path;
    auto* dirac = app.add_subcommand("dirac-run", "evolve a mixed Dirac state");
    dirac->add_option("config", cfg_path, "config file")->required();
    auto* vlasov = app.add_subcommand("vlasov-run", "evolve a classical particle ensemble");
    vlasov->add_option("config", cfg_path, "config file")->required();
    auto* wigner = app.add_subcommand("wigner-snapshot", "Wigner transform of a DSPN snapshot");
    wigner->add_option("config", cfg_path, "config file")->required();
    wigner->add_option("dspn", dspn_path, "DSPN snapshot file")->required();
    auto* study = app.add_subcommand("limit-study", "semiclassical convergence study");
    study->add_option("config", cfg_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (identities->parsed()) {
            const auto report = dlab::run_identity_suite();
            int failures = 0;
            for (const auto& r : report) {
                std::printf("%-70s max_err=%.3e tol=%.0e %s\n", r.name.c_str(), r.max_err, r.tol,
                            r.pass ? "PASS" : "FAIL");
                if (!r.pass) ++failures;
            }
            std::printf("%zu identities, %d failures\n", report.size(), failures);
            return failures == 0 ? 0 : 1;
        }

        dlab::ExperimentConfig cfg = dlab::parse_config(cfg_path);
        apply_flags(cfg, flags);
        echo_config(cfg);

        std::vector<std::string> files;
        if (dirac->parsed()) files = dlab::run_dirac(cfg);
        if (vlasov->parsed()) files = dlab::run_vlasov(cfg);
        if (wigner->parsed()) files = dlab::run_wigner_snapshot(cfg, dspn_path);
        if (study->parsed()) {
            const auto result = dlab::run_limit_study(cfg);
            files.push_back(result.csv_path);
            std::printf("epsilon  constraint  remainder  y_ratio+  mass_defect\n");
            for (const auto& row : result.rows)
                std::printf("%7.3f  %.4e  %.4e  %.3e  %.3e  (%.1fs)\n", row.epsilon,
                            row.constraint, row.remainder_norm, row.y_ratio_plus, row.mass_defect,
                            row.seconds);
        }
        for (const std::string& f : files) std::printf("wrote %s\n", f.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
