#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dlab/dirac_solver.hpp"
#include "dlab/emfield.hpp"

namespace dlab {

/// Fully materialized experiment description.  Defaults give the standard
/// d=1 benchmark used by the convergence tests.
struct ExperimentConfig {
    // [grid]
    int d = 1;
    int n = 512;
    double L = 3.2;
    Vec3 transverse_xi = Vec3::Zero();

    // [potential]  (benchmark: periodized A0 bump plus a uniform A(t) pulse)
    std::string preset = "gaussian_bump_A0";
    std::map<std::string, std::vector<double>> pot_params = {
        {"amp", {1.0}}, {"width", {1.0}},         {"a_amp", {0.02, 0.0, 0.0}},
        {"t0", {0.16}}, {"tau", {0.12}},
    };

    // [initial]
    int species = 1;
    Vec3 x0 = Vec3(-0.5, 0.0, 0.0);
    Vec3 xi0 = Vec3(0.8, 0.0, 0.0);
    Vec3 sigma_x = Vec3(0.22, 0.22, 0.22);
    Vec3 sigma_xi = Vec3(0.22, 0.22, 0.22);
    int members = 48;
    double schatten_c = 1.0;

    // [evolution]
    std::vector<double> epsilons = {0.4, 0.2, 0.1, 0.05};
    double dt = 1e-3;
    double t_final = 0.32;
    std::vector<double> snapshot_times;

    // [study]
    int vlasov_particles = 100000;
    std::uint64_t seed = 1;
    double test_width = 0.5;

    // [output]
    std::string output_dir = "out";
    std::string prefix = "run";

    // runtime (CLI flags, not persisted)
    int workers = 1;
    bool verbose = false;

    SpatialGrid grid() const;
    PotentialModel model() const;
    PhaseDensity f_in() const;
    SamplingBox sampling_box() const;

    /// Throws ConfigError on any violated invariant, naming the key.
    void validate() const;
};

ExperimentConfig parse_config(const std::string& path);

/// Deterministic one-line-per-key echo of the config, used for logs and CSV
/// metadata so outputs are reproducible byte for byte.
std::vector<std::string> describe_config(const ExperimentConfig& cfg);

}  // namespace dlab
