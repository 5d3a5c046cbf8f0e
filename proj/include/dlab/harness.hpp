#pragma once

#include <string>
#include <vector>

#include "dlab/config.hpp"

namespace dlab {

struct IdentityResult {
    std::string name;
    double max_err = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Runs every registered algebra/symbol identity over random samples and
/// reports the per-identity max error.  perturb_alpha1 injects a deliberate
/// defect into the local alpha1 copy so the suite's failure path is testable.
std::vector<IdentityResult> run_identity_suite(bool perturb_alpha1 = false);

struct ConvergenceRow {
    double epsilon = 0.0;
    std::vector<double> observable_err;  // one per test function
    double constraint = 0.0;
    double remainder_norm = 0.0;
    double y_ratio_plus = 0.0;   // ||Pi+ Y Pi+|| / ||Y||
    double y_ratio_minus = 0.0;
    double mass_defect = 0.0;
    double seconds = 0.0;        // logged, never written to CSV (determinism)
};

struct LimitStudyResult {
    std::vector<std::string> test_names;
    std::vector<ConvergenceRow> rows;  // sorted descending in epsilon
    std::string csv_path;
};

LimitStudyResult run_limit_study(const ExperimentConfig& cfg);

/// Mixed-state Dirac run: DSPN snapshot files plus a diagnostics CSV.
std::vector<std::string> run_dirac(const ExperimentConfig& cfg);

/// Particle run: final-state trajectory CSV plus deposited-histogram CSV.
std::vector<std::string> run_vlasov(const ExperimentConfig& cfg);

/// Wigner transform of a stored DSPN snapshot: DWIG file plus moments and
/// species-density CSVs.
std::vector<std::string> run_wigner_snapshot(const ExperimentConfig& cfg,
                                             const std::string& dspn_path);

/// Atomic CSV writer shared by all run modes: '#' metadata lines, one header
/// row, then data rows.  Numbers are formatted with %.12g for byte-stable
/// output.
void write_csv(const std::string& path, const std::vector<std::string>& metadata,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace dlab
