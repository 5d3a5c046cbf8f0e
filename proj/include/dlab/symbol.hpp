#pragma once

#include <array>
#include <functional>

#include "dlab/clifford.hpp"
#include "dlab/emfield.hpp"

namespace dlab {

struct PhasePoint {
    double t = 0.0;
    Vec3 x = Vec3::Zero();
    Vec3 xi = Vec3::Zero();
};

/// Pointwise symbol data: P = alpha.(xi - A) + beta - A0, its free part P0,
/// eigenvalues lambda_pm = +-<v> - A0 and spectral projections Pi_pm.
struct SymbolEval {
    Vec3 v = Vec3::Zero();
    double gamma = 1.0;  // <v> = sqrt(1 + |v|^2)
    Mat4 P = Mat4::Zero();
    Mat4 P0 = Mat4::Zero();
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    Mat4 S = Mat4::Zero();
    Mat4 Pi_plus = Mat4::Zero();
    Mat4 Pi_minus = Mat4::Zero();
};

SymbolEval eval_symbol(const PotentialModel& model, const PhasePoint& p);

/// Closed-form first derivatives of the symbol data (Appendix-style analytic
/// expressions, no numerical differentiation).
struct SymbolDerivs {
    std::array<double, 3> dx_lambda_plus{};
    std::array<double, 3> dx_lambda_minus{};
    std::array<double, 3> dxi_lambda_plus{};
    std::array<double, 3> dxi_lambda_minus{};
    std::array<Mat4, 3> dx_Pi_plus{};
    std::array<Mat4, 3> dx_Pi_minus{};
    std::array<Mat4, 3> dxi_Pi_plus{};
    std::array<Mat4, 3> dxi_Pi_minus{};
    Mat4 dt_Pi_plus = Mat4::Zero();
    Mat4 dt_Pi_minus = Mat4::Zero();
    Mat4 dt_P = Mat4::Zero();
    std::array<Mat4, 3> dx_P0{};
    std::array<Mat4, 3> dxi_P0{};
};

SymbolDerivs symbol_derivatives(const PotentialModel& model, const PhasePoint& p);

/// A matrix-valued phase-space function with derivative evaluators, so the
/// generic Poisson bracket works for analytic symbols and for grid fields
/// alike.
struct MatrixPhaseFunction {
    std::function<Mat4(const PhasePoint&)> value;
    std::function<Mat4(const PhasePoint&, int)> dx;   // k-th x derivative
    std::function<Mat4(const PhasePoint&, int)> dxi;  // k-th xi derivative
};

/// {F,G} = sum_k dx_k F dxi_k G - dxi_k F dx_k G, order sensitive.
Mat4 matrix_poisson_bracket(const MatrixPhaseFunction& F, const MatrixPhaseFunction& G,
                            const PhasePoint& p, int dims = 3);

/// H_be = -1/(2<v>^2) (beta alpha.F - i gamma5 alpha.(v x F)) with the
/// species-signed Lorentz force F.
Mat4 berry_term(const PotentialModel& model, const PhasePoint& p, int species);

/// H_pc = species/(2<v>) Pi_s (i gamma5 alpha.B) Pi_s.
Mat4 poissonian_curvature(const PotentialModel& model, const PhasePoint& p, int species);

/// MatrixPhaseFunction wrappers around the analytic symbol pieces; used by the
/// bracket-form oracles and the harness identity suite.
MatrixPhaseFunction projection_function(const PotentialModel& model, int species);
MatrixPhaseFunction eigenvalue_function(const PotentialModel& model, int species);

}  // namespace dlab
