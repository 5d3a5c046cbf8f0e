#include "dlab/symbol.hpp"

#include <cmath>
#include <stdexcept>

namespace dlab {

namespace {
const Complex I(0.0, 1.0);

int species_index(int species) {
    if (species != 1 && species != -1) throw std::invalid_argument("species must be +-1");
    return species;
}
}  // namespace

SymbolEval eval_symbol(const PotentialModel& model, const PhasePoint& p) {
    const PotentialDerivs pd = model.eval(p.t, p.x);
    SymbolEval e;
    e.v = p.xi - pd.A;
    e.gamma = std::sqrt(1.0 + e.v.squaredNorm());
    e.P0 = alpha_dot(e.v) + dirac_matrix(DiracKind::Beta);
    e.P = e.P0 - pd.A0 * Mat4::Identity();
    e.lambda_plus = e.gamma - pd.A0;
    e.lambda_minus = -e.gamma - pd.A0;
    e.S = e.P0 / e.gamma;
    e.Pi_plus = 0.5 * (Mat4::Identity() + e.S);
    e.Pi_minus = 0.5 * (Mat4::Identity() - e.S);
    return e;
}

SymbolDerivs symbol_derivatives(const PotentialModel& model, const PhasePoint& p) {
    const PotentialDerivs pd = model.eval(p.t, p.x);
    const SymbolEval e = eval_symbol(model, p);
    const double g = e.gamma, g3 = g * g * g;
    SymbolDerivs d;

    for (int k = 0; k < 3; ++k) {
        const Vec3 dA = pd.grad_A.row(k);  // d A / d x_k
        const double dAv = dA.dot(e.v);
        d.dx_P0[k] = -alpha_dot(dA);
        d.dxi_P0[k] = alpha(k);
        d.dx_lambda_plus[k] = -dAv / g - pd.grad_A0[k];
        d.dx_lambda_minus[k] = dAv / g - pd.grad_A0[k];
        d.dxi_lambda_plus[k] = e.v[k] / g;
        d.dxi_lambda_minus[k] = -e.v[k] / g;
        const Mat4 dxS = -alpha_dot(dA) / g + e.P0 * (dAv / g3);
        const Mat4 dxiS = alpha(k) / g - e.P0 * (e.v[k] / g3);
        d.dx_Pi_plus[k] = 0.5 * dxS;
        d.dx_Pi_minus[k] = -0.5 * dxS;
        d.dxi_Pi_plus[k] = 0.5 * dxiS;
        d.dxi_Pi_minus[k] = -0.5 * dxiS;
    }

    const double dtAv = pd.dt_A.dot(e.v);
    const Mat4 dtS = -alpha_dot(pd.dt_A) / g + e.P0 * (dtAv / g3);
    d.dt_Pi_plus = 0.5 * dtS;
    d.dt_Pi_minus = -0.5 * dtS;
    d.dt_P = -alpha_dot(pd.dt_A) - pd.dt_A0 * Mat4::Identity();
    return d;
}

Mat4 matrix_poisson_bracket(const MatrixPhaseFunction& F, const MatrixPhaseFunction& G,
                            const PhasePoint& p, int dims) {
    Mat4 out = Mat4::Zero();
    for (int k = 0; k < dims; ++k)
        out += F.dx(p, k) * G.dxi(p, k) - F.dxi(p, k) * G.dx(p, k);
    return out;
}

Mat4 berry_term(const PotentialModel& model, const PhasePoint& p, int species) {
    const int s = species_index(species);
    const SymbolEval e = eval_symbol(model, p);
    const FieldSample f = model.fields(p.t, p.x);
    const Vec3 F = lorentz_force(f, e.v, s);
    const double g2 = e.gamma * e.gamma;
    // [Pi_s, X] = -(1/4g2)[P0, alpha.F] = -(1/2g2)(beta alpha.F + i g5 alpha.(v x F))
    return (-0.5 / g2) * (dirac_matrix(DiracKind::Beta) * alpha_dot(F) +
                          I * dirac_matrix(DiracKind::Gamma5) * alpha_dot(e.v.cross(F)));
}

Mat4 poissonian_curvature(const PotentialModel& model, const PhasePoint& p, int species) {
    const int s = species_index(species);
    const SymbolEval e = eval_symbol(model, p);
    const FieldSample f = model.fields(p.t, p.x);
    const Mat4& Pi = (s == 1) ? e.Pi_plus : e.Pi_minus;
    const Mat4 core = I * dirac_matrix(DiracKind::Gamma5) * alpha_dot(f.B);
    return (static_cast<double>(s) / (2.0 * e.gamma)) * Pi * core * Pi;
}

MatrixPhaseFunction projection_function(const PotentialModel& model, int species) {
    const int s = species_index(species);
    MatrixPhaseFunction f;
    f.value = [model, s](const PhasePoint& q) {
        const SymbolEval e = eval_symbol(model, q);
        return s == 1 ? e.Pi_plus : e.Pi_minus;
    };
    f.dx = [model, s](const PhasePoint& q, int k) {
        const SymbolDerivs d = symbol_derivatives(model, q);
        return s == 1 ? d.dx_Pi_plus[k] : d.dx_Pi_minus[k];
    };
    f.dxi = [model, s](const PhasePoint& q, int k) {
        const SymbolDerivs d = symbol_derivatives(model, q);
        return s == 1 ? d.dxi_Pi_plus[k] : d.dxi_Pi_minus[k];
    };
    return f;
}

MatrixPhaseFunction eigenvalue_function(const PotentialModel& model, int species) {
    const int s = species_index(species);
    MatrixPhaseFunction f;
    f.value = [model, s](const PhasePoint& q) {
        const SymbolEval e = eval_symbol(model, q);
        return Mat4((s == 1 ? e.lambda_plus : e.lambda_minus) * Mat4::Identity());
    };
    f.dx = [model, s](const PhasePoint& q, int k) {
        const SymbolDerivs d = symbol_derivatives(model, q);
        return Mat4((s == 1 ? d.dx_lambda_plus[k] : d.dx_lambda_minus[k]) * Mat4::Identity());
    };
    f.dxi = [model, s](const PhasePoint& q, int k) {
        const SymbolDerivs d = symbol_derivatives(model, q);
        return Mat4((s == 1 ? d.dxi_lambda_plus[k] : d.dxi_lambda_minus[k]) * Mat4::Identity());
    };
    return f;
}

}  // namespace dlab
