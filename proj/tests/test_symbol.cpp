#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dlab/symbol.hpp"

using namespace dlab;

namespace {

PotentialModel pulse_model() {
    std::map<std::string, std::vector<double>> params;
    params["amp"] = {0.3, -0.2, 0.5};
    params["k_hat"] = {1.0, 0.5, -0.3};
    params["width"] = {0.7};
    params["t0"] = {0.1};
    params["tau"] = {0.8};
    params["a0_amp"] = {0.4};
    return PotentialModel::from_config("time_pulse", params, 3);
}

}  // namespace

TEST_CASE("rest frame: zero fields, xi = 0") {
    const auto m = PotentialModel::zero();
    const SymbolEval e = eval_symbol(m, PhasePoint{});
    CHECK(max_abs(Mat4(e.P - dirac_matrix(DiracKind::Beta))) == 0.0);
    CHECK(e.lambda_plus == doctest::Approx(1.0));
    CHECK(e.lambda_minus == doctest::Approx(-1.0));
    const Mat4 pi_ref = 0.5 * (Mat4::Identity() + dirac_matrix(DiracKind::Beta));
    CHECK(max_abs(Mat4(e.Pi_plus - pi_ref)) < 1e-15);
}

TEST_CASE("free eigenvalues at xi = (3,0,0)") {
    const auto m = PotentialModel::zero();
    PhasePoint p;
    p.xi = Vec3(3.0, 0.0, 0.0);
    const SymbolEval e = eval_symbol(m, p);
    CHECK(e.lambda_plus == doctest::Approx(std::sqrt(10.0)));
    CHECK(e.lambda_minus == doctest::Approx(-std::sqrt(10.0)));
}

TEST_CASE("scalar shift: A0 = 2 shifts both eigenvalues") {
    std::map<std::string, std::vector<double>> params;
    params["e0"] = {1.0, 0.0, 0.0};
    const auto m = PotentialModel::from_config("uniform_E", params, 3);
    PhasePoint p;
    p.x = Vec3(2.0, 0.0, 0.0);  // A0 = e0 . x = 2
    p.xi = Vec3(3.0, 0.0, 0.0);
    const SymbolEval e = eval_symbol(m, p);
    CHECK(e.lambda_plus == doctest::Approx(std::sqrt(10.0) - 2.0));
    CHECK(e.lambda_minus == doctest::Approx(-std::sqrt(10.0) - 2.0));
}

TEST_CASE("derivative trivia") {
    const auto m = PotentialModel::zero();
    const SymbolDerivs d = symbol_derivatives(m, PhasePoint{});
    for (int k = 0; k < 3; ++k) {
        CHECK(max_abs(Mat4(d.dxi_Pi_plus[k] - 0.5 * alpha(k))) < 1e-15);
        CHECK(max_abs(Mat4(d.dxi_Pi_minus[k] + 0.5 * alpha(k))) < 1e-15);
    }
    // static field: dt Pi = 0
    const auto mb = PotentialModel::uniform_b(Vec3(0, 0, 1.0), 3);
    PhasePoint p;
    p.x = Vec3(0.3, -0.2, 0.1);
    p.xi = Vec3(0.5, 0.1, -0.7);
    CHECK(max_abs(symbol_derivatives(mb, p).dt_Pi_plus) == 0.0);
}

TEST_CASE("symbol derivatives match finite differences") {
    const auto m = pulse_model();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double h = 1e-4;
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        PhasePoint p;
        p.t = 0.5 * u(rng);
        for (int a = 0; a < 3; ++a) {
            p.x[a] = u(rng);
            p.xi[a] = u(rng);
        }
        const SymbolDerivs d = symbol_derivatives(m, p);
        for (int k = 0; k < 3; ++k) {
            PhasePoint pp = p, pm = p;
            pp.x[k] += h;
            pm.x[k] -= h;
            const SymbolEval ep = eval_symbol(m, pp), em = eval_symbol(m, pm);
            worst = std::max(worst, max_abs(Mat4((ep.Pi_plus - em.Pi_plus) / (2 * h) -
                                                 d.dx_Pi_plus[k])));
            worst = std::max(worst, std::abs((ep.lambda_minus - em.lambda_minus) / (2 * h) -
                                             d.dx_lambda_minus[k]));
            pp = p;
            pm = p;
            pp.xi[k] += h;
            pm.xi[k] -= h;
            const SymbolEval eq = eval_symbol(m, pp), er = eval_symbol(m, pm);
            worst = std::max(worst, max_abs(Mat4((eq.Pi_minus - er.Pi_minus) / (2 * h) -
                                                 d.dxi_Pi_minus[k])));
            worst = std::max(worst, std::abs((eq.lambda_plus - er.lambda_plus) / (2 * h) -
                                             d.dxi_lambda_plus[k]));
        }
        PhasePoint tp = p, tm = p;
        tp.t += h;
        tm.t -= h;
        worst = std::max(worst, max_abs(Mat4((eval_symbol(m, tp).P - eval_symbol(m, tm).P) /
                                                 (2 * h) -
                                             d.dt_P)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("poisson bracket of a scalar function with itself vanishes") {
    const auto m = pulse_model();
    PhasePoint p;
    p.t = 0.2;
    p.x = Vec3(0.3, -0.1, 0.4);
    p.xi = Vec3(0.6, 0.2, -0.3);
    const MatrixPhaseFunction lam = eigenvalue_function(m, 1);
    CHECK(max_abs(matrix_poisson_bracket(lam, lam, p)) < 1e-14);
}

TEST_CASE("berry term trivia and oracle") {
    // zero fields -> zero
    const auto z = PotentialModel::zero();
    CHECK(max_abs(berry_term(z, PhasePoint{}, 1)) == 0.0);

    // E = (e,0,0), B = 0, v = 0 -> -(e/2) beta alpha1
    std::map<std::string, std::vector<double>> params;
    params["e0"] = {0.7, 0.0, 0.0};
    const auto me = PotentialModel::from_config("uniform_E", params, 3);
    const Mat4 expected = -(0.7 / 2.0) * dirac_matrix(DiracKind::Beta) * alpha(0);
    CHECK(max_abs(Mat4(berry_term(me, PhasePoint{}, 1) - expected)) < 1e-14);
    CHECK(max_abs(Mat4(berry_term(me, PhasePoint{}, -1) - expected)) < 1e-14);

    // commutator-form oracle on a time-dependent preset
    const auto m = pulse_model();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        PhasePoint p;
        p.t = 0.5 * u(rng);
        for (int a = 0; a < 3; ++a) {
            p.x[a] = u(rng);
            p.xi[a] = u(rng);
        }
        for (int sp : {1, -1}) {
            const SymbolEval e = eval_symbol(m, p);
            const SymbolDerivs d = symbol_derivatives(m, p);
            const Mat4& Pi = sp == 1 ? e.Pi_plus : e.Pi_minus;
            const Mat4 dtPi = sp == 1 ? d.dt_Pi_plus : d.dt_Pi_minus;
            const Mat4 brk = matrix_poisson_bracket(eigenvalue_function(m, sp),
                                                    projection_function(m, sp), p);
            worst = std::max(worst, max_abs(Mat4(berry_term(m, p, sp) -
                                                 commutator(Pi, Mat4(brk - dtPi)))));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("poissonian curvature trivia and oracle") {
    const auto z = PotentialModel::zero();
    CHECK(max_abs(poissonian_curvature(z, PhasePoint{}, 1)) == 0.0);

    // B = (0,0,b), v = 0, species +1
    const double b = 0.9;
    const auto mb = PotentialModel::uniform_b(Vec3(0, 0, b), 3);
    PhasePoint origin;  // A(0) = 0 so v = xi = 0
    const Mat4 pi = 0.5 * (Mat4::Identity() + dirac_matrix(DiracKind::Beta));
    const Mat4 expected = Complex(0, b / 2.0) * pi * dirac_matrix(DiracKind::Gamma5) * alpha(2) *
                          pi;
    CHECK(max_abs(Mat4(poissonian_curvature(mb, origin, 1) - expected)) < 1e-14);

    const auto m = pulse_model();
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        PhasePoint p;
        p.t = 0.5 * u(rng);
        for (int a = 0; a < 3; ++a) {
            p.x[a] = u(rng);
            p.xi[a] = u(rng);
        }
        for (int sp : {1, -1}) {
            const SymbolEval e = eval_symbol(m, p);
            const Mat4& Pi = sp == 1 ? e.Pi_plus : e.Pi_minus;
            const MatrixPhaseFunction other = projection_function(m, -sp);
            const Mat4 oracle = static_cast<double>(sp) * e.gamma * Pi *
                                matrix_poisson_bracket(other, other, p) * Pi;
            worst = std::max(worst, max_abs(Mat4(poissonian_curvature(m, p, sp) - oracle)));
        }
    }
    CHECK(worst < 1e-10);
}
