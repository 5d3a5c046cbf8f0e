#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "dlab/errors.hpp"
#include "dlab/wigner.hpp"

using namespace dlab;

namespace {

SpinorField plane_wave(const SpatialGrid& grid, double eps, const Vec3& xi, int species) {
    SpinorField psi(grid, eps);
    const CVec4 u = free_eigenspinor(xi, species);
    for (std::size_t node = 0; node < grid.size(); ++node) {
        const Complex phase = std::exp(Complex(0, xi.dot(grid.coord(node)) / eps));
        for (int c = 0; c < 4; ++c) psi.at(node)[c] = phase * u[c];
    }
    psi.normalize();
    return psi;
}

double field_l2_diff(const WignerField& a, const WignerField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += std::norm(a.values[i] - b.values[i]);
    return std::sqrt(s * a.grid.space.spacing() * a.grid.dxi());
}

}  // namespace

TEST_CASE("mass identity and hermiticity are exact") {
    const SpatialGrid g(1, 256, 3.2);
    const double eps = 0.2;
    MixedState st;
    st.epsilon = eps;
    st.members.resize(2);
    st.members[0].weight = 0.3;
    st.members[0].psi = make_coherent_state(g, eps, Vec3(-0.5, 0, 0), Vec3(0.5, 0, 0), 1);
    st.members[1].weight = 0.7;
    st.members[1].psi = make_coherent_state(g, eps, Vec3(0.4, 0, 0), Vec3(-0.3, 0, 0), -1);
    const WignerField W = wigner_transform(st);
    CHECK(std::abs(W.mass() - 1.0) < 1e-10);
    CHECK(W.max_hermiticity_defect() < 1e-12);
}

TEST_CASE("coherent state matches the gaussian phase-space oracle") {
    const SpatialGrid g(1, 256, 3.2);
    const double eps = 0.2;
    const Vec3 x0(0.0, 0, 0);
    const Vec3 xi0 = snap_momentum(g, eps, Vec3(0.5, 0, 0));
    const SpinorField psi = make_coherent_state(g, eps, x0, xi0, 1);
    const WignerField W = wigner_transform(psi);
    const CVec4 u = free_eigenspinor(xi0, 1);
    const Mat4 uu = u * u.adjoint();
    // analytic Wigner of the periodized packet: Gaussian images at x0 + kL plus
    // the cross-image interference ridge at x0 + (k+1/2)L carrying a (-1)^m sign
    // across the momentum columns
    const double peak = 1.0 / (M_PI * eps);
    double worst = 0.0;
    for (int ix = 0; ix < g.n; ++ix)
        for (int ixi = 0; ixi < g.n; ++ixi) {
            const double x = W.x_value(ix);
            const double xi = W.grid.xi_value(ixi);
            double space = 0.0;
            for (int k = -2; k <= 2; ++k) {
                const double dmain = x - x0[0] + k * g.L;
                const double dmid = dmain + 0.5 * g.L;
                space += std::exp(-dmain * dmain / eps);
                space += (ixi % 2 == 0 ? 1.0 : -1.0) * std::exp(-dmid * dmid / eps);
            }
            const double env =
                peak * space * std::exp(-(xi - xi0[0]) * (xi - xi0[0]) / eps);
            worst = std::max(worst, max_abs(Mat4(W.at(ix, ixi) - env * uu)));
        }
    CHECK(worst < 0.01 * peak);
}

TEST_CASE("plane wave concentrates on a single momentum column") {
    const SpatialGrid g(1, 64, 2.0);
    const double eps = 0.5;
    const double xi1 = 2.0 * (2.0 * M_PI * eps / g.L);
    const SpinorField psi = plane_wave(g, eps, Vec3(xi1, 0, 0), 1);
    const WignerField W = wigner_transform(psi);
    const int col = 4;  // xi1 / dxi = 4
    CHECK(W.grid.xi_value(col) == doctest::Approx(xi1));
    double on = 0.0, total = 0.0;
    for (int ix = 0; ix < g.n; ++ix)
        for (int ixi = 0; ixi < g.n; ++ixi) {
            const double m = std::abs(W.at(ix, ixi).trace());
            total += m;
            if (ixi == col) on += m;
        }
    CHECK(on / total > 0.999);
    // an exact eigenmode satisfies the constraint [P, W] = 0
    CHECK(constraint_norm(W, PotentialModel::zero()) < 1e-10);
}

TEST_CASE("moments agree with the position-space diagnostics") {
    const SpatialGrid g(1, 128, 3.2);
    const double eps = 0.2;
    const SpinorField psi = make_coherent_state(g, eps, Vec3(-0.5, 0, 0), Vec3(0.5, 0, 0), 1);
    DiracPropagator prop(g, eps, PotentialModel::zero());
    const Diagnostics d = diagnostics(psi, prop, 0.0);
    const WignerMoments m = moments(wigner_transform(psi));
    double worst = 0.0;
    for (int ix = 0; ix < g.n; ++ix) {
        worst = std::max(worst, std::abs(m.rho[ix] - d.rho[ix]));
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(m.J[ix][k] - d.J[ix][k]));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("species projection splits the mass cleanly") {
    const SpatialGrid g(1, 128, 3.2);
    const double eps = 0.2;
    const SpinorField psi = make_coherent_state(g, eps, Vec3(-0.5, 0, 0), Vec3(0.5, 0, 0), 1);
    const WignerField W = wigner_transform(psi);
    const SpeciesSplit s = project_species(W, PotentialModel::zero());
    const double mp = s.W_plus.mass();
    const double mm = s.W_minus.mass();
    CHECK(mp + mm == doctest::Approx(W.mass()).epsilon(1e-10));
    CHECK(mp > 0.95);
    CHECK(std::abs(mm) < 0.05);
    CHECK(s.offdiag_mass < 1e-10);
}

TEST_CASE("theta of a linear symbol is the spectral xi derivative") {
    const SpatialGrid g(1, 128, 3.2);
    const double eps = 0.25;
    const WignerField f =
        wigner_transform(make_coherent_state(g, eps, Vec3(-0.3, 0, 0), Vec3(0.4, 0, 0), 1));
    const double c = 0.7;
    const WignerField th = apply_pdo(PdoKind::Theta, [c](double x) { return c * x; }, f);
    WignerField ref = dxi_field(f);
    for (auto& v : ref.values) v *= c;
    CHECK(field_l2_diff(th, ref) < 1e-10);

    // delta of a linear symbol vanishes, tau of a constant is the constant
    const WignerField de = apply_pdo(PdoKind::Delta, [c](double x) { return c * x; }, f);
    CHECK(de.l2_norm() < 1e-13);
    const WignerField ze = apply_pdo(PdoKind::Theta, [](double) { return 1.3; }, f);
    CHECK(ze.l2_norm() < 1e-13);
    const WignerField ta = apply_pdo(PdoKind::Tau, [](double) { return 1.3; }, f);
    WignerField tref = f;
    for (auto& v : tref.values) v *= 1.3;
    CHECK(field_l2_diff(ta, tref) < 1e-12);
}

TEST_CASE("moyal remainder vanishes for linear potentials") {
    const SpatialGrid g(1, 128, 3.2);
    const double eps = 0.25;
    const WignerField W =
        wigner_transform(make_coherent_state(g, eps, Vec3(-0.3, 0, 0), Vec3(0.4, 0, 0), 1));
    std::map<std::string, std::vector<double>> pe;
    pe["e0"] = {0.8, 0, 0};
    const auto linear_a0 = PotentialModel::from_config("uniform_E", pe, 1);
    CHECK(remainder(W, linear_a0).l2_norm() < 1e-13);
    const auto linear_a = PotentialModel::uniform_b(Vec3(0, 0, 0.6), 1);
    CHECK(remainder(W, linear_a).l2_norm() < 1e-13);
    // a smooth bump produces a genuinely nonzero remainder
    const auto bump = PotentialModel::gaussian_bump_a0(0.5, 0.4, Vec3::Zero(), 1);
    CHECK(remainder(W, bump).l2_norm() > 1e-8);
}

TEST_CASE("free eigenmode is stationary: residual at roundoff") {
    const SpatialGrid g(1, 64, 2.0);
    const double eps = 0.5;
    const double xi1 = 2.0 * (2.0 * M_PI * eps / g.L);
    const SpinorField psi = plane_wave(g, eps, Vec3(xi1, 0, 0), 1);
    DiracPropagator prop(g, eps, PotentialModel::zero());
    const double dt = 1e-3;
    auto snaps = prop.evolve(psi, 0.0, 3 * dt, dt, {dt, 2 * dt, 3 * dt});
    const WignerField W0 = wigner_transform(snaps[0].second);
    const WignerField W1 = wigner_transform(snaps[1].second);
    const WignerField W2 = wigner_transform(snaps[2].second);
    CHECK(dirac_wigner_residual(W0, W1, W2, prop.model(), dt) < 1e-8);
}

TEST_CASE("residual shrinks under joint dt and grid refinement") {
    const double eps = 0.2;
    // periodized bump: pdo sampling then matches the torus propagator exactly,
    // leaving the dt^2 differencing error as the dominant term
    const auto bump = PotentialModel::gaussian_bump_a0(0.4, 0.5, Vec3::Zero(), 1, 3.2);
    auto residual_at = [&](int n, double dt) {
        const SpatialGrid g(1, n, 3.2);
        const SpinorField psi0 =
            make_coherent_state(g, eps, Vec3(-0.5, 0, 0), Vec3(0.5, 0, 0), 1);
        DiracPropagator prop(g, eps, bump);
        const double tm = 0.04;
        auto snaps = prop.evolve(psi0, 0.0, tm + dt, dt, {tm - dt, tm, tm + dt});
        WignerField Wm = wigner_transform(snaps[1].second);
        Wm.t = tm;
        return dirac_wigner_residual(wigner_transform(snaps[0].second), Wm,
                                     wigner_transform(snaps[2].second), bump, dt);
    };
    const double coarse = residual_at(128, 2e-3);
    const double fine = residual_at(256, 1e-3);
    CHECK(fine < coarse);
}

TEST_CASE("lagrange multiplier Y: free eigenmode gives zero, generic Y is hermitian") {
    const SpatialGrid g(1, 64, 2.0);
    const double eps = 0.5;
    const double xi1 = 2.0 * (2.0 * M_PI * eps / g.L);
    const WignerField Wp = wigner_transform(plane_wave(g, eps, Vec3(xi1, 0, 0), 1));
    const LagrangeY triv = lagrange_multiplier_Y(Wp, PotentialModel::zero());
    CHECK(triv.norm_Y < 1e-10);

    const SpatialGrid g2(1, 128, 3.2);
    const auto bump = PotentialModel::gaussian_bump_a0(0.4, 0.5, Vec3::Zero(), 1);
    const WignerField W =
        wigner_transform(make_coherent_state(g2, 0.2, Vec3(-0.5, 0, 0), Vec3(0.5, 0, 0), 1));
    const LagrangeY y = lagrange_multiplier_Y(W, bump);
    CHECK(y.norm_Y > 0.0);
    CHECK(y.herm_defect < 1e-10 * std::max(1.0, y.norm_Y));
    CHECK(y.norm_diag_plus < y.norm_Y);
}

TEST_CASE("d=2 slice of a plane wave concentrates on the right column") {
    const SpatialGrid g(2, 16, 2.0);
    const double eps = 0.5;
    const double unit = 2.0 * M_PI * eps / g.L;
    const Vec3 xi(2.0 * unit, 1.0 * unit, 0.0);
    const SpinorField psi = plane_wave(g, eps, xi, 1);
    SliceSpec spec;
    spec.x_index = {3, 0};
    spec.xi_fixed = {xi[1], 0.0};
    const WignerField W = wigner_slice(psi, spec);
    const int col = 4;  // xi[0] / dxi
    double on = 0.0, total = 0.0;
    for (int ix = 0; ix < g.n; ++ix)
        for (int ixi = 0; ixi < g.n; ++ixi) {
            const double m = std::abs(W.at(ix, ixi).trace());
            total += m;
            if (ixi == col) on += m;
        }
    CHECK(on / total > 0.999);
}

TEST_CASE("dwig roundtrip") {
    const SpatialGrid g(1, 32, 3.2, Vec3(0, 0.1, 0));
    const double eps = 0.25;
    WignerField W =
        wigner_transform(make_coherent_state(g, eps, Vec3(0.2, 0, 0), Vec3(-0.3, 0, 0), -1));
    W.t = 0.5;
    const std::string path = "roundtrip_test.dwig";
    write_dwig(path, W);
    const WignerField R = read_dwig(path);
    std::remove(path.c_str());
    CHECK(R.t == 0.5);
    CHECK(R.grid.space.n == 32);
    CHECK(R.grid.epsilon == 0.25);
    CHECK(R.grid.space.transverse_xi[1] == 0.1);
    CHECK(field_l2_diff(R, W) == 0.0);
    CHECK_THROWS_AS(read_dwig("no_such.dwig"), IoError);
}
