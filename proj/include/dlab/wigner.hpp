#pragma once

#include <array>
#include <string>
#include <vector>

#include "dlab/clifford.hpp"
#include "dlab/dirac_solver.hpp"
#include "dlab/emfield.hpp"

namespace dlab {

/// Phase-space companion of a SpatialGrid.  Momentum nodes xi_m = m~ * dxi
/// with dxi = pi*eps/L are exact discrete Fourier duals of the relative
/// coordinate lattice y_j = 2*dx*j/eps, so both Wigner arguments x +- eps*y/2
/// land on grid nodes.  Momentum indices are stored in FFT (wrap-around)
/// order; xi_value maps an index to its signed physical value.
struct PhaseSpaceGrid {
    SpatialGrid space;
    double epsilon = 1.0;

    PhaseSpaceGrid() = default;
    PhaseSpaceGrid(const SpatialGrid& g, double eps) : space(g), epsilon(eps) {}

    double dxi() const { return M_PI * epsilon / space.L; }
    double dy() const { return 2.0 * space.spacing() / epsilon; }
    double xi_value(int m) const { return dxi() * space.freq(m); }
    double y_value(int j) const { return dy() * space.freq(j); }
    double band() const { return M_PI * epsilon / (2.0 * space.spacing()); }
};

/// Matrix-valued Wigner field on the d=1 phase-space lattice (or a declared
/// 1d slice of a higher-dimensional state).  Layout: ((ix * n + ixi) * 16 +
/// 4*row + col), x in natural order, xi in FFT order.
struct WignerField {
    PhaseSpaceGrid grid;
    double t = 0.0;
    std::vector<Complex> values;

    WignerField() = default;
    explicit WignerField(const PhaseSpaceGrid& g, double time = 0.0);

    int n() const { return grid.space.n; }
    std::size_t node(int ix, int ixi) const {
        return (static_cast<std::size_t>(ix) * n() + ixi) * 16;
    }
    Mat4 at(int ix, int ixi) const;
    void set(int ix, int ixi, const Mat4& m);
    double x_value(int ix) const { return -0.5 * grid.space.L + grid.space.spacing() * ix; }

    /// dx * dxi * sum of Re tr W, the discrete total mass.
    double mass() const;
    double l2_norm() const;           // sqrt(dx dxi sum ||W||_F^2)
    double max_hermiticity_defect() const;
};

/// Inactive coordinates of a slice through a d>=2 state: grid indices for the
/// fixed spatial axes and lattice momenta for the fixed xi axes.
struct SliceSpec {
    std::array<int, 2> x_index = {0, 0};     // axes 1.. of the state grid
    std::array<double, 2> xi_fixed = {0.0, 0.0};
};

WignerField wigner_transform(const SpinorField& psi);
WignerField wigner_transform(const MixedState& state, double t = 0.0);

/// 1d slice through a d in {2,3} state along axis 0; direct summation over
/// the inactive relative coordinates (slow but exact).
WignerField wigner_slice(const SpinorField& psi, const SliceSpec& slice);

struct WignerMoments {
    std::vector<double> rho;                  // per x node
    std::vector<std::array<double, 3>> J;
    std::vector<double> w_trace_mass;         // dxi-summed tr W per x node (same as rho)
};

WignerMoments moments(const WignerField& W);

struct SpeciesSplit {
    WignerField W_plus;
    WignerField W_minus;
    std::vector<double> f_plus;   // tr W_plus per (ix, ixi), ix-major
    std::vector<double> f_minus;
    double offdiag_mass = 0.0;    // |dx dxi sum tr(Pi+ W Pi- + Pi- W Pi+)| cross check
};

SpeciesSplit project_species(const WignerField& W, const PotentialModel& model);

/// ||[P, W]||_L2 / ||W||_L2 over the phase-space lattice.
double constraint_norm(const WignerField& W, const PotentialModel& model);

enum class PdoKind { Theta, Tau, Delta };

/// Apply theta/tau/delta of the scalar field g (a function of the active
/// coordinate, evaluated unwrapped at x +- eps*y/2) in the y-representation.
/// g is passed as samples on the doubled lattice via a callable.
WignerField apply_pdo(PdoKind kind, const std::function<double(double)>& g, const WignerField& f);

/// Spectral phase-space derivatives of a WignerField (d=1).
WignerField dxi_field(const WignerField& W);
WignerField dx_field(const WignerField& W);

/// Gaussian smoothing of width sigma in the momentum variable (multiplier
/// exp(-sigma^2 y^2 / 2) in the y-representation).  Used to measure fields
/// that converge only distributionally, where xi-oscillatory content must be
/// tested against smooth observables rather than in a pointwise norm.
WignerField mollify_xi(const WignerField& W, double sigma);

/// Moyal remainder r_eps of the Dirac-Wigner equation, grouped so that it
/// vanishes identically for constant and linear potentials:
///   r = -eps*Delta[A_k][alpha_k, W]
///       + 1/2 (dA_k/dx * dxi - theta[A_k]) {alpha_k, W}_+
///       + (dA0/dx * dxi - theta[A0]) W.
WignerField remainder(const WignerField& W, const PotentialModel& model);

/// Pointwise transport operator (1/(i eps))[P,W] + 1/2({P,W}-{W,P}) + r_eps.
WignerField wigner_rhs(const WignerField& W, const PotentialModel& model, bool with_remainder);

/// L2 norm of dW/dt (central difference of the outer snapshots) minus the
/// transport operator at the middle snapshot.
double dirac_wigner_residual(const WignerField& W_prev, const WignerField& W_mid,
                             const WignerField& W_next, const PotentialModel& model,
                             double dt, bool with_remainder = true);

struct LagrangeY {
    WignerField Y;
    double norm_Y = 0.0;
    double norm_diag_plus = 0.0;   // ||Pi+ Y Pi+||
    double norm_diag_minus = 0.0;  // ||Pi- Y Pi-||
    double herm_defect = 0.0;      // ||Y - Y*||
};

LagrangeY lagrange_multiplier_Y(const WignerField& W, const PotentialModel& model);

void write_dwig(const std::string& path, const WignerField& W);
WignerField read_dwig(const std::string& path);

}  // namespace dlab
