#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dlab/clifford.hpp"
#include "dlab/emfield.hpp"
#include "dlab/fft.hpp"

namespace dlab {

/// Periodic box [-L/2, L/2)^d, n nodes per axis, n a power of two.  Inactive
/// momentum components (axes >= d) are frozen at transverse_xi.
struct SpatialGrid {
    int d = 1;
    int n = 64;
    double L = 1.0;
    Vec3 transverse_xi = Vec3::Zero();

    SpatialGrid() = default;
    SpatialGrid(int d_, int n_, double L_, const Vec3& txi = Vec3::Zero());

    double spacing() const { return L / n; }
    std::size_t size() const;           // n^d nodes
    Vec3 coord(std::size_t node) const; // node -> x (inactive axes 0)
    /// Signed integer frequency for index m in [0,n): m or m-n.
    int freq(int m) const { return m < n / 2 ? m : m - n; }
    bool compatible(const SpatialGrid& o) const;
};

struct SpinorField {
    SpatialGrid grid;
    double epsilon = 1.0;
    std::vector<Complex> values;  // 4 components per node, component-fastest

    SpinorField() = default;
    SpinorField(const SpatialGrid& g, double eps);

    Complex* at(std::size_t node) { return values.data() + 4 * node; }
    const Complex* at(std::size_t node) const { return values.data() + 4 * node; }
    CVec4 spinor(std::size_t node) const { return Eigen::Map<const CVec4>(at(node)); }

    double norm() const;  // discrete L2 norm, sqrt(dx^d sum |psi|^2)
    void normalize();
};

struct MixedMember {
    double weight = 0.0;
    SpinorField psi;
};

struct MixedState {
    double epsilon = 1.0;
    std::vector<MixedMember> members;

    double total_weight() const;
    double schatten2_sq() const;  // sum of squared weights
};

/// Normalized lambda_species eigenvector of alpha.p + beta; never degenerate
/// for the built-in reference spinors.
CVec4 free_eigenspinor(const Vec3& p, int species);

/// Snap a momentum to the grid-representable lattice 2 pi eps / L.
Vec3 snap_momentum(const SpatialGrid& grid, double epsilon, const Vec3& xi);

/// Gaussian coherent state centered at (x0, xi0), spinor polarized on the
/// requested species branch.  xi0 is snapped to the momentum lattice.
/// Throws ConfigError if xi0 leaves the resolvable band, DegenerateSpinorError
/// if the species projection annihilates the reference spinor.
SpinorField make_coherent_state(const SpatialGrid& grid, double epsilon, const Vec3& x0,
                                const Vec3& xi0, int species);

/// Project psi onto the free-symbol eigenspace of the given species (Fourier
/// multiplier Pi_s(eps k)) and renormalize.  Preparation step for
/// well-prepared single-band ensembles.
void band_project(SpinorField& psi, int species);

using PhaseDensity = std::function<double(const Vec3& x, const Vec3& xi)>;

struct SamplingBox {
    Vec3 x_lo = Vec3::Zero();
    Vec3 x_hi = Vec3::Zero();
    Vec3 xi_lo = Vec3::Zero();
    Vec3 xi_hi = Vec3::Zero();
};

struct PhaseNode {
    Vec3 x = Vec3::Zero();
    Vec3 xi = Vec3::Zero();
    double weight = 0.0;
};

struct SampledEnsemble {
    MixedState state;
    std::vector<PhaseNode> nodes;  // same order and weights as state.members
};

/// Quasi-random (Halton) coherent-state ensemble with weights proportional to
/// f_in at the nodes.  Enforces sum lambda^2 <= schatten_c (2 pi eps)^d, else
/// MixednessError.
SampledEnsemble sample_mixed_state(const SpatialGrid& grid, double epsilon,
                                   const PhaseDensity& f_in, const SamplingBox& box,
                                   int n_members, int species, std::uint64_t rng_seed,
                                   double schatten_c = 1.0);

/// Second-order Strang splitting of H = alpha.(-i eps grad - A) + beta - A0.
/// Potential half-steps are exact pointwise rotations at the midpoint time,
/// the free step is exact in Fourier space; each factor is unitary.
class DiracPropagator {
public:
    DiracPropagator(const SpatialGrid& grid, double epsilon, PotentialModel model);

    void step(SpinorField& psi, double t, double dt) const;
    void step(MixedState& state, double t, double dt, int workers = 1) const;

    /// March from t0 to t1 in uniform steps of dt (last step shortened),
    /// copying out the state at each requested snapshot time.
    std::vector<std::pair<double, SpinorField>> evolve(SpinorField psi, double t0, double t1,
                                                       double dt,
                                                       const std::vector<double>& snapshot_times)
        const;
    std::vector<std::pair<double, MixedState>> evolve(MixedState state, double t0, double t1,
                                                      double dt,
                                                      const std::vector<double>& snapshot_times,
                                                      int workers = 1) const;

    /// H psi at time t, used by the energy diagnostic.
    SpinorField apply_hamiltonian(const SpinorField& psi, double t) const;

    const PotentialModel& model() const { return model_; }

private:
    void free_step(SpinorField& psi, double dt) const;
    void potential_half_step(SpinorField& psi, double t_mid, double dt) const;
    const std::vector<Mat4>& free_matrices(double dt) const;

    SpatialGrid grid_;
    double epsilon_;
    PotentialModel model_;
    std::shared_ptr<FftPlan> fwd_, bwd_;
    mutable std::vector<Mat4> free_cache_;
    mutable double free_cache_dt_ = 0.0;
    std::vector<Vec3> momenta_;  // eps * k per node, inactive axes = transverse_xi
    std::vector<PotentialDerivs> static_pd_;  // cached potentials for static models
    bool vector_free_ = false;                // A == 0 everywhere (scalar half step)
};

struct Diagnostics {
    double norm_sq = 0.0;               // total weight-summed L2 norm squared
    std::vector<double> rho;            // per node
    std::vector<std::array<double, 3>> J;
    std::vector<double> energy;
};

Diagnostics diagnostics(const SpinorField& psi, const DiracPropagator& prop, double t);
Diagnostics diagnostics(const MixedState& state, const DiracPropagator& prop, double t);

void write_dspn(const std::string& path, const MixedState& state, const SpatialGrid& grid,
                double t);
struct DspnFile {
    SpatialGrid grid;
    double t = 0.0;
    MixedState state;
};
DspnFile read_dspn(const std::string& path);

}  // namespace dlab
