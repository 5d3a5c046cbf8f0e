#pragma once

#include <functional>
#include <vector>

#include "dlab/clifford.hpp"
#include "dlab/dirac_solver.hpp"
#include "dlab/emfield.hpp"

namespace dlab {

/// Characteristic-curve particle: kinetic momentum state variable v = xi - A.
struct Particle {
    Vec3 x = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    double weight = 0.0;
    int species = 1;  // +1 electron, -1 positron
};

struct ParticleEnsemble {
    std::vector<Particle> particles;

    double total_weight(int species) const;
};

struct CharacteristicsRhs {
    Vec3 dx;
    Vec3 dv;
};

/// dx/dt = species*v/<v>, dv/dt = E + species*(v/<v>) x B.
CharacteristicsRhs characteristics_rhs(const PotentialModel& model, double t, const Vec3& x,
                                       const Vec3& v, int species);

Particle rk4_push(const PotentialModel& model, const Particle& p, double t, double dt);

/// Push every particle from t0 to t1 in uniform steps dt (last step
/// shortened); returns the final ensemble.  Weights and species untouched.
ParticleEnsemble evolve_ensemble(const PotentialModel& model, ParticleEnsemble ensemble,
                                 double t0, double t1, double dt, int workers = 1);

/// Conserved energy h = species*<v> - A0(x) for static fields.
double particle_energy(const PotentialModel& model, double t, const Particle& p);

/// Uniform (x, v) histogram box for deposition.
struct DepositGrid {
    int d = 1;           // active dimension; inactive coordinates ignored
    int nx = 64;
    int nv = 64;
    double x_lo = -1.0, x_hi = 1.0;
    double v_lo = -1.0, v_hi = 1.0;

    double dx() const { return (x_hi - x_lo) / nx; }
    double dv() const { return (v_hi - v_lo) / nv; }
};

struct DepositedMoments {
    std::vector<double> f_plus;   // nx*nv, x-major, density per unit phase-space volume
    std::vector<double> f_minus;
    std::vector<double> rho;      // nx
    std::vector<std::array<double, 3>> J;
    double overflow_weight = 0.0;  // particles outside the box (warned by callers)
};

/// Cloud-in-cell deposition on the active axis 0.
DepositedMoments deposit_moments(const ParticleEnsemble& ensemble, const DepositGrid& grid);

using PhaseObservable = std::function<double(const Vec3& x, const Vec3& v)>;

/// sum of weight * a(x, v) over species-matching particles.
double observable(const ParticleEnsemble& ensemble, const PhaseObservable& a, int species);

/// Quasi-random ensemble drawn from f_in on a Halton stream; v = xi - A(t,x).
ParticleEnsemble sample_ensemble(const PotentialModel& model, double t,
                                 const PhaseDensity& f_in, const SamplingBox& box, int n_particles,
                                 int species, std::uint64_t rng_seed);

/// Particle ensemble on exactly the nodes of a sampled mixed state, so the
/// quantum and classical sides share quadrature points and weights.
ParticleEnsemble ensemble_from_nodes(const std::vector<PhaseNode>& nodes,
                                     const PotentialModel& model, double t, int species);

}  // namespace dlab
