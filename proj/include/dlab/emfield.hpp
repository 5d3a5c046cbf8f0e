#pragma once

#include <map>
#include <string>

#include "dlab/clifford.hpp"

namespace dlab {

/// Full first-derivative record of the potentials at one (t, x).
/// Convention: grad_A(l, k) = d A_k / d x_l, grad_A0[l] = d A0 / d x_l.
struct PotentialDerivs {
    double A0 = 0.0;
    Vec3 A = Vec3::Zero();
    double dt_A0 = 0.0;
    Vec3 dt_A = Vec3::Zero();
    Vec3 grad_A0 = Vec3::Zero();
    Eigen::Matrix3d grad_A = Eigen::Matrix3d::Zero();
};

/// Fields in the sign convention E = +grad A0 - dt A, B = curl A.
/// Note the + on grad A0; it matches the Hamiltonian -A0 and is kept verbatim.
struct FieldSample {
    Vec3 E = Vec3::Zero();
    Vec3 B = Vec3::Zero();
};

enum class PotentialPreset { Zero, UniformE, UniformB, GaussianBumpA0, TimePulse };

/// Analytic external potentials (A0, A) with closed-form first derivatives.
/// Reduced-dimension runs (d < 3): the potentials depend only on the first d
/// coordinates, but all three components of A may be nonzero so B can be
/// nonzero in 1D/2D runs.
class PotentialModel {
public:
    static PotentialModel zero();
    static PotentialModel uniform_e(const Vec3& e0, int dimension = 3);
    static PotentialModel uniform_b(const Vec3& b0, int dimension = 3);
    // period > 0 periodizes the bump over a box of that length in every active
    // dimension, so samples at unwrapped points x +- L/2 agree with the torus.
    // a_amp adds a spatially uniform vector pulse A(t) = a_amp exp(-((t-t0)/tau)^2)
    // on top of the static A0 bump, giving the benchmark a nontrivial dt P.
    static PotentialModel gaussian_bump_a0(double amp, double width, const Vec3& center,
                                           int dimension = 3, double period = 0.0,
                                           const Vec3& a_amp = Vec3::Zero(), double t0 = 0.0,
                                           double tau = 1.0);
    static PotentialModel time_pulse(const Vec3& amp, const Vec3& k_hat, double width,
                                     double t0, double tau, double a0_amp,
                                     int dimension = 3);

    /// Build from the harness configuration keys; unknown preset -> ConfigError.
    static PotentialModel from_config(const std::string& preset,
                                      const std::map<std::string, std::vector<double>>& params,
                                      int dimension);

    PotentialDerivs eval(double t, const Vec3& x) const;
    FieldSample fields(double t, const Vec3& x) const;

    PotentialPreset preset() const { return preset_; }
    int dimension() const { return dim_; }
    bool is_static() const;
    std::string describe() const;

private:
    PotentialModel() = default;

    PotentialPreset preset_ = PotentialPreset::Zero;
    int dim_ = 3;
    Vec3 vec_amp_ = Vec3::Zero();   // E0 / B0 / pulse amplitude
    Vec3 k_hat_ = Vec3::UnitX();
    Vec3 center_ = Vec3::Zero();
    double amp_ = 0.0;
    double width_ = 1.0;
    double t0_ = 0.0;
    double tau_ = 1.0;
    double a0_amp_ = 0.0;
    double period_ = 0.0;
};

/// F = E + species * (v/<v>) x B, species = +1 electrons, -1 positrons.
/// |v/<v>| < 1 for all finite v.
Vec3 lorentz_force(const FieldSample& sample, const Vec3& v, int species);

}  // namespace dlab
