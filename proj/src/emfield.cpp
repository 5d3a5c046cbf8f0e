#include "dlab/emfield.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "dlab/errors.hpp"

namespace dlab {

namespace {

Vec3 mask_active(const Vec3& x, int d) {
    Vec3 y = Vec3::Zero();
    for (int i = 0; i < d; ++i) y[i] = x[i];
    return y;
}

void require_finite(const Vec3& v, const char* what) {
    if (!v.allFinite()) throw ConfigError(std::string("non-finite parameter: ") + what);
}

}  // namespace

PotentialModel PotentialModel::zero() { return PotentialModel(); }

PotentialModel PotentialModel::uniform_e(const Vec3& e0, int dimension) {
    require_finite(e0, "e0");
    for (int i = dimension; i < 3; ++i)
        if (e0[i] != 0.0)
            throw ConfigError("uniform_E: E0 components beyond the active dimension must vanish");
    PotentialModel m;
    m.preset_ = PotentialPreset::UniformE;
    m.dim_ = dimension;
    m.vec_amp_ = e0;
    return m;
}

PotentialModel PotentialModel::uniform_b(const Vec3& b0, int dimension) {
    require_finite(b0, "b0");
    if (dimension < 2 && b0[0] != 0.0)
        throw ConfigError("uniform_B: B along x1 needs at least 2 active dimensions");
    PotentialModel m;
    m.preset_ = PotentialPreset::UniformB;
    m.dim_ = dimension;
    m.vec_amp_ = b0;
    return m;
}

PotentialModel PotentialModel::gaussian_bump_a0(double amp, double width, const Vec3& center,
                                                int dimension, double period, const Vec3& a_amp,
                                                double t0, double tau) {
    if (!(width > 0.0) || !std::isfinite(amp))
        throw ConfigError("gaussian_bump_A0: need finite amp and width > 0");
    if (period < 0.0 || !std::isfinite(period))
        throw ConfigError("gaussian_bump_A0: period must be >= 0");
    require_finite(a_amp, "a_amp");
    for (int i = dimension; i < 3; ++i)
        if (a_amp[i] != 0.0)
            throw ConfigError("gaussian_bump_A0: a_amp beyond the active dimension must vanish");
    if (!(tau > 0.0)) throw ConfigError("gaussian_bump_A0: tau must be > 0");
    PotentialModel m;
    m.preset_ = PotentialPreset::GaussianBumpA0;
    m.dim_ = dimension;
    m.amp_ = amp;
    m.width_ = width;
    m.center_ = center;
    m.period_ = period;
    m.vec_amp_ = a_amp;
    m.t0_ = t0;
    m.tau_ = tau;
    return m;
}

PotentialModel PotentialModel::time_pulse(const Vec3& amp, const Vec3& k_hat, double width,
                                          double t0, double tau, double a0_amp, int dimension) {
    require_finite(amp, "amp");
    if (!(width > 0.0) || !(tau > 0.0)) throw ConfigError("time_pulse: need width, tau > 0");
    Vec3 k = mask_active(k_hat, dimension);
    if (k.norm() == 0.0) throw ConfigError("time_pulse: k_hat must have an active component");
    PotentialModel m;
    m.preset_ = PotentialPreset::TimePulse;
    m.dim_ = dimension;
    m.vec_amp_ = amp;
    m.k_hat_ = k / k.norm();
    m.width_ = width;
    m.t0_ = t0;
    m.tau_ = tau;
    m.a0_amp_ = a0_amp;
    return m;
}

PotentialModel PotentialModel::from_config(const std::string& preset,
                                           const std::map<std::string, std::vector<double>>& params,
                                           int dimension) {
    auto vec = [&](const std::string& key, const Vec3& def) {
        auto it = params.find(key);
        if (it == params.end()) return def;
        if (it->second.size() != 3)
            throw ConfigError("potential." + key + " must be a 3-vector");
        return Vec3(it->second[0], it->second[1], it->second[2]);
    };
    auto scalar = [&](const std::string& key, double def) {
        auto it = params.find(key);
        if (it == params.end()) return def;
        if (it->second.size() != 1) throw ConfigError("potential." + key + " must be a scalar");
        return it->second[0];
    };

    if (preset == "zero") return zero();
    if (preset == "uniform_E") return uniform_e(vec("e0", Vec3::UnitX()), dimension);
    if (preset == "uniform_B") return uniform_b(vec("b0", Vec3::UnitZ()), dimension);
    if (preset == "gaussian_bump_A0")
        return gaussian_bump_a0(scalar("amp", 1.0), scalar("width", 1.0),
                                vec("center", Vec3::Zero()), dimension, scalar("period", 0.0),
                                vec("a_amp", Vec3::Zero()), scalar("t0", 0.0),
                                scalar("tau", 1.0));
    if (preset == "time_pulse")
        return time_pulse(vec("amp", Vec3::UnitY()), vec("k_hat", Vec3::UnitX()),
                          scalar("width", 1.0), scalar("t0", 0.0), scalar("tau", 1.0),
                          scalar("a0_amp", 0.0), dimension);
    throw ConfigError("unknown potential preset '" + preset + "'");
}

PotentialDerivs PotentialModel::eval(double t, const Vec3& x) const {
    PotentialDerivs out;
    const Vec3 xa = mask_active(x, dim_);
    switch (preset_) {
        case PotentialPreset::Zero:
            break;
        case PotentialPreset::UniformE:
            out.A0 = vec_amp_.dot(xa);
            out.grad_A0 = vec_amp_;
            break;
        case PotentialPreset::UniformB: {
            // A = (0, b3 x1, -b2 x1 + b1 x2) -> curl A = (b1, b2, b3)
            const Vec3& b = vec_amp_;
            out.A = Vec3(0.0, b[2] * xa[0], -b[1] * xa[0] + b[0] * xa[1]);
            out.grad_A(0, 1) = b[2];
            out.grad_A(0, 2) = -b[1];
            out.grad_A(1, 2) = b[0];
            break;
        }
        case PotentialPreset::GaussianBumpA0: {
            const Vec3 r0 = xa - mask_active(center_, dim_);
            const double w2 = width_ * width_;
            const int images = period_ > 0.0 ? 2 : 0;
            Vec3 k = Vec3::Zero();
            std::function<void(int)> add = [&](int axis) {
                if (axis == dim_) {
                    const Vec3 r = r0 + period_ * k;
                    const double g = amp_ * std::exp(-r.squaredNorm() / w2);
                    out.A0 += g;
                    out.grad_A0 += (-2.0 / w2) * g * r;
                    return;
                }
                for (int i = -images; i <= images; ++i) {
                    k[axis] = i;
                    add(axis + 1);
                }
                k[axis] = 0;
            };
            add(0);
            if (vec_amp_.squaredNorm() > 0.0) {
                const double dt_arg = (t - t0_) / tau_;
                const double g = std::exp(-dt_arg * dt_arg);
                out.A = vec_amp_ * g;
                out.dt_A = vec_amp_ * (-2.0 * dt_arg / tau_ * g);
            }
            break;
        }
        case PotentialPreset::TimePulse: {
            const double dt_arg = (t - t0_) / tau_;
            const double g = std::exp(-dt_arg * dt_arg);
            const double gp = -2.0 * dt_arg / tau_ * g;
            const double u = k_hat_.dot(xa);
            const double h = std::exp(-u * u / (width_ * width_));
            const double hp = -2.0 * u / (width_ * width_) * h;
            out.A = vec_amp_ * (g * h);
            out.dt_A = vec_amp_ * (gp * h);
            out.A0 = a0_amp_ * g * h;
            out.dt_A0 = a0_amp_ * gp * h;
            out.grad_A0 = a0_amp_ * g * hp * k_hat_;
            for (int l = 0; l < 3; ++l)
                for (int k = 0; k < 3; ++k) out.grad_A(l, k) = g * hp * k_hat_[l] * vec_amp_[k];
            break;
        }
    }
    // Inactive directions carry no dependence.
    for (int l = dim_; l < 3; ++l) {
        out.grad_A0[l] = 0.0;
        out.grad_A.row(l).setZero();
    }
    return out;
}

FieldSample PotentialModel::fields(double t, const Vec3& x) const {
    const PotentialDerivs d = eval(t, x);
    FieldSample s;
    s.E = d.grad_A0 - d.dt_A;
    s.B = Vec3(d.grad_A(1, 2) - d.grad_A(2, 1),
               d.grad_A(2, 0) - d.grad_A(0, 2),
               d.grad_A(0, 1) - d.grad_A(1, 0));
    return s;
}

bool PotentialModel::is_static() const {
    if (preset_ == PotentialPreset::TimePulse) return false;
    if (preset_ == PotentialPreset::GaussianBumpA0 && vec_amp_.squaredNorm() > 0.0) return false;
    return true;
}

std::string PotentialModel::describe() const {
    std::ostringstream os;
    switch (preset_) {
        case PotentialPreset::Zero: os << "zero"; break;
        case PotentialPreset::UniformE:
            os << "uniform_E e0=(" << vec_amp_.transpose() << ")";
            break;
        case PotentialPreset::UniformB:
            os << "uniform_B b0=(" << vec_amp_.transpose() << ")";
            break;
        case PotentialPreset::GaussianBumpA0:
            os << "gaussian_bump_A0 amp=" << amp_ << " width=" << width_;
            if (period_ > 0.0) os << " period=" << period_;
            if (vec_amp_.squaredNorm() > 0.0)
                os << " a_amp=(" << vec_amp_.transpose() << ") tau=" << tau_;
            break;
        case PotentialPreset::TimePulse:
            os << "time_pulse amp=(" << vec_amp_.transpose() << ") tau=" << tau_
               << " a0_amp=" << a0_amp_;
            break;
    }
    return os.str();
}

Vec3 lorentz_force(const FieldSample& sample, const Vec3& v, int species) {
    const double gamma = std::sqrt(1.0 + v.squaredNorm());
    return sample.E + static_cast<double>(species) * (v / gamma).cross(sample.B);
}

}  // namespace dlab
