#include "dlab/vlasov.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dlab/errors.hpp"

namespace dlab {

namespace {

double halton(std::uint64_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

constexpr int kHaltonBases[6] = {2, 3, 5, 7, 11, 13};

}  // namespace

double ParticleEnsemble::total_weight(int species) const {
    double s = 0.0;
    for (const Particle& p : particles)
        if (p.species == species) s += p.weight;
    return s;
}

CharacteristicsRhs characteristics_rhs(const PotentialModel& model, double t, const Vec3& x,
                                       const Vec3& v, int species) {
    const double gamma = std::sqrt(1.0 + v.squaredNorm());
    const FieldSample f = model.fields(t, x);
    const double s = static_cast<double>(species);
    CharacteristicsRhs rhs;
    rhs.dx = s * v / gamma;
    rhs.dv = f.E + s * (v / gamma).cross(f.B);
    return rhs;
}

Particle rk4_push(const PotentialModel& model, const Particle& p, double t, double dt) {
    const auto k1 = characteristics_rhs(model, t, p.x, p.v, p.species);
    const auto k2 = characteristics_rhs(model, t + 0.5 * dt, p.x + 0.5 * dt * k1.dx,
                                        p.v + 0.5 * dt * k1.dv, p.species);
    const auto k3 = characteristics_rhs(model, t + 0.5 * dt, p.x + 0.5 * dt * k2.dx,
                                        p.v + 0.5 * dt * k2.dv, p.species);
    const auto k4 = characteristics_rhs(model, t + dt, p.x + dt * k3.dx, p.v + dt * k3.dv,
                                        p.species);
    Particle out = p;
    out.x += (dt / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    out.v += (dt / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    return out;
}

ParticleEnsemble evolve_ensemble(const PotentialModel& model, ParticleEnsemble ensemble,
                                 double t0, double t1, double dt, int workers) {
    if (t1 < t0) throw ConfigError("t1 must be >= t0");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    auto push_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Particle p = ensemble.particles[i];
            double t = t0;
            while (t1 - t > 1e-12) {
                const double h = std::min(dt, t1 - t);
                p = rk4_push(model, p, t, h);
                t += h;
            }
            ensemble.particles[i] = p;
        }
    };
    const std::size_t np = ensemble.particles.size();
    const int nw = std::max(1, std::min<int>(workers, static_cast<int>(np)));
    if (nw == 1) {
        push_range(0, np);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (np + nw - 1) / nw;
        for (int w = 0; w < nw; ++w) {
            const std::size_t lo = w * chunk, hi = std::min(np, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(push_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return ensemble;
}

double particle_energy(const PotentialModel& model, double t, const Particle& p) {
    const double gamma = std::sqrt(1.0 + p.v.squaredNorm());
    return static_cast<double>(p.species) * gamma - model.eval(t, p.x).A0;
}

DepositedMoments deposit_moments(const ParticleEnsemble& ensemble, const DepositGrid& grid) {
    DepositedMoments out;
    out.f_plus.assign(static_cast<std::size_t>(grid.nx) * grid.nv, 0.0);
    out.f_minus.assign(static_cast<std::size_t>(grid.nx) * grid.nv, 0.0);
    out.rho.assign(grid.nx, 0.0);
    out.J.assign(grid.nx, {0.0, 0.0, 0.0});
    const double dx = grid.dx(), dv = grid.dv();
    const double cell = dx * dv;

    for (const Particle& p : ensemble.particles) {
        const double fx = (p.x[0] - grid.x_lo) / dx - 0.5;
        const double fv = (p.v[0] - grid.v_lo) / dv - 0.5;
        const int ix = static_cast<int>(std::floor(fx));
        const int iv = static_cast<int>(std::floor(fv));
        if (fx < -0.5 || fv < -0.5 || ix >= grid.nx || iv >= grid.nv) {
            out.overflow_weight += p.weight;
            continue;
        }
        const double wx = fx - ix, wv = fv - iv;
        std::vector<double>& f = p.species == 1 ? out.f_plus : out.f_minus;
        const double gamma = std::sqrt(1.0 + p.v.squaredNorm());
        const double jv = static_cast<double>(p.species) * p.v[0] / gamma;
        for (int a = 0; a <= 1; ++a) {
            const int cx = ix + a;
            if (cx < 0 || cx >= grid.nx) continue;
            const double sx = a == 0 ? 1.0 - wx : wx;
            out.rho[cx] += p.weight * sx / dx;
            out.J[cx][0] += p.weight * jv * sx / dx;
            for (int b = 0; b <= 1; ++b) {
                const int cv = iv + b;
                if (cv < 0 || cv >= grid.nv) continue;
                const double sv = b == 0 ? 1.0 - wv : wv;
                f[static_cast<std::size_t>(cx) * grid.nv + cv] += p.weight * sx * sv / cell;
            }
        }
    }
    return out;
}

double observable(const ParticleEnsemble& ensemble, const PhaseObservable& a, int species) {
    double s = 0.0;
    for (const Particle& p : ensemble.particles)
        if (p.species == species) s += p.weight * a(p.x, p.v);
    return s;
}

ParticleEnsemble sample_ensemble(const PotentialModel& model, double t, const PhaseDensity& f_in,
                                 const SamplingBox& box, int n_particles, int species,
                                 std::uint64_t rng_seed) {
    if (n_particles < 1) throw ConfigError("n_particles must be positive");
    const std::uint64_t offset = 1000 + (rng_seed % 100000) * 17;
    ParticleEnsemble ens;
    double total = 0.0;
    for (int j = 0; j < n_particles; ++j) {
        Vec3 x = Vec3::Zero(), xi = Vec3::Zero();
        for (int a = 0; a < 3; ++a) {
            const double ux = halton(offset + static_cast<std::uint64_t>(j), kHaltonBases[a]);
            const double uxi = halton(offset + static_cast<std::uint64_t>(j), kHaltonBases[3 + a]);
            x[a] = box.x_lo[a] + ux * (box.x_hi[a] - box.x_lo[a]);
            xi[a] = box.xi_lo[a] + uxi * (box.xi_hi[a] - box.xi_lo[a]);
        }
        Particle p;
        p.x = x;
        p.v = xi - model.eval(t, x).A;
        p.weight = std::max(f_in(x, xi), 0.0);
        p.species = species;
        total += p.weight;
        ens.particles.push_back(p);
    }
    if (total <= 0.0) throw ConfigError("f_in vanishes on every sampling node");
    for (Particle& p : ens.particles) p.weight /= total;
    return ens;
}

ParticleEnsemble ensemble_from_nodes(const std::vector<PhaseNode>& nodes,
                                     const PotentialModel& model, double t, int species) {
    ParticleEnsemble ens;
    for (const PhaseNode& n : nodes) {
        Particle p;
        p.x = n.x;
        p.v = n.xi - model.eval(t, n.x).A;
        p.weight = n.weight;
        p.species = species;
        ens.particles.push_back(p);
    }
    return ens;
}

}  // namespace dlab
