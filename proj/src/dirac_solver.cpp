#include "dlab/dirac_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <thread>

#include "dlab/errors.hpp"
#include "dlab/symbol.hpp"

namespace dlab {

namespace {

const Complex I(0.0, 1.0);

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

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

SpatialGrid::SpatialGrid(int d_, int n_, double L_, const Vec3& txi)
    : d(d_), n(n_), L(L_), transverse_xi(txi) {
    if (d < 1 || d > 3) throw DimensionError("grid dimension must be 1, 2 or 3");
    if (!power_of_two(n)) throw ConfigError("grid size n must be a power of two");
    if (!(L > 0.0)) throw ConfigError("box length must be positive");
}

std::size_t SpatialGrid::size() const {
    std::size_t s = 1;
    for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(n);
    return s;
}

Vec3 SpatialGrid::coord(std::size_t node) const {
    Vec3 x = Vec3::Zero();
    // axis 0 slowest, axis d-1 fastest (row-major, matches the FFT layout)
    for (int a = d - 1; a >= 0; --a) {
        const std::size_t i = node % static_cast<std::size_t>(n);
        node /= static_cast<std::size_t>(n);
        x[a] = -0.5 * L + spacing() * static_cast<double>(i);
    }
    return x;
}

bool SpatialGrid::compatible(const SpatialGrid& o) const {
    return d == o.d && n == o.n && L == o.L && transverse_xi == o.transverse_xi;
}

SpinorField::SpinorField(const SpatialGrid& g, double eps) : grid(g), epsilon(eps) {
    if (!(eps > 0.0) || eps > 1.0) throw ConfigError("epsilon must lie in (0, 1]");
    values.assign(4 * grid.size(), Complex(0.0, 0.0));
}

double SpinorField::norm() const {
    double s = 0.0;
    for (const Complex& c : values) s += std::norm(c);
    return std::sqrt(s * std::pow(grid.spacing(), grid.d));
}

void SpinorField::normalize() {
    const double nrm = norm();
    if (nrm == 0.0) throw DegenerateSpinorError("cannot normalize the zero field");
    for (Complex& c : values) c /= nrm;
}

double MixedState::total_weight() const {
    double s = 0.0;
    for (const auto& m : members) s += m.weight;
    return s;
}

double MixedState::schatten2_sq() const {
    double s = 0.0;
    for (const auto& m : members) s += m.weight * m.weight;
    return s;
}

CVec4 free_eigenspinor(const Vec3& p, int species) {
    if (species != 1 && species != -1) throw ConfigError("species must be +-1");
    const double gamma = std::sqrt(1.0 + p.squaredNorm());
    const Mat4 S = (alpha_dot(p) + dirac_matrix(DiracKind::Beta)) / gamma;
    const Mat4 Pi = 0.5 * (Mat4::Identity() + static_cast<double>(species) * S);
    // e1 (e3) never degenerates on the +1 (-1) branch: ||Pi e||^2 = (1 + 1/<p>)/2.
    CVec4 ref = CVec4::Zero();
    ref[species == 1 ? 0 : 2] = 1.0;
    CVec4 u = Pi * ref;
    const double nrm = u.norm();
    if (nrm < 1e-8) throw DegenerateSpinorError("species projection annihilates reference spinor");
    return u / nrm;
}

Vec3 snap_momentum(const SpatialGrid& grid, double epsilon, const Vec3& xi) {
    const double unit = 2.0 * M_PI * epsilon / grid.L;
    Vec3 out = xi;
    for (int a = 0; a < grid.d; ++a) out[a] = unit * std::round(xi[a] / unit);
    return out;
}

SpinorField make_coherent_state(const SpatialGrid& grid, double epsilon, const Vec3& x0,
                                const Vec3& xi0, int species) {
    for (int a = 0; a < grid.d; ++a)
        if (std::abs(x0[a]) > 0.5 * grid.L)
            throw ConfigError("coherent-state center x0 outside the box");
    const double band = M_PI * epsilon / (2.0 * grid.spacing());
    const Vec3 xi = snap_momentum(grid, epsilon, xi0);
    for (int a = 0; a < grid.d; ++a)
        if (std::abs(xi[a]) >= band)
            throw ConfigError("coherent-state momentum outside the resolvable band |xi| < pi*eps/(2 dx)");

    const CVec4 u = free_eigenspinor(xi, species);
    SpinorField psi(grid, epsilon);
    const std::size_t nn = grid.size();
    for (std::size_t node = 0; node < nn; ++node) {
        const Vec3 x = grid.coord(node);
        double env = 1.0;
        for (int a = 0; a < grid.d; ++a) {
            // 3-image periodization keeps the envelope smooth across the seam
            double g = 0.0;
            for (int im = -1; im <= 1; ++im) {
                const double du = x[a] - x0[a] + im * grid.L;
                g += std::exp(-du * du / (2.0 * epsilon));
            }
            env *= g;
        }
        const Complex phase = std::exp(I * (xi.dot(x) / epsilon));
        const Complex amp = env * phase;
        Complex* dst = psi.at(node);
        for (int c = 0; c < 4; ++c) dst[c] = amp * u[c];
    }
    psi.normalize();
    return psi;
}

void band_project(SpinorField& psi, int species) {
    if (species != 1 && species != -1) throw ConfigError("band_project: species must be +-1");
    const SpatialGrid& g = psi.grid;
    std::vector<int> dims(g.d, g.n);
    FftPlan fwd(dims, 4, 4, 1, kFftForward);
    FftPlan bwd(dims, 4, 4, 1, kFftBackward);
    fwd.execute(psi.values.data());
    const std::size_t nn = g.size();
    const double s = static_cast<double>(species);
    for (std::size_t node = 0; node < nn; ++node) {
        std::size_t rem = node;
        Vec3 p = g.transverse_xi;
        for (int a = g.d - 1; a >= 0; --a) {
            const int i = static_cast<int>(rem % static_cast<std::size_t>(g.n));
            rem /= static_cast<std::size_t>(g.n);
            p[a] = psi.epsilon * 2.0 * M_PI * g.freq(i) / g.L;
        }
        const double gamma = std::sqrt(1.0 + p.squaredNorm());
        const Mat4 Pi =
            0.5 * (Mat4::Identity() +
                   (s / gamma) * (alpha_dot(p) + dirac_matrix(DiracKind::Beta)));
        Eigen::Map<CVec4> v(psi.at(node));
        v = (Pi * v).eval();
    }
    bwd.execute(psi.values.data());
    const double scale = 1.0 / static_cast<double>(nn);
    for (Complex& c : psi.values) c *= scale;
    psi.normalize();
}

SampledEnsemble sample_mixed_state(const SpatialGrid& grid, double epsilon,
                                   const PhaseDensity& f_in, const SamplingBox& box,
                                   int n_members, int species, std::uint64_t rng_seed,
                                   double schatten_c) {
    if (n_members < 1) throw ConfigError("n_members must be positive");
    const std::uint64_t offset = 1000 + (rng_seed % 100000) * 17;

    SampledEnsemble out;
    out.state.epsilon = epsilon;
    std::vector<double> raw(n_members, 0.0);
    for (int j = 0; j < n_members; ++j) {
        PhaseNode node;
        node.x = Vec3::Zero();
        node.xi = grid.transverse_xi;
        for (int a = 0; a < grid.d; ++a) {
            const double ux = halton(offset + static_cast<std::uint64_t>(j), kHaltonBases[a]);
            const double uxi =
                halton(offset + static_cast<std::uint64_t>(j), kHaltonBases[3 + a]);
            node.x[a] = box.x_lo[a] + ux * (box.x_hi[a] - box.x_lo[a]);
            node.xi[a] = box.xi_lo[a] + uxi * (box.xi_hi[a] - box.xi_lo[a]);
        }
        node.xi = snap_momentum(grid, epsilon, node.xi);
        raw[j] = std::max(f_in(node.x, node.xi), 0.0);
        out.nodes.push_back(node);
    }
    double total = 0.0;
    for (double w : raw) total += w;
    if (total <= 0.0) throw ConfigError("f_in vanishes on every sampling node");

    double s2 = 0.0;
    for (int j = 0; j < n_members; ++j) {
        out.nodes[j].weight = raw[j] / total;
        s2 += out.nodes[j].weight * out.nodes[j].weight;
    }
    const double bound = schatten_c * std::pow(2.0 * M_PI * epsilon, grid.d);
    if (s2 > bound) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "mixedness bound violated: sum lambda^2 = %.3e > %.3e; raise n_members",
                      s2, bound);
        throw MixednessError(msg);
    }

    for (int j = 0; j < n_members; ++j) {
        MixedMember m;
        m.weight = out.nodes[j].weight;
        m.psi = make_coherent_state(grid, epsilon, out.nodes[j].x, out.nodes[j].xi, species);
        // well-prepared ensemble: purify each member onto its species band
        band_project(m.psi, species);
        out.state.members.push_back(std::move(m));
    }
    return out;
}

DiracPropagator::DiracPropagator(const SpatialGrid& grid, double epsilon, PotentialModel model)
    : grid_(grid), epsilon_(epsilon), model_(std::move(model)) {
    std::vector<int> dims(grid_.d, grid_.n);
    fwd_ = std::make_shared<FftPlan>(dims, 4, 4, 1, kFftForward);
    bwd_ = std::make_shared<FftPlan>(dims, 4, 4, 1, kFftBackward);

    const std::size_t nn = grid_.size();
    momenta_.resize(nn);
    for (std::size_t node = 0; node < nn; ++node) {
        std::size_t rem = node;
        Vec3 p = grid_.transverse_xi;
        for (int a = grid_.d - 1; a >= 0; --a) {
            const int i = static_cast<int>(rem % static_cast<std::size_t>(grid_.n));
            rem /= static_cast<std::size_t>(grid_.n);
            p[a] = epsilon_ * 2.0 * M_PI * grid_.freq(i) / grid_.L;
        }
        momenta_[node] = p;
    }
    if (model_.is_static() && model_.preset() != PotentialPreset::Zero) {
        static_pd_.resize(nn);
        vector_free_ = true;
        for (std::size_t node = 0; node < nn; ++node) {
            static_pd_[node] = model_.eval(0.0, grid_.coord(node));
            if (static_pd_[node].A.norm() > 0.0) vector_free_ = false;
        }
    }
}

const std::vector<Mat4>& DiracPropagator::free_matrices(double dt) const {
    if (free_cache_.size() == momenta_.size() && free_cache_dt_ == dt) return free_cache_;
    free_cache_.resize(momenta_.size());
    for (std::size_t i = 0; i < momenta_.size(); ++i) {
        const Vec3& p = momenta_[i];
        const double gamma = std::sqrt(1.0 + p.squaredNorm());
        const double phi = dt * gamma / epsilon_;
        const Mat4 H0 = alpha_dot(p) + dirac_matrix(DiracKind::Beta);
        free_cache_[i] = std::cos(phi) * Mat4::Identity() - I * (std::sin(phi) / gamma) * H0;
    }
    free_cache_dt_ = dt;
    return free_cache_;
}

void DiracPropagator::free_step(SpinorField& psi, double dt) const {
    const std::vector<Mat4>& U = free_matrices(dt);
    fwd_->execute(psi.values.data());
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (std::size_t node = 0; node < grid_.size(); ++node) {
        Eigen::Map<CVec4> v(psi.at(node));
        v = (U[node] * v * scale).eval();
    }
    bwd_->execute(psi.values.data());
}

void DiracPropagator::potential_half_step(SpinorField& psi, double t_mid, double dt) const {
    if (model_.preset() == PotentialPreset::Zero) return;
    const double theta = 0.5 * dt / epsilon_;
    if (!static_pd_.empty() && vector_free_) {
        // static scalar potential: the half step is a cached pointwise phase
        for (std::size_t node = 0; node < grid_.size(); ++node) {
            const Complex phase = std::exp(I * (theta * static_pd_[node].A0));
            Complex* v = psi.at(node);
            for (int c = 0; c < 4; ++c) v[c] *= phase;
        }
        return;
    }
    for (std::size_t node = 0; node < grid_.size(); ++node) {
        const PotentialDerivs pd =
            static_pd_.empty() ? model_.eval(t_mid, grid_.coord(node)) : static_pd_[node];
        const double amag = pd.A.norm();
        const Complex phase = std::exp(I * (theta * pd.A0));
        Eigen::Map<CVec4> v(psi.at(node));
        if (amag < 1e-300) {
            v *= phase;
        } else {
            const double c = std::cos(theta * amag);
            const double s = std::sin(theta * amag) / amag;
            const Mat4 U = phase * (c * Mat4::Identity() + I * s * alpha_dot(pd.A));
            v = (U * v).eval();
        }
    }
}

void DiracPropagator::step(SpinorField& psi, double t, double dt) const {
    if (!psi.grid.compatible(grid_)) throw DimensionError("state grid does not match propagator");
    const double t_mid = t + 0.5 * dt;
    potential_half_step(psi, t_mid, dt);
    free_step(psi, dt);
    potential_half_step(psi, t_mid, dt);
}

void DiracPropagator::step(MixedState& state, double t, double dt, int workers) const {
    free_matrices(dt);  // warm the cache before going parallel
    const int nw = std::max(1, std::min<int>(workers, static_cast<int>(state.members.size())));
    if (nw == 1) {
        for (auto& m : state.members) step(m.psi, t, dt);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (state.members.size() + nw - 1) / nw;
    for (int w = 0; w < nw; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(state.members.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([this, &state, t, dt, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) step(state.members[i].psi, t, dt);
        });
    }
    for (auto& th : pool) th.join();
}

namespace {

template <typename State, typename StepFn>
std::vector<std::pair<double, State>> march(State state, double t0, double t1, double dt,
                                            std::vector<double> targets, const StepFn& do_step) {
    std::vector<std::pair<double, State>> out;
    std::sort(targets.begin(), targets.end());
    if (targets.empty()) targets.push_back(t1);
    double t = t0;
    for (double s : targets) {
        if (s < t0 - 1e-12 || s > t1 + 1e-12) throw ConfigError("snapshot time outside [t0, t1]");
        while (s - t > 1e-12) {
            const double h = std::min(dt, s - t);
            do_step(state, t, h);
            t += h;
        }
        out.emplace_back(s, state);
    }
    return out;
}

}  // namespace

std::vector<std::pair<double, SpinorField>> DiracPropagator::evolve(
    SpinorField psi, double t0, double t1, double dt,
    const std::vector<double>& snapshot_times) const {
    if (t1 < t0) throw ConfigError("t1 must be >= t0");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    return march(std::move(psi), t0, t1, dt, snapshot_times,
                 [this](SpinorField& s, double t, double h) { step(s, t, h); });
}

std::vector<std::pair<double, MixedState>> DiracPropagator::evolve(
    MixedState state, double t0, double t1, double dt, const std::vector<double>& snapshot_times,
    int workers) const {
    if (t1 < t0) throw ConfigError("t1 must be >= t0");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    return march(std::move(state), t0, t1, dt, snapshot_times,
                 [this, workers](MixedState& s, double t, double h) { step(s, t, h, workers); });
}

SpinorField DiracPropagator::apply_hamiltonian(const SpinorField& psi, double t) const {
    SpinorField out = psi;
    // spectral part alpha.p + beta
    fwd_->execute(out.values.data());
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (std::size_t node = 0; node < grid_.size(); ++node) {
        const Mat4 H0 = alpha_dot(momenta_[node]) + dirac_matrix(DiracKind::Beta);
        Eigen::Map<CVec4> v(out.at(node));
        v = (H0 * v * scale).eval();
    }
    bwd_->execute(out.values.data());
    // pointwise part -alpha.A - A0
    if (model_.preset() != PotentialPreset::Zero) {
        for (std::size_t node = 0; node < grid_.size(); ++node) {
            const PotentialDerivs pd = model_.eval(t, grid_.coord(node));
            const Mat4 V = -alpha_dot(pd.A) - pd.A0 * Mat4::Identity();
            Eigen::Map<CVec4> v(out.at(node));
            Eigen::Map<const CVec4> src(psi.at(node));
            v += V * src;
        }
    }
    return out;
}

namespace {

void accumulate_diagnostics(Diagnostics& d, const SpinorField& psi, double weight,
                            const DiracPropagator& prop, double t) {
    const std::size_t nn = psi.grid.size();
    const SpinorField hpsi = prop.apply_hamiltonian(psi, t);
    for (std::size_t node = 0; node < nn; ++node) {
        const CVec4 v = psi.spinor(node);
        const CVec4 hv = hpsi.spinor(node);
        d.rho[node] += weight * v.squaredNorm();
        for (int k = 0; k < 3; ++k)
            d.J[node][k] += weight * std::real(v.dot(alpha(k) * v));
        d.energy[node] += weight * std::real(v.dot(hv));
    }
    double ns = 0.0;
    for (const Complex& c : psi.values) ns += std::norm(c);
    d.norm_sq += weight * ns * std::pow(psi.grid.spacing(), psi.grid.d);
}

}  // namespace

Diagnostics diagnostics(const SpinorField& psi, const DiracPropagator& prop, double t) {
    Diagnostics d;
    d.rho.assign(psi.grid.size(), 0.0);
    d.J.assign(psi.grid.size(), {0.0, 0.0, 0.0});
    d.energy.assign(psi.grid.size(), 0.0);
    accumulate_diagnostics(d, psi, 1.0, prop, t);
    return d;
}

Diagnostics diagnostics(const MixedState& state, const DiracPropagator& prop, double t) {
    if (state.members.empty()) throw ConfigError("empty mixed state");
    const SpatialGrid& g = state.members.front().psi.grid;
    Diagnostics d;
    d.rho.assign(g.size(), 0.0);
    d.J.assign(g.size(), {0.0, 0.0, 0.0});
    d.energy.assign(g.size(), 0.0);
    for (const auto& m : state.members) accumulate_diagnostics(d, m.psi, m.weight, prop, t);
    return d;
}

namespace {

constexpr char kDspnMagic[8] = {'D', 'S', 'P', 'N', 'v', '1', 0, 0};

void put_i64(std::ostream& os, std::int64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
std::int64_t get_i64(std::istream& is) {
    std::int64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
double get_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

}  // namespace

void write_dspn(const std::string& path, const MixedState& state, const SpatialGrid& grid,
                double t) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp + " for writing");
        os.write(kDspnMagic, 8);
        put_i64(os, grid.d);
        put_i64(os, grid.n);
        put_f64(os, grid.L);
        put_f64(os, state.epsilon);
        put_f64(os, t);
        put_i64(os, static_cast<std::int64_t>(state.members.size()));
        for (int a = 0; a < 3; ++a) put_f64(os, grid.transverse_xi[a]);
        for (const auto& m : state.members) {
            put_f64(os, m.weight);
            os.write(reinterpret_cast<const char*>(m.psi.values.data()),
                     static_cast<std::streamsize>(m.psi.values.size() * sizeof(Complex)));
        }
        if (!os) throw IoError("write failure on " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot rename " + tmp + " to " + path);
}

DspnFile read_dspn(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kDspnMagic, 8) != 0)
        throw IoError(path + " is not a DSPN file");
    const std::int64_t d = get_i64(is);
    const std::int64_t n = get_i64(is);
    const double L = get_f64(is);
    const double eps = get_f64(is);
    const double t = get_f64(is);
    const std::int64_t members = get_i64(is);
    Vec3 txi;
    for (int a = 0; a < 3; ++a) txi[a] = get_f64(is);
    if (!is || members < 0) throw IoError(path + ": corrupt header");

    DspnFile out;
    out.grid = SpatialGrid(static_cast<int>(d), static_cast<int>(n), L, txi);
    out.t = t;
    out.state.epsilon = eps;
    for (std::int64_t j = 0; j < members; ++j) {
        MixedMember m;
        m.weight = get_f64(is);
        m.psi = SpinorField(out.grid, eps);
        is.read(reinterpret_cast<char*>(m.psi.values.data()),
                static_cast<std::streamsize>(m.psi.values.size() * sizeof(Complex)));
        if (!is) throw IoError(path + ": truncated member data");
        out.state.members.push_back(std::move(m));
    }
    return out;
}

}  // namespace dlab
