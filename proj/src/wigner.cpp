#include "dlab/wigner.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "dlab/errors.hpp"
#include "dlab/fft.hpp"
#include "dlab/symbol.hpp"

namespace dlab {

namespace {

const Complex I(0.0, 1.0);

int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

/// xi vector at a phase-space node: active component from the lattice,
/// inactive components frozen at transverse_xi.
Vec3 full_xi(const PhaseSpaceGrid& g, int ixi) {
    Vec3 xi = g.space.transverse_xi;
    xi[0] = g.xi_value(ixi);
    return xi;
}

Vec3 full_x(const WignerField& W, int ix) { return Vec3(W.x_value(ix), 0.0, 0.0); }

void require_1d(const WignerField& W) {
    if (W.grid.space.d != 1)
        throw DimensionError("operation requires a d=1 phase-space field or slice");
}

}  // namespace

WignerField::WignerField(const PhaseSpaceGrid& g, double time) : grid(g), t(time) {
    values.assign(16 * g.space.size() * static_cast<std::size_t>(g.space.n), Complex(0.0, 0.0));
    if (g.space.d != 1)
        throw DimensionError("full WignerFields are materialized for d=1 only; use wigner_slice");
}

Mat4 WignerField::at(int ix, int ixi) const {
    Mat4 m;
    const Complex* p = values.data() + node(ix, ixi);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = p[4 * r + c];
    return m;
}

void WignerField::set(int ix, int ixi, const Mat4& m) {
    Complex* p = values.data() + node(ix, ixi);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) p[4 * r + c] = m(r, c);
}

double WignerField::mass() const {
    double s = 0.0;
    const int nn = n();
    for (int ix = 0; ix < nn; ++ix)
        for (int ixi = 0; ixi < nn; ++ixi) {
            const Complex* p = values.data() + node(ix, ixi);
            s += std::real(p[0] + p[5] + p[10] + p[15]);
        }
    return s * grid.space.spacing() * grid.dxi();
}

double WignerField::l2_norm() const {
    double s = 0.0;
    for (const Complex& c : values) s += std::norm(c);
    return std::sqrt(s * grid.space.spacing() * grid.dxi());
}

double WignerField::max_hermiticity_defect() const {
    double worst = 0.0;
    const int nn = n();
    for (int ix = 0; ix < nn; ++ix)
        for (int ixi = 0; ixi < nn; ++ixi) {
            const Mat4 m = at(ix, ixi);
            worst = std::max(worst, max_abs(Mat4(m - m.adjoint())));
        }
    return worst;
}

WignerField wigner_transform(const SpinorField& psi) {
    if (psi.grid.d != 1)
        throw DimensionError("wigner_transform materializes full fields for d=1 only");
    const int n = psi.grid.n;
    PhaseSpaceGrid pg(psi.grid, psi.epsilon);
    WignerField W(pg);
    FftPlan plan({n}, 16, 16, 1, kFftForward);
    std::vector<Complex> row(16 * static_cast<std::size_t>(n));
    const double scale = pg.dy() / (2.0 * M_PI);
    for (int l = 0; l < n; ++l) {
        for (int j = 0; j < n; ++j) {
            const Complex* a = psi.at(wrap(l + j, n));
            const Complex* b = psi.at(wrap(l - j, n));
            Complex* dst = row.data() + 16 * j;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) dst[4 * r + c] = a[r] * std::conj(b[c]);
        }
        plan.execute(row.data());
        Complex* out = W.values.data() + W.node(l, 0);
        for (std::size_t i = 0; i < row.size(); ++i) out[i] = scale * row[i];
    }
    return W;
}

WignerField wigner_transform(const MixedState& state, double t) {
    if (state.members.empty()) throw ConfigError("empty mixed state");
    const SpatialGrid& g = state.members.front().psi.grid;
    WignerField W(PhaseSpaceGrid(g, state.epsilon), t);
    for (const auto& m : state.members) {
        if (!m.psi.grid.compatible(g)) throw DimensionError("mixed-state members on unequal grids");
        const WignerField Wm = wigner_transform(m.psi);
        for (std::size_t i = 0; i < W.values.size(); ++i) W.values[i] += m.weight * Wm.values[i];
    }
    W.t = t;
    return W;
}

WignerField wigner_slice(const SpinorField& psi, const SliceSpec& slice) {
    const int d = psi.grid.d;
    if (d == 1) return wigner_transform(psi);
    const int n = psi.grid.n;
    SpatialGrid line(1, n, psi.grid.L, psi.grid.transverse_xi);
    PhaseSpaceGrid pg(line, psi.epsilon);
    WignerField W(pg);

    FftPlan plan({n}, 16, 16, 1, kFftForward);
    std::vector<Complex> row(16 * static_cast<std::size_t>(n));
    const double dy = pg.dy();
    const double scale = std::pow(dy / (2.0 * M_PI), d);

    auto node_of = [&](int i0, int i1, int i2) {
        std::size_t idx = static_cast<std::size_t>(wrap(i0, n));
        idx = idx * n + wrap(i1, n);
        if (d == 3) idx = idx * n + wrap(i2, n);
        return idx;
    };

    const int n2 = n;
    const int n3 = d == 3 ? n : 1;
    for (int l = 0; l < n; ++l) {
        std::fill(row.begin(), row.end(), Complex(0.0, 0.0));
        for (int j1 = 0; j1 < n; ++j1) {
            Mat4 acc = Mat4::Zero();
            for (int j2 = 0; j2 < n2; ++j2) {
                const double y2 = dy * psi.grid.freq(j2);
                const Complex ph2 = std::exp(-I * (slice.xi_fixed[0] * y2));
                for (int j3 = 0; j3 < n3; ++j3) {
                    Complex ph = ph2;
                    if (d == 3) {
                        const double y3 = dy * psi.grid.freq(j3);
                        ph *= std::exp(-I * (slice.xi_fixed[1] * y3));
                    }
                    const Complex* a = psi.at(node_of(l + j1, slice.x_index[0] + j2,
                                                      slice.x_index[1] + j3));
                    const Complex* b = psi.at(node_of(l - j1, slice.x_index[0] - j2,
                                                      slice.x_index[1] - j3));
                    for (int r = 0; r < 4; ++r)
                        for (int c = 0; c < 4; ++c) acc(r, c) += ph * a[r] * std::conj(b[c]);
                }
            }
            Complex* dst = row.data() + 16 * j1;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) dst[4 * r + c] = acc(r, c);
        }
        plan.execute(row.data());
        Complex* out = W.values.data() + W.node(l, 0);
        for (std::size_t i = 0; i < row.size(); ++i) out[i] = scale * row[i];
    }
    return W;
}

WignerMoments moments(const WignerField& W) {
    require_1d(W);
    const int n = W.n();
    WignerMoments m;
    m.rho.assign(n, 0.0);
    m.J.assign(n, {0.0, 0.0, 0.0});
    m.w_trace_mass.assign(n, 0.0);
    const double dxi = W.grid.dxi();
    for (int ix = 0; ix < n; ++ix) {
        for (int ixi = 0; ixi < n; ++ixi) {
            const Mat4 w = W.at(ix, ixi);
            m.rho[ix] += dxi * std::real(w.trace());
            for (int k = 0; k < 3; ++k)
                m.J[ix][k] += dxi * std::real((alpha(k) * w).trace());
        }
        m.w_trace_mass[ix] = m.rho[ix];
    }
    return m;
}

SpeciesSplit project_species(const WignerField& W, const PotentialModel& model) {
    require_1d(W);
    const int n = W.n();
    SpeciesSplit out{WignerField(W.grid, W.t), WignerField(W.grid, W.t), {}, {}, 0.0};
    out.f_plus.assign(static_cast<std::size_t>(n) * n, 0.0);
    out.f_minus.assign(static_cast<std::size_t>(n) * n, 0.0);
    double cross = 0.0;
    for (int ix = 0; ix < n; ++ix) {
        for (int ixi = 0; ixi < n; ++ixi) {
            PhasePoint p{W.t, full_x(W, ix), full_xi(W.grid, ixi)};
            const SymbolEval e = eval_symbol(model, p);
            const Mat4 w = W.at(ix, ixi);
            const Mat4 wp = e.Pi_plus * w * e.Pi_plus;
            const Mat4 wm = e.Pi_minus * w * e.Pi_minus;
            out.W_plus.set(ix, ixi, wp);
            out.W_minus.set(ix, ixi, wm);
            out.f_plus[static_cast<std::size_t>(ix) * n + ixi] = std::real(wp.trace());
            out.f_minus[static_cast<std::size_t>(ix) * n + ixi] = std::real(wm.trace());
            cross += std::abs((e.Pi_plus * w * e.Pi_minus + e.Pi_minus * w * e.Pi_plus).trace());
        }
    }
    out.offdiag_mass = cross * W.grid.space.spacing() * W.grid.dxi();
    return out;
}

double constraint_norm(const WignerField& W, const PotentialModel& model) {
    require_1d(W);
    const int n = W.n();
    double num = 0.0, den = 0.0;
    for (int ix = 0; ix < n; ++ix)
        for (int ixi = 0; ixi < n; ++ixi) {
            PhasePoint p{W.t, full_x(W, ix), full_xi(W.grid, ixi)};
            const SymbolEval e = eval_symbol(model, p);
            const Mat4 w = W.at(ix, ixi);
            num += commutator(e.P, w).squaredNorm();
            den += w.squaredNorm();
        }
    if (den == 0.0) return 0.0;
    return std::sqrt(num / den);
}

WignerField apply_pdo(PdoKind kind, const std::function<double(double)>& g,
                      const WignerField& f) {
    require_1d(f);
    const int n = f.n();
    const double eps = f.grid.epsilon;
    const double dx = f.grid.space.spacing();
    WignerField out(f.grid, f.t);
    FftPlan fwd({n}, 16, 16, 1, kFftForward);
    FftPlan bwd({n}, 16, 16, 1, kFftBackward);
    std::vector<Complex> row(16 * static_cast<std::size_t>(n));
    for (int ix = 0; ix < n; ++ix) {
        std::copy(f.values.begin() + f.node(ix, 0), f.values.begin() + f.node(ix, 0) + row.size(),
                  row.begin());
        bwd.execute(row.data());  // xi -> y, unnormalized
        const double x = f.x_value(ix);
        const double g0 = g(x);
        for (int j = 0; j < n; ++j) {
            // eps*y_j/2 = dx * freq(j); g sampled at unwrapped physical points
            const double off = dx * f.grid.space.freq(j);
            const double gp = g(x + off);
            const double gm = g(x - off);
            Complex s;
            switch (kind) {
                case PdoKind::Theta: s = (gp - gm) / (I * eps); break;
                case PdoKind::Tau: s = 0.5 * (gp + gm); break;
                case PdoKind::Delta: s = (gp - 2.0 * g0 + gm) / (2.0 * I * eps * eps); break;
            }
            // the unpaired Nyquist bin takes the symmetrized (zero) value for the
            // imaginary symbols, so hermiticity is preserved exactly
            if (kind != PdoKind::Tau && 2 * f.grid.space.freq(j) == -n) s = 0.0;
            const Complex m = s / static_cast<double>(n);  // fold in DFT normalization
            Complex* p = row.data() + 16 * j;
            for (int c = 0; c < 16; ++c) p[c] *= m;
        }
        fwd.execute(row.data());
        std::copy(row.begin(), row.end(), out.values.begin() + out.node(ix, 0));
    }
    return out;
}

WignerField dxi_field(const WignerField& W) {
    require_1d(W);
    const int n = W.n();
    WignerField out(W.grid, W.t);
    FftPlan fwd({n}, 16, 16, 1, kFftForward);
    FftPlan bwd({n}, 16, 16, 1, kFftBackward);
    std::vector<Complex> row(16 * static_cast<std::size_t>(n));
    for (int ix = 0; ix < n; ++ix) {
        std::copy(W.values.begin() + W.node(ix, 0), W.values.begin() + W.node(ix, 0) + row.size(),
                  row.begin());
        bwd.execute(row.data());
        for (int j = 0; j < n; ++j) {
            // zero the unpaired Nyquist bin (symmetrized derivative, hermitian)
            const Complex m = 2 * W.grid.space.freq(j) == -n
                                  ? Complex(0.0, 0.0)
                                  : -I * W.grid.y_value(j) / static_cast<double>(n);
            Complex* p = row.data() + 16 * j;
            for (int c = 0; c < 16; ++c) p[c] *= m;
        }
        fwd.execute(row.data());
        std::copy(row.begin(), row.end(), out.values.begin() + out.node(ix, 0));
    }
    return out;
}

WignerField mollify_xi(const WignerField& W, double sigma) {
    require_1d(W);
    const int n = W.n();
    WignerField out(W.grid, W.t);
    FftPlan fwd({n}, 16, 16, 1, kFftForward);
    FftPlan bwd({n}, 16, 16, 1, kFftBackward);
    std::vector<Complex> row(16 * static_cast<std::size_t>(n));
    for (int ix = 0; ix < n; ++ix) {
        std::copy(W.values.begin() + W.node(ix, 0), W.values.begin() + W.node(ix, 0) + row.size(),
                  row.begin());
        bwd.execute(row.data());
        for (int j = 0; j < n; ++j) {
            const double y = W.grid.y_value(j);
            const double m = std::exp(-0.5 * sigma * sigma * y * y) / static_cast<double>(n);
            Complex* p = row.data() + 16 * j;
            for (int c = 0; c < 16; ++c) p[c] *= m;
        }
        fwd.execute(row.data());
        std::copy(row.begin(), row.end(), out.values.begin() + out.node(ix, 0));
    }
    return out;
}

WignerField dx_field(const WignerField& W) {
    require_1d(W);
    const int n = W.n();
    WignerField out = W;
    // transform along ix: stride n*16, one transform per (ixi, component)
    FftPlan fwd({n}, 16 * n, 16 * n, 1, kFftForward);
    FftPlan bwd({n}, 16 * n, 16 * n, 1, kFftBackward);
    fwd.execute(out.values.data());
    for (int l = 0; l < n; ++l) {
        const Complex m = 2 * W.grid.space.freq(l) == -n
                              ? Complex(0.0, 0.0)
                              : I * (2.0 * M_PI * W.grid.space.freq(l) / W.grid.space.L) /
                                    static_cast<double>(n);
        Complex* p = out.values.data() + out.node(l, 0);
        for (std::size_t c = 0; c < 16 * static_cast<std::size_t>(n); ++c) p[c] *= m;
    }
    bwd.execute(out.values.data());
    return out;
}

namespace {

WignerField pointwise_bracket(const WignerField& W, BracketSign sign, const Mat4& M) {
    WignerField out(W.grid, W.t);
    const int n = W.n();
    for (int ix = 0; ix < n; ++ix)
        for (int ixi = 0; ixi < n; ++ixi) out.set(ix, ixi, bracket(M, W.at(ix, ixi), sign));
    return out;
}

void axpy(WignerField& y, double a, const WignerField& x) {
    for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += a * x.values[i];
}

}  // namespace

WignerField remainder(const WignerField& W, const PotentialModel& model) {
    require_1d(W);
    const int n = W.n();
    const double eps = W.grid.epsilon;
    WignerField r(W.grid, W.t);
    if (model.preset() == PotentialPreset::Zero) return r;

    // cached potential data along the line
    std::vector<PotentialDerivs> pd(n);
    for (int ix = 0; ix < n; ++ix) pd[ix] = model.eval(W.t, full_x(W, ix));

    const double t = W.t;
    for (int k = 0; k < 3; ++k) {
        bool active = false;
        for (int ix = 0; ix < n; ++ix)
            if (pd[ix].A[k] != 0.0 || pd[ix].grad_A(0, k) != 0.0) { active = true; break; }
        if (!active) continue;
        auto Ak = [&model, t, k](double x) { return model.eval(t, Vec3(x, 0.0, 0.0)).A[k]; };
        const WignerField comm = pointwise_bracket(W, BracketSign::Commutator, alpha(k));
        const WignerField anti = pointwise_bracket(W, BracketSign::Anticommutator, alpha(k));
        axpy(r, -eps, apply_pdo(PdoKind::Delta, Ak, comm));
        const WignerField danti = dxi_field(anti);
        for (int ix = 0; ix < n; ++ix) {
            const double slope = pd[ix].grad_A(0, k);
            Complex* dst = r.values.data() + r.node(ix, 0);
            const Complex* src = danti.values.data() + danti.node(ix, 0);
            for (std::size_t c = 0; c < 16 * static_cast<std::size_t>(n); ++c)
                dst[c] += 0.5 * slope * src[c];
        }
        axpy(r, -0.5, apply_pdo(PdoKind::Theta, Ak, anti));
    }

    bool a0_active = false;
    for (int ix = 0; ix < n; ++ix)
        if (pd[ix].A0 != 0.0 || pd[ix].grad_A0[0] != 0.0) { a0_active = true; break; }
    if (a0_active) {
        auto A0 = [&model, t](double x) { return model.eval(t, Vec3(x, 0.0, 0.0)).A0; };
        const WignerField dW = dxi_field(W);
        for (int ix = 0; ix < n; ++ix) {
            const double slope = pd[ix].grad_A0[0];
            Complex* dst = r.values.data() + r.node(ix, 0);
            const Complex* src = dW.values.data() + dW.node(ix, 0);
            for (std::size_t c = 0; c < 16 * static_cast<std::size_t>(n); ++c)
                dst[c] += slope * src[c];
        }
        axpy(r, -1.0, apply_pdo(PdoKind::Theta, A0, W));
    }
    return r;
}

WignerField wigner_rhs(const WignerField& W, const PotentialModel& model, bool with_remainder) {
    require_1d(W);
    const int n = W.n();
    const double eps = W.grid.epsilon;
    const WignerField dW_dx = dx_field(W);
    const WignerField dW_dxi = dxi_field(W);
    WignerField rhs = with_remainder ? remainder(W, model) : WignerField(W.grid, W.t);
    for (int ix = 0; ix < n; ++ix) {
        const PotentialDerivs pd = model.eval(W.t, full_x(W, ix));
        const Vec3 dA = pd.grad_A.row(0);
        const Mat4 dxP = -alpha_dot(dA) - pd.grad_A0[0] * Mat4::Identity();
        for (int ixi = 0; ixi < n; ++ixi) {
            PhasePoint p{W.t, full_x(W, ix), full_xi(W.grid, ixi)};
            const SymbolEval e = eval_symbol(model, p);
            const Mat4 w = W.at(ix, ixi);
            const Mat4 wx = dW_dx.at(ix, ixi);
            const Mat4 wxi = dW_dxi.at(ix, ixi);
            Mat4 val = (-I / eps) * commutator(e.P, w);
            // 1/2 ({P,W} - {W,P}) = 1/2 ({dxP, dxiW}_+ - {dxiP, dxW}_+), d=1
            val += 0.5 * (anticommutator(dxP, wxi) - anticommutator(alpha(0), wx));
            const std::size_t base = rhs.node(ix, ixi);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) rhs.values[base + 4 * r + c] += val(r, c);
        }
    }
    return rhs;
}

double dirac_wigner_residual(const WignerField& W_prev, const WignerField& W_mid,
                             const WignerField& W_next, const PotentialModel& model, double dt,
                             bool with_remainder) {
    require_1d(W_mid);
    const WignerField rhs = wigner_rhs(W_mid, model, with_remainder);
    double s = 0.0;
    for (std::size_t i = 0; i < rhs.values.size(); ++i) {
        const Complex dWdt = (W_next.values[i] - W_prev.values[i]) / (2.0 * dt);
        s += std::norm(dWdt - rhs.values[i]);
    }
    return std::sqrt(s * W_mid.grid.space.spacing() * W_mid.grid.dxi());
}

LagrangeY lagrange_multiplier_Y(const WignerField& W, const PotentialModel& model) {
    require_1d(W);
    const int n = W.n();
    const WignerField dW_dx = dx_field(W);
    const WignerField dW_dxi = dxi_field(W);
    LagrangeY out{WignerField(W.grid, W.t), 0.0, 0.0, 0.0, 0.0};
    double np = 0.0, nm = 0.0, nh = 0.0, ny = 0.0;
    for (int ix = 0; ix < n; ++ix) {
        const PotentialDerivs pd = model.eval(W.t, full_x(W, ix));
        const Vec3 dA = pd.grad_A.row(0);
        const Mat4 dxP = -alpha_dot(dA) - pd.grad_A0[0] * Mat4::Identity();
        const Mat4 dtP = -alpha_dot(pd.dt_A) - pd.dt_A0 * Mat4::Identity();
        for (int ixi = 0; ixi < n; ++ixi) {
            PhasePoint p{W.t, full_x(W, ix), full_xi(W.grid, ixi)};
            const SymbolEval e = eval_symbol(model, p);
            const Mat4 w = W.at(ix, ixi);
            const Mat4 brkt = anticommutator(dxP, dW_dxi.at(ix, ixi)) -
                              anticommutator(alpha(0), dW_dx.at(ix, ixi));
            const Mat4 y = I * (commutator(dtP, w) - 0.5 * commutator(e.P, brkt)) /
                           (4.0 * e.gamma * e.gamma);
            out.Y.set(ix, ixi, y);
            ny += y.squaredNorm();
            np += (e.Pi_plus * y * e.Pi_plus).squaredNorm();
            nm += (e.Pi_minus * y * e.Pi_minus).squaredNorm();
            nh += Mat4(y - y.adjoint()).squaredNorm();
        }
    }
    const double cell = W.grid.space.spacing() * W.grid.dxi();
    out.norm_Y = std::sqrt(ny * cell);
    out.norm_diag_plus = std::sqrt(np * cell);
    out.norm_diag_minus = std::sqrt(nm * cell);
    out.herm_defect = std::sqrt(nh * cell);
    return out;
}

namespace {
constexpr char kDwigMagic[8] = {'D', 'W', 'I', 'G', 'v', '1', 0, 0};
}

void write_dwig(const std::string& path, const WignerField& W) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp + " for writing");
        os.write(kDwigMagic, 8);
        const std::int64_t d = W.grid.space.d, n = W.grid.space.n;
        os.write(reinterpret_cast<const char*>(&d), 8);
        os.write(reinterpret_cast<const char*>(&n), 8);
        const double hdr[3] = {W.grid.space.L, W.grid.epsilon, W.t};
        os.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
        for (int a = 0; a < 3; ++a) {
            const double v = W.grid.space.transverse_xi[a];
            os.write(reinterpret_cast<const char*>(&v), 8);
        }
        os.write(reinterpret_cast<const char*>(W.values.data()),
                 static_cast<std::streamsize>(W.values.size() * sizeof(Complex)));
        if (!os) throw IoError("write failure on " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot rename " + tmp + " to " + path);
}

WignerField read_dwig(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kDwigMagic, 8) != 0) throw IoError(path + " is not a DWIG file");
    std::int64_t d = 0, n = 0;
    is.read(reinterpret_cast<char*>(&d), 8);
    is.read(reinterpret_cast<char*>(&n), 8);
    double hdr[3];
    is.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
    Vec3 txi;
    for (int a = 0; a < 3; ++a) is.read(reinterpret_cast<char*>(&txi[a]), 8);
    if (!is || d != 1) throw IoError(path + ": corrupt or unsupported DWIG header");
    SpatialGrid g(1, static_cast<int>(n), hdr[0], txi);
    WignerField W(PhaseSpaceGrid(g, hdr[1]), hdr[2]);
    is.read(reinterpret_cast<char*>(W.values.data()),
            static_cast<std::streamsize>(W.values.size() * sizeof(Complex)));
    if (!is) throw IoError(path + ": truncated data");
    return W;
}

}  // namespace dlab
