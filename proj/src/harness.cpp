#include "dlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "dlab/errors.hpp"
#include "dlab/symbol.hpp"
#include "dlab/vlasov.hpp"
#include "dlab/wigner.hpp"

namespace dlab {

namespace {

const Complex I(0.0, 1.0);

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------- identities

PotentialModel suite_model() {
    std::map<std::string, std::vector<double>> params;
    params["amp"] = {0.3, -0.2, 0.5};
    params["k_hat"] = {1.0, 0.5, -0.3};
    params["width"] = {0.7};
    params["t0"] = {0.1};
    params["tau"] = {0.8};
    params["a0_amp"] = {0.4};
    return PotentialModel::from_config("time_pulse", params, 3);
}

PhasePoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PhasePoint p;
    p.t = 0.5 * u(rng);
    for (int a = 0; a < 3; ++a) {
        p.x[a] = u(rng);
        p.xi[a] = u(rng);
    }
    return p;
}

Vec3 random_vec(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return Vec3(u(rng), u(rng), u(rng));
}

Mat4 random_mat(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = Complex(u(rng), u(rng));
    return m;
}

/// Scalar phase function s(p) = sin(u.x + w.xi + c) with analytic derivatives.
struct ScalarWave {
    Vec3 u, w;
    double c;
    double value(const PhasePoint& p) const { return std::sin(u.dot(p.x) + w.dot(p.xi) + c); }
    double dx(const PhasePoint& p, int k) const {
        return u[k] * std::cos(u.dot(p.x) + w.dot(p.xi) + c);
    }
    double dxi(const PhasePoint& p, int k) const {
        return w[k] * std::cos(u.dot(p.x) + w.dot(p.xi) + c);
    }
};

MatrixPhaseFunction wave_function(const Mat4& M, const ScalarWave& s) {
    MatrixPhaseFunction f;
    f.value = [M, s](const PhasePoint& p) { return Mat4(s.value(p) * M); };
    f.dx = [M, s](const PhasePoint& p, int k) { return Mat4(s.dx(p, k) * M); };
    f.dxi = [M, s](const PhasePoint& p, int k) { return Mat4(s.dxi(p, k) * M); };
    return f;
}

MatrixPhaseFunction product_function(const MatrixPhaseFunction& A, const MatrixPhaseFunction& B) {
    MatrixPhaseFunction f;
    f.value = [A, B](const PhasePoint& p) { return Mat4(A.value(p) * B.value(p)); };
    f.dx = [A, B](const PhasePoint& p, int k) {
        return Mat4(A.dx(p, k) * B.value(p) + A.value(p) * B.dx(p, k));
    };
    f.dxi = [A, B](const PhasePoint& p, int k) {
        return Mat4(A.dxi(p, k) * B.value(p) + A.value(p) * B.dxi(p, k));
    };
    return f;
}

struct DerivPack {
    std::array<Mat4, 3> dx_Pi, dxi_Pi;
    Mat4 dt_Pi;
    std::array<double, 3> dx_l, dxi_l;
};

DerivPack pack(const SymbolDerivs& d, int species) {
    DerivPack o;
    if (species == 1) {
        o.dx_Pi = d.dx_Pi_plus;
        o.dxi_Pi = d.dxi_Pi_plus;
        o.dt_Pi = d.dt_Pi_plus;
        o.dx_l = d.dx_lambda_plus;
        o.dxi_l = d.dxi_lambda_plus;
    } else {
        o.dx_Pi = d.dx_Pi_minus;
        o.dxi_Pi = d.dxi_Pi_minus;
        o.dt_Pi = d.dt_Pi_minus;
        o.dx_l = d.dx_lambda_minus;
        o.dxi_l = d.dxi_lambda_minus;
    }
    return o;
}

using CheckFn = std::function<double()>;

}  // namespace

std::vector<IdentityResult> run_identity_suite(bool perturb_alpha1) {
    std::vector<IdentityResult> report;
    const PotentialModel model = suite_model();
    const int samples = 100;

    // local copies so the fault-injection fixture can perturb alpha1 without
    // touching the shared matrices
    Mat4 al[3] = {alpha(0), alpha(1), alpha(2)};
    if (perturb_alpha1) al[0](0, 1) += 0.01;
    const Mat4 beta = dirac_matrix(DiracKind::Beta);
    const Mat4 g5 = dirac_matrix(DiracKind::Gamma5);
    const Mat4 id = Mat4::Identity();
    auto levi = [](int j, int k, int m) {
        return ((j - k) * (k - m) * (m - j)) / 2;  // epsilon_jkm for indices 0..2
    };

    auto add = [&report](const std::string& name, double tol, const CheckFn& fn) {
        IdentityResult r;
        r.name = name;
        r.tol = tol;
        r.max_err = fn();
        r.pass = r.max_err <= tol;
        report.push_back(r);
    };

    add("anticommutation {alpha_j, alpha_k} = 2 delta_jk", 1e-10, [&] {
        double e = 0.0;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                e = std::max(e, max_abs(Mat4(anticommutator(al[j], al[k]) -
                                             (j == k ? 2.0 : 0.0) * id)));
        return e;
    });
    add("beta: beta^2 = I and {alpha_k, beta} = 0", 1e-10, [&] {
        double e = max_abs(Mat4(beta * beta - id));
        for (int k = 0; k < 3; ++k) e = std::max(e, max_abs(anticommutator(al[k], beta)));
        return e;
    });
    add("product rule alpha_j alpha_k = delta_jk + i gamma5 eps_jkm alpha_m", 1e-10, [&] {
        double e = 0.0;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                Mat4 rhs = (j == k ? 1.0 : 0.0) * id;
                for (int m = 0; m < 3; ++m)
                    rhs += I * static_cast<double>(levi(j, k, m)) * g5 * al[m];
                e = std::max(e, max_abs(Mat4(al[j] * al[k] - rhs)));
            }
        return e;
    });
    add("gamma5 = -i alpha1 alpha2 alpha3, squares to I, commutes/anticommutes", 1e-10, [&] {
        const Mat4 g = -I * al[0] * al[1] * al[2];
        double e = max_abs(Mat4(g - g5));
        e = std::max(e, max_abs(Mat4(g5 * g5 - id)));
        for (int k = 0; k < 3; ++k) e = std::max(e, max_abs(commutator(g5, al[k])));
        e = std::max(e, max_abs(anticommutator(g5, beta)));
        return e;
    });

    std::mt19937_64 rng(20240803);
    add("[alpha.a, alpha.b] = 2i gamma5 alpha.(a x b)", 1e-10, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const Vec3 a = random_vec(rng), b = random_vec(rng);
            e = std::max(e, max_abs(Mat4(commutator(alpha_dot(a), alpha_dot(b)) -
                                         2.0 * I * g5 * alpha_dot(a.cross(b)))));
        }
        return e;
    });
    add("{alpha.a, alpha.b} = 2 (a.b) I", 1e-10, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const Vec3 a = random_vec(rng), b = random_vec(rng);
            e = std::max(e, max_abs(Mat4(anticommutator(alpha_dot(a), alpha_dot(b)) -
                                         2.0 * a.dot(b) * id)));
        }
        return e;
    });
    add("[P0, alpha.a] = 2i gamma5 alpha.(v x a) + 2 beta alpha.a", 1e-10, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const PhasePoint p = random_point(rng);
            const Vec3 a = random_vec(rng);
            const SymbolEval ev = eval_symbol(model, p);
            e = std::max(e, max_abs(Mat4(commutator(ev.P0, alpha_dot(a)) -
                                         2.0 * I * g5 * alpha_dot(ev.v.cross(a)) -
                                         2.0 * beta * alpha_dot(a))));
        }
        return e;
    });
    add("projector laws: S^2 = I, Pi idempotent, complementary, Hermitian", 1e-10, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const SymbolEval ev = eval_symbol(model, random_point(rng));
            e = std::max(e, max_abs(Mat4(ev.S * ev.S - id)));
            e = std::max(e, max_abs(Mat4(ev.Pi_plus * ev.Pi_plus - ev.Pi_plus)));
            e = std::max(e, max_abs(Mat4(ev.Pi_minus * ev.Pi_minus - ev.Pi_minus)));
            e = std::max(e, max_abs(Mat4(ev.Pi_plus * ev.Pi_minus)));
            e = std::max(e, max_abs(Mat4(ev.Pi_plus + ev.Pi_minus - id)));
            e = std::max(e, max_abs(Mat4(ev.Pi_plus - ev.Pi_plus.adjoint())));
        }
        return e;
    });
    add("spectral recomposition P = lambda+ Pi+ + lambda- Pi-", 1e-12, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const SymbolEval ev = eval_symbol(model, random_point(rng));
            e = std::max(e, max_abs(Mat4(ev.P - ev.lambda_plus * ev.Pi_plus -
                                         ev.lambda_minus * ev.Pi_minus)));
        }
        return e;
    });
    add("symbol derivatives vs central finite differences (h = 1e-4)", 1e-6, [&] {
        double worst = 0.0;
        const double h = 1e-4;
        for (int s = 0; s < samples; ++s) {
            const PhasePoint p = random_point(rng);
            const SymbolDerivs d = symbol_derivatives(model, p);
            auto fd = [&](auto&& get, auto&& shift) {
                PhasePoint pp = p, pm = p;
                shift(pp, h);
                shift(pm, -h);
                return ((get(eval_symbol(model, pp)) - get(eval_symbol(model, pm))) / (2.0 * h))
                    .eval();
            };
            auto rel = [&](const Mat4& got, const Mat4& ref) {
                return max_abs(Mat4(got - ref)) / std::max(1.0, max_abs(ref));
            };
            for (int k = 0; k < 3; ++k) {
                auto sx = [k](PhasePoint& q, double dh) { q.x[k] += dh; };
                auto sxi = [k](PhasePoint& q, double dh) { q.xi[k] += dh; };
                worst = std::max(worst, rel(d.dx_Pi_plus[k],
                                            fd([](const SymbolEval& e) { return e.Pi_plus; }, sx)));
                worst = std::max(worst, rel(d.dxi_Pi_minus[k],
                                            fd([](const SymbolEval& e) { return e.Pi_minus; }, sxi)));
                worst = std::max(worst, rel(d.dx_P0[k],
                                            fd([](const SymbolEval& e) { return e.P0; }, sx)));
                worst = std::max(worst, rel(d.dxi_P0[k],
                                            fd([](const SymbolEval& e) { return e.P0; }, sxi)));
                worst = std::max(
                    worst, rel(Mat4(d.dx_lambda_plus[k] * id),
                               fd([&id](const SymbolEval& e) { return Mat4(e.lambda_plus * id); }, sx)));
                worst = std::max(
                    worst,
                    rel(Mat4(d.dxi_lambda_minus[k] * id),
                        fd([&id](const SymbolEval& e) { return Mat4(e.lambda_minus * id); }, sxi)));
            }
            auto st = [](PhasePoint& q, double dh) { q.t += dh; };
            worst = std::max(worst, rel(d.dt_Pi_plus,
                                        fd([](const SymbolEval& e) { return e.Pi_plus; }, st)));
            worst = std::max(worst,
                             rel(d.dt_P, fd([](const SymbolEval& e) { return e.P; }, st)));
        }
        return worst;
    });
    add("finite-difference error is order 2 (halving ratio in [3, 5])", 1.0, [&] {
        // returns |ratio - 4| / 4 as the error measure, tol 1 keeps [0, 8] wide,
        // the pass band below enforces [3, 5]
        double e_h = 0.0, e_h2 = 0.0;
        const double h = 1e-2;
        for (int s = 0; s < 20; ++s) {
            const PhasePoint p = random_point(rng);
            const SymbolDerivs d = symbol_derivatives(model, p);
            for (double step : {h, 0.5 * h}) {
                PhasePoint pp = p, pm = p;
                pp.x[0] += step;
                pm.x[0] -= step;
                const Mat4 fd = (eval_symbol(model, pp).Pi_plus -
                                 eval_symbol(model, pm).Pi_plus) /
                                (2.0 * step);
                const double err = max_abs(Mat4(fd - d.dx_Pi_plus[0]));
                (step == h ? e_h : e_h2) = std::max(step == h ? e_h : e_h2, err);
            }
        }
        const double ratio = e_h / std::max(e_h2, 1e-300);
        return (ratio >= 3.0 && ratio <= 5.0) ? 0.0 : std::abs(ratio - 4.0);
    });
    add("projection-derivation: Pi (D Pi) Pi = 0", 1e-10, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const PhasePoint p = random_point(rng);
            const SymbolEval ev = eval_symbol(model, p);
            const SymbolDerivs d = symbol_derivatives(model, p);
            for (int sp : {1, -1}) {
                const Mat4& Pi = sp == 1 ? ev.Pi_plus : ev.Pi_minus;
                const DerivPack dp = pack(d, sp);
                for (int k = 0; k < 3; ++k) {
                    e = std::max(e, max_abs(Mat4(Pi * dp.dx_Pi[k] * Pi)));
                    e = std::max(e, max_abs(Mat4(Pi * dp.dxi_Pi[k] * Pi)));
                }
                e = std::max(e, max_abs(Mat4(Pi * dp.dt_Pi * Pi)));
            }
        }
        return e;
    });
    add("complementary projection: Pi1 (D Pi2) Pi1 = 0", 1e-10, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const PhasePoint p = random_point(rng);
            const SymbolEval ev = eval_symbol(model, p);
            const SymbolDerivs d = symbol_derivatives(model, p);
            for (int k = 0; k < 3; ++k) {
                e = std::max(e, max_abs(Mat4(ev.Pi_plus * d.dx_Pi_minus[k] * ev.Pi_plus)));
                e = std::max(e, max_abs(Mat4(ev.Pi_minus * d.dxi_Pi_plus[k] * ev.Pi_minus)));
            }
            e = std::max(e, max_abs(Mat4(ev.Pi_plus * d.dt_Pi_minus * ev.Pi_plus)));
        }
        return e;
    });
    add("compression: Pi (D W) Pi = D(Pi W Pi) - [Pi W, [Pi, D Pi]]", 1e-10, [&] {
        double e = 0.0;
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int s = 0; s < samples; ++s) {
            const PhasePoint p = random_point(rng);
            const SymbolEval ev = eval_symbol(model, p);
            const SymbolDerivs d = symbol_derivatives(model, p);
            const Complex cp(u(rng), u(rng)), cm(u(rng), u(rng));
            // W = cp Pi+ + cm Pi- commutes with both projections
            const Mat4 DW = cp * d.dx_Pi_plus[0] + cm * d.dx_Pi_minus[0];
            for (int sp : {1, -1}) {
                const Mat4& Pi = sp == 1 ? ev.Pi_plus : ev.Pi_minus;
                const Mat4 DPi = sp == 1 ? d.dx_Pi_plus[0] : d.dx_Pi_minus[0];
                const Complex cs = sp == 1 ? cp : cm;
                const Mat4 lhs = Pi * DW * Pi;
                const Mat4 rhs = cs * DPi - commutator(Mat4(cs * Pi), commutator(Pi, DPi));
                e = std::max(e, max_abs(Mat4(lhs - rhs)));
            }
        }
        return e;
    });
    add("[S, [S, A]] = 4A on block-off-diagonal A", 1e-10, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const SymbolEval ev = eval_symbol(model, random_point(rng));
            const Mat4 B = random_mat(rng), C = random_mat(rng);
            const Mat4 A = ev.Pi_plus * B * ev.Pi_minus + ev.Pi_minus * C * ev.Pi_plus;
            e = std::max(e, max_abs(Mat4(commutator(ev.S, commutator(ev.S, A)) - 4.0 * A)));
        }
        return e;
    });
    add("intertwining: Pi+- alpha_k - alpha_k Pi-+ = +- (v_k/<v>) I", 1e-10, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const SymbolEval ev = eval_symbol(model, random_point(rng));
            for (int k = 0; k < 3; ++k) {
                const double vk = ev.v[k] / ev.gamma;
                e = std::max(e, max_abs(Mat4(ev.Pi_plus * alpha(k) - alpha(k) * ev.Pi_minus -
                                             vk * id)));
                e = std::max(e, max_abs(Mat4(ev.Pi_minus * alpha(k) - alpha(k) * ev.Pi_plus +
                                             vk * id)));
            }
        }
        return e;
    });
    add("{lambda+-, Pi+-} closed form vs generic bracket", 1e-10, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const PhasePoint p = random_point(rng);
            const SymbolEval ev = eval_symbol(model, p);
            const FieldSample f = model.fields(p.t, p.x);
            const PotentialDerivs pd = model.eval(p.t, p.x);
            for (int sp : {1, -1}) {
                const Mat4 generic = matrix_poisson_bracket(eigenvalue_function(model, sp),
                                                            projection_function(model, sp), p);
                const Vec3 vb = (ev.v / ev.gamma).cross(f.B);
                const Mat4 closed =
                    (-0.5 / ev.gamma) * alpha_dot(vb) -
                    (0.5 * sp / ev.gamma) *
                        (alpha_dot(pd.grad_A0) -
                         ev.P0 * (ev.v.dot(pd.grad_A0) / (ev.gamma * ev.gamma)));
                e = std::max(e, max_abs(Mat4(generic - closed)));
            }
        }
        return e;
    });
    add("Poisson product identity A{B,C} - {A,B}C = {AB,C} - {A,BC}", 1e-10, [&] {
        double e = 0.0;
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int s = 0; s < samples; ++s) {
            ScalarWave s1{random_vec(rng), random_vec(rng), u(rng)};
            ScalarWave s2{random_vec(rng), random_vec(rng), u(rng)};
            ScalarWave s3{random_vec(rng), random_vec(rng), u(rng)};
            const MatrixPhaseFunction A = wave_function(random_mat(rng), s1);
            const MatrixPhaseFunction B = wave_function(random_mat(rng), s2);
            const MatrixPhaseFunction C = wave_function(random_mat(rng), s3);
            const PhasePoint p = random_point(rng);
            const Mat4 lhs = A.value(p) * matrix_poisson_bracket(B, C, p) -
                             matrix_poisson_bracket(A, B, p) * C.value(p);
            const Mat4 rhs = matrix_poisson_bracket(product_function(A, B), C, p) -
                             matrix_poisson_bracket(A, product_function(B, C), p);
            e = std::max(e, max_abs(Mat4(lhs - rhs)));
        }
        return e;
    });
    add("Berry term explicit form vs [Pi, {lambda, Pi} - dt Pi]", 1e-10, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const PhasePoint p = random_point(rng);
            const SymbolEval ev = eval_symbol(model, p);
            const SymbolDerivs d = symbol_derivatives(model, p);
            for (int sp : {1, -1}) {
                const Mat4& Pi = sp == 1 ? ev.Pi_plus : ev.Pi_minus;
                const Mat4 dtPi = sp == 1 ? d.dt_Pi_plus : d.dt_Pi_minus;
                const Mat4 brk = matrix_poisson_bracket(eigenvalue_function(model, sp),
                                                        projection_function(model, sp), p);
                const Mat4 oracle = commutator(Pi, Mat4(brk - dtPi));
                e = std::max(e, max_abs(Mat4(berry_term(model, p, sp) - oracle)));
            }
        }
        return e;
    });
    add("Poissonian curvature explicit form vs +-<v> Pi {Pi-+, Pi-+} Pi", 1e-10, [&] {
        double e = 0.0;
        for (int s = 0; s < samples; ++s) {
            const PhasePoint p = random_point(rng);
            const SymbolEval ev = eval_symbol(model, p);
            for (int sp : {1, -1}) {
                const Mat4& Pi = sp == 1 ? ev.Pi_plus : ev.Pi_minus;
                const MatrixPhaseFunction other = projection_function(model, -sp);
                const Mat4 brk = matrix_poisson_bracket(other, other, p);
                const Mat4 oracle = static_cast<double>(sp) * ev.gamma * Pi * brk * Pi;
                e = std::max(e, max_abs(Mat4(poissonian_curvature(model, p, sp) - oracle)));
            }
        }
        return e;
    });

    return report;
}

// ------------------------------------------------------------------ file IO

void write_csv(const std::string& path, const std::vector<std::string>& metadata,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp + " for writing");
        for (const std::string& m : metadata) os << "# " << m << "\n";
        for (std::size_t i = 0; i < header.size(); ++i)
            os << (i ? "," : "") << header[i];
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << fmt(row[i]);
            os << "\n";
        }
        if (!os) throw IoError("write failure on " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot rename " + tmp + " to " + path);
}

namespace {

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output_dir);
    return cfg.output_dir + "/" + cfg.prefix + "_" + name;
}

std::vector<std::string> csv_metadata(const ExperimentConfig& cfg, const std::string& schema) {
    std::vector<std::string> md;
    md.push_back("schema: " + schema + " v1");
    for (const std::string& line : describe_config(cfg)) md.push_back(line);
    return md;
}

struct TestFunction {
    std::string name;
    PhaseObservable fn;
};

std::vector<TestFunction> default_dictionary(const ExperimentConfig& cfg, Vec3 xc, Vec3 vc) {
    const double s = cfg.test_width;
    // offset the window from the pushed reference point: the odd elements would
    // otherwise sit at the density's near-symmetry point, where their pairing is
    // a difference of tiny competing biases instead of a clean O(eps) quantity
    xc[0] += 0.5 * s;
    vc[0] += 0.5 * s;
    auto gauss = [xc, vc, s](const Vec3& x, const Vec3& v) {
        const double dx = (x[0] - xc[0]) / s, dv = (v[0] - vc[0]) / s;
        return std::exp(-0.5 * (dx * dx + dv * dv));
    };
    std::vector<TestFunction> dict;
    dict.push_back({"gauss", gauss});
    dict.push_back({"x_gauss", [gauss, xc, s](const Vec3& x, const Vec3& v) {
                        return (x[0] - xc[0]) / s * gauss(x, v);
                    }});
    dict.push_back({"v_gauss", [gauss, vc, s](const Vec3& x, const Vec3& v) {
                        return (v[0] - vc[0]) / s * gauss(x, v);
                    }});
    return dict;
}

/// dx dxi sum over the lattice of f(x, xi) a(x, v = xi - A(t, x)).
double pair_scalar_field(const std::vector<double>& f, const WignerField& W,
                         const PotentialModel& model, const PhaseObservable& a) {
    const int n = W.n();
    double s = 0.0;
    for (int ix = 0; ix < n; ++ix) {
        const Vec3 x(W.x_value(ix), 0.0, 0.0);
        const Vec3 A = model.eval(W.t, x).A;
        for (int ixi = 0; ixi < n; ++ixi) {
            Vec3 xi = W.grid.space.transverse_xi;
            xi[0] = W.grid.xi_value(ixi);
            s += f[static_cast<std::size_t>(ix) * n + ixi] * a(x, xi - A);
        }
    }
    return s * W.grid.space.spacing() * W.grid.dxi();
}

}  // namespace

LimitStudyResult run_limit_study(const ExperimentConfig& cfg) {
    cfg.validate();
    const PotentialModel model = cfg.model();
    const SpatialGrid grid = cfg.grid();
    const PhaseDensity f_in = cfg.f_in();
    const SamplingBox box = cfg.sampling_box();
    const double T = cfg.t_final;

    // test dictionary centered on the pushed classical reference point
    Particle ref;
    ref.x = cfg.x0;
    ref.v = cfg.xi0 - model.eval(0.0, cfg.x0).A;
    ref.weight = 1.0;
    ref.species = cfg.species;
    if (T > 0.0) {
        ParticleEnsemble one;
        one.particles.push_back(ref);
        ref = evolve_ensemble(model, one, 0.0, T, cfg.dt).particles.front();
    }
    const std::vector<TestFunction> dict = default_dictionary(cfg, ref.x, ref.v);

    LimitStudyResult result;
    for (const TestFunction& tf : dict) result.test_names.push_back(tf.name);

    std::vector<double> eps_sorted = cfg.epsilons;
    std::sort(eps_sorted.rbegin(), eps_sorted.rend());

    for (double eps : eps_sorted) {
        const auto tic = std::chrono::steady_clock::now();
        ConvergenceRow row;
        row.epsilon = eps;

        SampledEnsemble ens = sample_mixed_state(grid, eps, f_in, box, cfg.members, cfg.species,
                                                 cfg.seed, cfg.schatten_c);
        MixedState final_state =
            T > 0.0
                ? cfg.workers > 1
                      ? DiracPropagator(grid, eps, model)
                            .evolve(std::move(ens.state), 0.0, T, cfg.dt, {T}, cfg.workers)
                            .back()
                            .second
                      : DiracPropagator(grid, eps, model)
                            .evolve(std::move(ens.state), 0.0, T, cfg.dt, {T})
                            .back()
                            .second
                : std::move(ens.state);

        const WignerField W = wigner_transform(final_state, T);
        row.mass_defect = std::abs(W.mass() - 1.0);
        row.constraint = constraint_norm(W, model);
        // r_eps converges only distributionally; test it at the observable
        // scale instead of pointwise (see mollify_xi)
        row.remainder_norm = mollify_xi(remainder(W, model), cfg.test_width).l2_norm();
        const LagrangeY Y = lagrange_multiplier_Y(W, model);
        const double ny = std::max(Y.norm_Y, 1e-300);
        row.y_ratio_plus = Y.norm_diag_plus / ny;
        row.y_ratio_minus = Y.norm_diag_minus / ny;

        const SpeciesSplit split = project_species(W, model);
        const std::vector<double>& f_q = cfg.species == 1 ? split.f_plus : split.f_minus;

        ParticleEnsemble particles = ensemble_from_nodes(ens.nodes, model, 0.0, cfg.species);
        if (T > 0.0) particles = evolve_ensemble(model, std::move(particles), 0.0, T, cfg.dt,
                                                 cfg.workers);

        for (const TestFunction& tf : dict) {
            const double q = pair_scalar_field(f_q, W, model, tf.fn);
            const double cl = observable(particles, tf.fn, cfg.species);
            row.observable_err.push_back(std::abs(q - cl));
        }

        row.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
        if (cfg.verbose)
            std::fprintf(stdout, "[limit-study] eps=%g done in %.2f s\n", eps, row.seconds);
        result.rows.push_back(std::move(row));
    }

    std::vector<std::string> header = {"epsilon"};
    for (const std::string& name : result.test_names) header.push_back("err_" + name);
    header.insert(header.end(), {"constraint_norm", "remainder_norm", "y_ratio_plus",
                                 "y_ratio_minus", "mass_defect"});
    std::vector<std::vector<double>> rows;
    for (const ConvergenceRow& r : result.rows) {
        std::vector<double> v = {r.epsilon};
        v.insert(v.end(), r.observable_err.begin(), r.observable_err.end());
        v.insert(v.end(), {r.constraint, r.remainder_norm, r.y_ratio_plus, r.y_ratio_minus,
                           r.mass_defect});
        rows.push_back(v);
    }
    auto md = csv_metadata(cfg, "limit_study");
    md.push_back("note: wall-clock timings are logged to stdout only, so reruns are byte-identical");
    result.csv_path = out_path(cfg, "limit_study.csv");
    write_csv(result.csv_path, md, header, rows);
    return result;
}

std::vector<std::string> run_dirac(const ExperimentConfig& cfg) {
    cfg.validate();
    const PotentialModel model = cfg.model();
    const SpatialGrid grid = cfg.grid();
    const double eps = cfg.epsilons.front();
    SampledEnsemble ens = sample_mixed_state(grid, eps, cfg.f_in(), cfg.sampling_box(),
                                             cfg.members, cfg.species, cfg.seed, cfg.schatten_c);
    DiracPropagator prop(grid, eps, model);
    std::vector<double> snaps = cfg.snapshot_times;
    if (snaps.empty()) snaps = {0.0, cfg.t_final};
    auto states = prop.evolve(std::move(ens.state), 0.0, cfg.t_final, cfg.dt, snaps, cfg.workers);

    std::vector<std::string> files;
    std::vector<std::vector<double>> diag_rows;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string path = out_path(cfg, "dirac_t" + std::to_string(i) + ".dspn");
        write_dspn(path, states[i].second, grid, states[i].first);
        files.push_back(path);
        const Diagnostics d = diagnostics(states[i].second, prop, states[i].first);
        for (std::size_t node = 0; node < d.rho.size(); ++node)
            diag_rows.push_back({states[i].first, grid.coord(node)[0], d.rho[node], d.J[node][0],
                                 d.J[node][1], d.J[node][2], d.energy[node]});
    }
    const std::string csv = out_path(cfg, "dirac_diagnostics.csv");
    write_csv(csv, csv_metadata(cfg, "dirac_diagnostics"),
              {"t", "x", "rho", "J1", "J2", "J3", "energy"}, diag_rows);
    files.push_back(csv);
    return files;
}

std::vector<std::string> run_vlasov(const ExperimentConfig& cfg) {
    cfg.validate();
    const PotentialModel model = cfg.model();
    ParticleEnsemble ens = sample_ensemble(model, 0.0, cfg.f_in(), cfg.sampling_box(),
                                           cfg.vlasov_particles, cfg.species, cfg.seed);
    ens = evolve_ensemble(model, std::move(ens), 0.0, cfg.t_final, cfg.dt, cfg.workers);

    std::vector<std::vector<double>> rows;
    for (const Particle& p : ens.particles)
        rows.push_back({cfg.t_final, p.x[0], p.x[1], p.x[2], p.v[0], p.v[1], p.v[2], p.weight,
                        static_cast<double>(p.species)});
    const std::string traj = out_path(cfg, "vlasov.csv");
    write_csv(traj, csv_metadata(cfg, "vlasov_trajectory"),
              {"t", "x1", "x2", "x3", "v1", "v2", "v3", "weight", "species"}, rows);

    DepositGrid dg;
    dg.nx = 128;
    dg.nv = 128;
    dg.x_lo = -0.5 * cfg.L;
    dg.x_hi = 0.5 * cfg.L;
    const SamplingBox box = cfg.sampling_box();
    dg.v_lo = box.xi_lo[0] - 1.0;
    dg.v_hi = box.xi_hi[0] + 1.0;
    const DepositedMoments dep = deposit_moments(ens, dg);
    if (dep.overflow_weight > 0.0)
        std::fprintf(stderr, "[vlasov] warning: weight %.3e left the deposition box\n",
                     dep.overflow_weight);
    std::vector<std::vector<double>> hist;
    for (int ix = 0; ix < dg.nx; ++ix)
        for (int iv = 0; iv < dg.nv; ++iv)
            hist.push_back({dg.x_lo + (ix + 0.5) * dg.dx(), dg.v_lo + (iv + 0.5) * dg.dv(),
                            dep.f_plus[static_cast<std::size_t>(ix) * dg.nv + iv],
                            dep.f_minus[static_cast<std::size_t>(ix) * dg.nv + iv]});
    const std::string hist_path = out_path(cfg, "vlasov_hist.csv");
    write_csv(hist_path, csv_metadata(cfg, "vlasov_histogram"), {"x", "v", "f_plus", "f_minus"},
              hist);
    return {traj, hist_path};
}

std::vector<std::string> run_wigner_snapshot(const ExperimentConfig& cfg,
                                             const std::string& dspn_path) {
    const DspnFile snap = read_dspn(dspn_path);
    const PotentialModel model = cfg.model();
    const WignerField W = wigner_transform(snap.state, snap.t);

    const std::string dwig = out_path(cfg, "wigner.dwig");
    write_dwig(dwig, W);

    const WignerMoments m = moments(W);
    std::vector<std::vector<double>> mrows;
    for (std::size_t ix = 0; ix < m.rho.size(); ++ix)
        mrows.push_back({W.x_value(static_cast<int>(ix)), m.rho[ix], m.J[ix][0], m.J[ix][1],
                         m.J[ix][2]});
    const std::string mcsv = out_path(cfg, "wigner_moments.csv");
    write_csv(mcsv, csv_metadata(cfg, "wigner_moments"), {"x", "rho", "J1", "J2", "J3"}, mrows);

    const SpeciesSplit split = project_species(W, model);
    std::vector<std::vector<double>> frows;
    const int n = W.n();
    for (int ix = 0; ix < n; ++ix)
        for (int ixi = 0; ixi < n; ++ixi)
            frows.push_back({W.x_value(ix), W.grid.xi_value(ixi),
                             split.f_plus[static_cast<std::size_t>(ix) * n + ixi],
                             split.f_minus[static_cast<std::size_t>(ix) * n + ixi]});
    const std::string fcsv = out_path(cfg, "wigner_species.csv");
    write_csv(fcsv, csv_metadata(cfg, "wigner_species"), {"x", "xi", "f_plus", "f_minus"}, frows);
    return {dwig, mcsv, fcsv};
}

}  // namespace dlab
