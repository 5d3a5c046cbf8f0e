#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dlab/clifford.hpp"
#include "dlab/harness.hpp"

using namespace dlab;

TEST_CASE("fixed matrix entries") {
    const Mat4& beta = dirac_matrix(DiracKind::Beta);
    CHECK(beta(0, 0) == Complex(1, 0));
    CHECK(beta(2, 2) == Complex(-1, 0));
    CHECK(max_abs(Mat4(beta - beta.adjoint())) == 0.0);

    // alpha_k are offdiag(sigma_k)
    CHECK(alpha(0)(0, 3) == Complex(1, 0));
    CHECK(alpha(1)(0, 3) == Complex(0, -1));
    CHECK(alpha(1)(1, 2) == Complex(0, 1));
    CHECK(alpha(2)(0, 2) == Complex(1, 0));
    CHECK(alpha(2)(1, 3) == Complex(-1, 0));

    // gamma5 = offdiag(I2)
    const Mat4& g5 = dirac_matrix(DiracKind::Gamma5);
    CHECK(g5(0, 2) == Complex(1, 0));
    CHECK(g5(1, 3) == Complex(1, 0));
    CHECK(g5(2, 0) == Complex(1, 0));
    CHECK(g5(0, 0) == Complex(0, 0));
}

TEST_CASE("alpha_dot and brackets") {
    const Vec3 a(1.0, -2.0, 0.5);
    const Mat4 m = alpha_dot(a);
    CHECK(max_abs(Mat4(m - (a[0] * alpha(0) + a[1] * alpha(1) + a[2] * alpha(2)))) == 0.0);
    CHECK(max_abs(Mat4(bracket(m, m, BracketSign::Commutator))) == 0.0);
    CHECK(max_abs(Mat4(bracket(m, m, BracketSign::Anticommutator) -
                       2.0 * a.squaredNorm() * Mat4::Identity())) < 1e-14);
}

TEST_CASE("out-of-range indices throw") {
    CHECK_THROWS(alpha(3));
    CHECK_THROWS(alpha(-1));
    CHECK_THROWS(pauli(5));
}

TEST_CASE("identity suite passes on the clean algebra") {
    const auto report = run_identity_suite();
    CHECK(report.size() >= 15);
    for (const auto& r : report) {
        INFO(r.name, " max_err=", r.max_err);
        CHECK(r.pass);
    }
}

TEST_CASE("fault injection flags the anticommutation identity") {
    const auto report = run_identity_suite(true);
    bool anticommutation_failed = false;
    for (const auto& r : report)
        if (r.name.find("anticommutation") != std::string::npos && !r.pass)
            anticommutation_failed = true;
    CHECK(anticommutation_failed);
}
