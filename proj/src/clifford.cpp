#include "dlab/clifford.hpp"

#include <stdexcept>

namespace dlab {

namespace {

const Complex I(0.0, 1.0);

Mat2 make_pauli(int k) {
    Mat2 s = Mat2::Zero();
    switch (k) {
        case 0:
            s << 0, 1, 1, 0;
            break;
        case 1:
            s << 0, -I, I, 0;
            break;
        case 2:
            s << 1, 0, 0, -1;
            break;
        default:
            throw std::out_of_range("pauli index must be 0, 1 or 2");
    }
    return s;
}

Mat4 make_alpha(int k) {
    Mat4 a = Mat4::Zero();
    a.block<2, 2>(0, 2) = make_pauli(k);
    a.block<2, 2>(2, 0) = make_pauli(k);
    return a;
}

Mat4 make_beta() {
    Mat4 b = Mat4::Zero();
    b.diagonal() << 1, 1, -1, -1;
    return b;
}

Mat4 make_gamma5() { return -I * make_alpha(0) * make_alpha(1) * make_alpha(2); }

}  // namespace

const Mat2& pauli(int k) {
    static const Mat2 s[3] = {make_pauli(0), make_pauli(1), make_pauli(2)};
    if (k < 0 || k > 2) throw std::out_of_range("pauli index must be 0, 1 or 2");
    return s[k];
}

const Mat4& alpha(int k) {
    static const Mat4 a[3] = {make_alpha(0), make_alpha(1), make_alpha(2)};
    if (k < 0 || k > 2) throw std::out_of_range("alpha index must be 0, 1 or 2");
    return a[k];
}

const Mat4& dirac_matrix(DiracKind kind) {
    static const Mat4 beta = make_beta();
    static const Mat4 gamma5 = make_gamma5();
    static const Mat4 id = Mat4::Identity();
    switch (kind) {
        case DiracKind::Alpha1: return alpha(0);
        case DiracKind::Alpha2: return alpha(1);
        case DiracKind::Alpha3: return alpha(2);
        case DiracKind::Beta: return beta;
        case DiracKind::Gamma5: return gamma5;
        case DiracKind::Identity: return id;
    }
    throw std::logic_error("unreachable");
}

Mat4 alpha_dot(const Vec3& a) {
    return a[0] * alpha(0) + a[1] * alpha(1) + a[2] * alpha(2);
}

Mat4 bracket(const Mat4& a, const Mat4& b, BracketSign sign) {
    return sign == BracketSign::Commutator ? commutator(a, b) : anticommutator(a, b);
}

}  // namespace dlab
