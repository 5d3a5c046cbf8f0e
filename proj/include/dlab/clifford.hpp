#pragma once

#include <complex>

#include <Eigen/Dense>

namespace dlab {

using Complex = std::complex<double>;
using Mat4 = Eigen::Matrix4cd;
using Mat2 = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;
using CVec4 = Eigen::Vector4cd;

enum class DiracKind { Alpha1, Alpha2, Alpha3, Beta, Gamma5, Identity };

/// The fixed Dirac basis: beta = diag(I2, -I2), alpha_k = offdiag(sigma_k),
/// gamma5 = -i alpha1 alpha2 alpha3.  Entries are 0, +-1, +-i only.
const Mat4& dirac_matrix(DiracKind kind);

/// alpha_k for k in {0,1,2}.
const Mat4& alpha(int k);

const Mat2& pauli(int k);

/// sum_k alpha_k a_k
Mat4 alpha_dot(const Vec3& a);

enum class BracketSign { Commutator, Anticommutator };

Mat4 bracket(const Mat4& a, const Mat4& b, BracketSign sign);

inline Mat4 commutator(const Mat4& a, const Mat4& b) { return a * b - b * a; }
inline Mat4 anticommutator(const Mat4& a, const Mat4& b) { return a * b + b * a; }

/// max |entry| of a matrix, used all over the identity checks
inline double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace dlab
