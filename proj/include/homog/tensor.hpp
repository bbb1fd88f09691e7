#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace homog {

// Symmetric d x d matrices are stored as Mandel vectors so the Euclidean
// inner product of two vectors equals the Frobenius pairing of the tensors:
//   d=1: (a11)
//   d=2: (a11, a22, sqrt(2) a12)
//   d=3: (a11, a22, a33, sqrt(2) a23, sqrt(2) a13, sqrt(2) a12)
// A fourth-order tensor on S^d then becomes a symmetric sdim x sdim matrix.

inline int sym_dim(int d) { return d * (d + 1) / 2; }

inline Eigen::VectorXd mandel_from_matrix(const Eigen::MatrixXd& a) {
  const int d = static_cast<int>(a.rows());
  const double s2 = std::sqrt(2.0);
  Eigen::VectorXd v(sym_dim(d));
  for (int i = 0; i < d; ++i) v[i] = a(i, i);
  if (d == 2) v[2] = s2 * 0.5 * (a(0, 1) + a(1, 0));
  if (d == 3) {
    v[3] = s2 * 0.5 * (a(1, 2) + a(2, 1));
    v[4] = s2 * 0.5 * (a(0, 2) + a(2, 0));
    v[5] = s2 * 0.5 * (a(0, 1) + a(1, 0));
  }
  return v;
}

inline Eigen::MatrixXd matrix_from_mandel(const Eigen::VectorXd& v, int d) {
  const double is2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) a(i, i) = v[i];
  if (d == 2) a(0, 1) = a(1, 0) = is2 * v[2];
  if (d == 3) {
    a(1, 2) = a(2, 1) = is2 * v[3];
    a(0, 2) = a(2, 0) = is2 * v[4];
    a(0, 1) = a(1, 0) = is2 * v[5];
  }
  return a;
}

// Isotropic stiffness in Mandel form: C e = 2 mu e + lambda tr(e) I.
inline Eigen::MatrixXd isotropic_stiffness(int d, double lambda, double mu) {
  const int s = sym_dim(d);
  Eigen::MatrixXd c = 2.0 * mu * Eigen::MatrixXd::Identity(s, s);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) c(i, j) += lambda;
  return c;
}

struct EllipticityBracket {
  double alpha = 0.0;
  double beta = 0.0;
};

inline EllipticityBracket spd_bracket(const Eigen::MatrixXd& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

inline void require_spd(const Eigen::MatrixXd& c, const char* what) {
  if (spd_bracket(c).alpha <= 0.0)
    throw std::invalid_argument(std::string(what) + ": matrix is not positive definite");
}

inline void require_psd(const Eigen::MatrixXd& c, const char* what, double tol = 1e-12) {
  if (spd_bracket(c).alpha < -tol)
    throw std::invalid_argument(std::string(what) + ": matrix is not positive semidefinite");
}

}  // namespace homog
