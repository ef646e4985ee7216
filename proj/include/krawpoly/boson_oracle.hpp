#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "krawpoly/fock_basis.hpp"
#include "krawpoly/rotations.hpp"

namespace krawpoly {

/// Matrix of sum_{j,k} B_jk a_j^dag a_k restricted to the level-N eigenspace,
/// built directly from the ladder actions. Antisymmetric whenever B is.
inline Eigen::MatrixXd generator_on_level(const Generator& B, int d, int N) {
  if (B.size() != d + 1)
    throw std::invalid_argument("generator_on_level: B must be (d+1)x(d+1)");
  const LevelBasis basis(d, N);
  const int dim = basis.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    std::vector<int> occ = basis.at(col).occupations();
    // a_j^dag a_k |occ> for j != k; the diagonal j == k drops out since
    // B_jj = 0
    for (int k = 0; k <= d; ++k) {
      if (occ[k] == 0) continue;
      for (int j = 0; j <= d; ++j) {
        if (j == k || B(j, k) == 0.0) continue;
        std::vector<int> target = occ;
        target[k] -= 1;
        target[j] += 1;
        const double amp =
            B(j, k) * std::sqrt(static_cast<double>(occ[k])) *
            std::sqrt(static_cast<double>(target[j]));
        target.pop_back();  // basis ranks on the first d occupations
        M(basis.rank(target), col) += amp;
      }
    }
  }
  return M;
}

/// Dense matrix of U(R) = exp(sum B_jk a_j^dag a_k) on the level-N
/// eigenspace, indexed by the graded-lex LevelBasis order. This is the
/// brute-force ground truth every polynomial route is checked against.
class RepresentationMatrix {
 public:
  RepresentationMatrix(LevelBasis basis, Eigen::MatrixXd U)
      : basis_(std::move(basis)), U_(std::move(U)) {
    const int dim = basis_.size();
    if (U_.rows() != dim || U_.cols() != dim)
      throw std::invalid_argument("RepresentationMatrix: size mismatch");
    const double res =
        (U_.transpose() * U_ - Eigen::MatrixXd::Identity(dim, dim))
            .cwiseAbs()
            .maxCoeff();
    if (res > 1e-9)
      throw std::invalid_argument("RepresentationMatrix: not orthogonal");
  }

  const LevelBasis& basis() const { return basis_; }
  const Eigen::MatrixXd& matrix() const { return U_; }

  double matrix_element(const LevelIndex& bra, const LevelIndex& ket) const {
    return U_(basis_.rank(bra), basis_.rank(ket));
  }

  /// d = 2 convenience: <i,k| U |m,n>
  double element(int i, int k, int m, int n) const {
    return U_(basis_.rank(std::vector<int>{i, k}),
              basis_.rank(std::vector<int>{m, n}));
  }

 private:
  LevelBasis basis_;
  Eigen::MatrixXd U_;
};

inline RepresentationMatrix representation_matrix(const Generator& B, int d,
                                                  int N) {
  return RepresentationMatrix(LevelBasis(d, N),
                              generator_on_level(B, d, N).exp());
}

/// Builds U(R) through the principal log of R; propagates
/// NonPrincipalRotation when R has an eigenvalue -1.
inline RepresentationMatrix representation_matrix(const RotationMatrix& R,
                                                  int d, int N) {
  return representation_matrix(real_log(R), d, N);
}

/// U of a factored rotation, composed as U(R_1)...U(R_k). The generator of
/// each plane factor is known in closed form, so this route has no
/// eigenvalue -1 restriction.
inline RepresentationMatrix representation_matrix(
    const std::vector<PlaneRotation>& factors, int d, int N) {
  if (factors.empty())
    throw std::invalid_argument("representation_matrix: empty factor list");
  LevelBasis basis(d, N);
  Eigen::MatrixXd U =
      Eigen::MatrixXd::Identity(basis.size(), basis.size());
  for (const auto& p : factors)
    U *= generator_on_level(plane_generator(d + 1, p), d, N).exp();
  return RepresentationMatrix(std::move(basis), std::move(U));
}

}  // namespace krawpoly
