#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "krawpoly/errors.hpp"

namespace krawpoly {

/// Real antisymmetric matrix, stored as its strictly-upper triangle so that
/// B^T = -B holds exactly.
class Generator {
 public:
  explicit Generator(int size) : size_(size) {
    if (size < 2) throw std::invalid_argument("Generator: size must be >= 2");
    upper_.assign(size * (size - 1) / 2, 0.0);
  }

  static Generator from_matrix(const Eigen::MatrixXd& B, double tol = 1e-12) {
    if (B.rows() != B.cols())
      throw std::invalid_argument("Generator: matrix must be square");
    if ((B + B.transpose()).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("Generator: matrix is not antisymmetric");
    Generator g(static_cast<int>(B.rows()));
    for (int i = 0; i < g.size_; ++i)
      for (int j = i + 1; j < g.size_; ++j) g.set(i, j, B(i, j));
    return g;
  }

  int size() const { return size_; }

  /// entry (i, j), 0-based, with the antisymmetry applied
  double operator()(int i, int j) const {
    if (i == j) return 0.0;
    return i < j ? upper_[flat(i, j)] : -upper_[flat(j, i)];
  }

  /// set the (i, j) entry of the strict upper triangle, i < j
  void set(int i, int j, double value) {
    if (!(0 <= i && i < j && j < size_))
      throw std::invalid_argument("Generator::set: need 0 <= i < j < size");
    upper_[flat(i, j)] = value;
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(size_, size_);
    for (int i = 0; i < size_; ++i)
      for (int j = i + 1; j < size_; ++j) {
        B(i, j) = upper_[flat(i, j)];
        B(j, i) = -upper_[flat(i, j)];
      }
    return B;
  }

 private:
  int flat(int i, int j) const { return i * size_ - i * (i + 1) / 2 + (j - i - 1); }

  int size_;
  std::vector<double> upper_;
};

/// Proper orthogonal matrix; the constructor validates orthogonality and
/// determinant at double precision.
class RotationMatrix {
 public:
  static constexpr double kOrthoTol = 1e-12;

  explicit RotationMatrix(Eigen::MatrixXd R) : R_(std::move(R)) {
    if (R_.rows() != R_.cols() || R_.rows() < 2)
      throw std::invalid_argument("RotationMatrix: matrix must be square");
    const int n = static_cast<int>(R_.rows());
    const double ortho =
        (R_.transpose() * R_ - Eigen::MatrixXd::Identity(n, n))
            .cwiseAbs()
            .maxCoeff();
    if (ortho > kOrthoTol)
      throw std::invalid_argument("RotationMatrix: not orthogonal");
    if (std::abs(R_.determinant() - 1.0) > 1e-12)
      throw std::invalid_argument("RotationMatrix: determinant is not +1");
  }

  int size() const { return static_cast<int>(R_.rows()); }
  const Eigen::MatrixXd& matrix() const { return R_; }

  /// 1-based entry access matching the usual R_ij notation
  double operator()(int i, int j) const { return R_(i - 1, j - 1); }

  RotationMatrix transposed() const { return RotationMatrix(R_.transpose()); }

  friend RotationMatrix operator*(const RotationMatrix& a,
                                  const RotationMatrix& b) {
    return RotationMatrix(a.R_ * b.R_);
  }

 private:
  Eigen::MatrixXd R_;
};

struct EulerAngles {
  double phi = 0.0;
  double theta = 0.0;
  double chi = 0.0;
};

inline RotationMatrix exp_generator(const Generator& B) {
  return RotationMatrix(B.dense().exp());
}

/// Rotation acting in the (a, b) coordinate plane, axes 1-based, a < b.
/// The sign convention reproduces the standard clockwise forms: the (2,3)
/// block is [[cos, sin], [-sin, cos]] and the (1,3) block is
/// [[cos, -sin], [sin, cos]].
inline RotationMatrix plane_rotation(int size, int a, int b, double angle) {
  if (!(1 <= a && a < b && b <= size))
    throw std::invalid_argument("plane_rotation: need 1 <= a < b <= size");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double sigma = ((a + b) % 2 == 1) ? 1.0 : -1.0;
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(size, size);
  R(a - 1, a - 1) = c;
  R(b - 1, b - 1) = c;
  R(a - 1, b - 1) = sigma * s;
  R(b - 1, a - 1) = -sigma * s;
  return RotationMatrix(R);
}

/// R(phi, theta, chi) = R_(xz)(phi) R_(yz)(theta) R_(xz)(chi)
inline RotationMatrix euler_product(const EulerAngles& ang) {
  return plane_rotation(3, 1, 3, ang.phi) * plane_rotation(3, 2, 3, ang.theta) *
         plane_rotation(3, 1, 3, ang.chi);
}

/// Angle-and-axes description of a plane rotation; used where a factored
/// rotation is preferred over a single matrix (the generator of each factor
/// is known in closed form, so no logarithm is ever taken).
struct PlaneRotation {
  int a = 1;
  int b = 2;  // 1-based, a < b
  double angle = 0.0;
};

/// Generator whose exponential is plane_rotation(size, a, b, angle).
inline Generator plane_generator(int size, const PlaneRotation& p) {
  if (!(1 <= p.a && p.a < p.b && p.b <= size))
    throw std::invalid_argument("plane_generator: need 1 <= a < b <= size");
  const double sigma = ((p.a + p.b) % 2 == 1) ? 1.0 : -1.0;
  Generator B(size);
  B.set(p.a - 1, p.b - 1, sigma * p.angle);
  return B;
}

/// Principal real logarithm of a rotation. Fails when some invariant plane
/// is rotated by exactly pi (eigenvalue -1).
inline Generator real_log(const RotationMatrix& R) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXd> es(R.matrix(), false);
  for (int i = 0; i < R.size(); ++i)
    if (std::abs(es.eigenvalues()(i) + 1.0) < 1e-8)
      throw NonPrincipalRotation();
  const Eigen::MatrixXd L = R.matrix().log();
  // antisymmetrize away the roundoff of the dense log
  return Generator::from_matrix(0.5 * (L - L.transpose()), 1e-8);
}

/// Random rotation e^B with B uniform antisymmetric, entries in
/// [-scale, scale].
inline RotationMatrix random_rotation(int size, std::mt19937& rng,
                                      double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Generator B(size);
  for (int i = 0; i < size; ++i)
    for (int j = i + 1; j < size; ++j) B.set(i, j, dist(rng));
  return exp_generator(B);
}

/// Random rotation with every entry bounded away from zero, as required by
/// the routes that divide by rotation entries.
inline RotationMatrix random_generic_rotation(int size, std::mt19937& rng,
                                              double min_entry = 1e-2,
                                              double scale = 1.0) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    RotationMatrix R = random_rotation(size, rng, scale);
    if (R.matrix().cwiseAbs().minCoeff() >= min_entry) return R;
  }
  throw std::runtime_error("random_generic_rotation: no generic draw found");
}

}  // namespace krawpoly
