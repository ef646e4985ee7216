#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>

#include "krawpoly/errors.hpp"
#include "krawpoly/krawtchouk_bi.hpp"
#include "krawpoly/rotations.hpp"

namespace krawpoly {

struct RahmanU {
  double u11, u12, u21, u22;

  /// bordered matrix with first row and column all 1
  Eigen::Matrix3d bordered() const {
    Eigen::Matrix3d U;
    U << 1, 1, 1, 1, u11, u12, 1, u21, u22;
    return U;
  }
};

/// defined up to a common nonzero factor
struct PQuadruple {
  double p1, p2, p3, p4;
};

struct EtaWeights {
  double eta0, eta1, eta2;
  double etat0, etat1, etat2;
  double nu;  // 1 / eta0
};

struct STriple {
  Eigen::Matrix3d S1;
  Eigen::Matrix3d S2;
  Eigen::Matrix3d V;
};

inline RahmanU u_from_R(const RotationMatrix& R) {
  require_generic(R, {{1, 3}, {2, 3}, {3, 1}, {3, 2}, {3, 3}});
  return {R(1, 1) * R(3, 3) / (R(1, 3) * R(3, 1)),
          R(1, 2) * R(3, 3) / (R(1, 3) * R(3, 2)),
          R(2, 1) * R(3, 3) / (R(2, 3) * R(3, 1)),
          R(2, 2) * R(3, 3) / (R(2, 3) * R(3, 2))};
}

inline PQuadruple p_from_R(const RotationMatrix& R) {
  auto check = [&](double den, const std::string& which,
                   const std::string& entries) {
    if (std::abs(den) < kGenericityEps)
      throw SingularParametrization(which + " (division by " + entries + ")");
  };
  check(R(1, 1), "p1", "R11");
  check(R(1, 2), "p2", "R12");
  check(R(1, 3) * R(2, 1), "p3", "R13*R21");
  check(R(1, 3) * R(2, 2), "p4", "R13*R22");
  return {R(3, 1) / R(1, 1), -R(3, 2) / R(1, 2),
          -R(2, 3) * R(3, 1) / (R(1, 3) * R(2, 1)),
          R(3, 2) * R(2, 3) / (R(1, 3) * R(2, 2))};
}

inline RahmanU u_from_p(const PQuadruple& p) {
  const double S = p.p1 + p.p2 + p.p3 + p.p4;
  const double D = p.p1 * p.p4 - p.p2 * p.p3;
  auto check = [](double den, const std::string& which) {
    if (den == 0.0) throw SingularParametrization(which);
  };
  check(p.p1 * S, "p1*(p1+p2+p3+p4)");
  check(p.p2 * S, "p2*(p1+p2+p3+p4)");
  check(p.p3 * S, "p3*(p1+p2+p3+p4)");
  check(p.p4 * S, "p4*(p1+p2+p3+p4)");
  return {D / (p.p1 * S), -D / (p.p2 * S), -D / (p.p3 * S), D / (p.p4 * S)};
}

inline EtaWeights eta_from_p(const PQuadruple& p) {
  const double S = p.p1 + p.p2 + p.p3 + p.p4;
  const double s12 = p.p1 + p.p2, s13 = p.p1 + p.p3;
  const double s24 = p.p2 + p.p4, s34 = p.p3 + p.p4;
  auto check = [](double den, const std::string& which) {
    if (den == 0.0) throw SingularParametrization(which);
  };
  check(s12, "p1+p2");
  check(s13, "p1+p3");
  check(s24, "p2+p4");
  check(s34, "p3+p4");
  EtaWeights w;
  w.eta1 = p.p1 * p.p2 * S / (s12 * s13 * s24);
  w.eta2 = p.p3 * p.p4 * S / (s13 * s24 * s34);
  w.etat1 = p.p1 * p.p3 * S / (s12 * s13 * s34);
  w.etat2 = p.p2 * p.p4 * S / (s12 * s24 * s34);
  w.eta0 = 1.0 - w.eta1 - w.eta2;
  w.etat0 = w.eta0;
  if (w.eta0 == 0.0) throw SingularParametrization("1-eta1-eta2");
  w.nu = 1.0 / w.eta0;
  return w;
}

inline EtaWeights eta_from_R(const RotationMatrix& R) {
  return eta_from_p(p_from_R(R));
}

/// max-norm residual of nu P U P~ U^T = I with P = diag(eta),
/// P~ = diag(eta~); U includes the border row and column
inline double fourtuple_check(double nu, const Eigen::VectorXd& eta,
                              const Eigen::VectorXd& eta_tilde,
                              const Eigen::MatrixXd& U) {
  const int n = static_cast<int>(U.rows());
  const Eigen::MatrixXd lhs = nu * eta.asDiagonal() * U *
                              eta_tilde.asDiagonal() * U.transpose();
  return (lhs - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

inline double fourtuple_check(const EtaWeights& w, const RahmanU& u) {
  Eigen::Vector3d eta(w.eta0, w.eta1, w.eta2);
  Eigen::Vector3d etat(w.etat0, w.etat1, w.etat2);
  return fourtuple_check(w.nu, eta, etat, u.bordered());
}

/// permutation with V(a, b) = R(perm[a] + 1, perm[b] + 1), 0-based
inline constexpr std::array<int, 3> kVPermutation{2, 0, 1};

/// V = (1/nu) S1 U S2 with S1 = diag(R33, R13, R23),
/// S2 = diag(R33, R31, R32), nu = R33. When det V comes out negative the
/// last diagonal entry of S2 is flipped; with this R-derived data det V
/// equals det R, so the flip is a safeguard for externally supplied tuples.
inline STriple V_from_SUS(const RotationMatrix& R) {
  const RahmanU u = u_from_R(R);
  STriple out;
  out.S1 = Eigen::Vector3d(R(3, 3), R(1, 3), R(2, 3)).asDiagonal();
  out.S2 = Eigen::Vector3d(R(3, 3), R(3, 1), R(3, 2)).asDiagonal();
  out.V = out.S1 * u.bordered() * out.S2 / R(3, 3);
  if (out.V.determinant() < 0.0) {
    out.S2(2, 2) = -out.S2(2, 2);
    out.V = out.S1 * u.bordered() * out.S2 / R(3, 3);
  }
  return out;
}

/// inverts the row/column relabeling of V_from_SUS
inline Eigen::Matrix3d rotation_from_V(const Eigen::Matrix3d& V) {
  constexpr std::array<int, 3> inv{1, 2, 0};
  Eigen::Matrix3d R;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) R(r, c) = V(inv[r], inv[c]);
  return R;
}

}  // namespace krawpoly
