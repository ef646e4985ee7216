#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "krawpoly/boson_oracle.hpp"
#include "krawpoly/krawtchouk_bi.hpp"
#include "krawpoly/krawtchouk_uni.hpp"
#include "krawpoly/math_util.hpp"
#include "krawpoly/rotations.hpp"

namespace krawpoly {

struct TratnikParams {
  double p1;
  double p2;
  int N;

  TratnikParams(double p1_, double p2_, int N_) : p1(p1_), p2(p2_), N(N_) {
    if (!(p1 > 0.0 && p2 > 0.0 && p1 + p2 < 1.0))
      throw std::invalid_argument(
          "TratnikParams: need 0 < p1, 0 < p2, p1 + p2 < 1");
    if (N < 0) throw std::invalid_argument("TratnikParams: need N >= 0");
  }
};

namespace detail {

// k_n(x; p; J) extended to n > J for integer 0 <= x <= J, where the
// distributed prefactor (-J)_n / (-J)_k vanishes term by term
inline double kraw_or_zero(int n, int x, double p, int J) {
  if (n > J) return 0.0;
  if (n == 0) return 1.0;
  return kraw(n, x, UniKrawtchoukParams(p, J));
}

}  // namespace detail

/// K_2(m,n; i,k; p1,p2; N), the product-form bivariate family
inline double tratnik_K2(int m, int n, int i, int k,
                         const TratnikParams& params) {
  const int N = params.N;
  if (m < 0 || n < 0 || m + n > N || i < 0 || k < 0 || i + k > N)
    throw std::invalid_argument("tratnik_K2: index out of range");
  const double f1 = detail::kraw_or_zero(m, i, params.p1, N - n);
  const double f2 =
      detail::kraw_or_zero(n, k, params.p2 / (1.0 - params.p1), N - i);
  return f1 * f2 / pochhammer(-N, n + m);
}

/// Residuals of the two Geronimo-Iliev recurrences; zero for exact
/// evaluation. Out-of-simplex neighbors carry vanishing coefficients.
inline std::pair<double, double> tratnik_recurrence_residuals(
    int m, int n, int i, int k, const TratnikParams& params) {
  const int N = params.N;
  const double p1 = params.p1, p2 = params.p2;
  auto K = [&](int mm, int nn) { return tratnik_K2(mm, nn, i, k, params); };
  auto term = [&](double coeff, int mm, int nn) -> double {
    if (mm < 0 || nn < 0 || mm + nn > N) {
      if (std::abs(coeff) > 1e-12)
        throw std::logic_error("tratnik recurrence: nonzero coefficient on "
                               "an out-of-simplex neighbor");
      return 0.0;
    }
    return coeff * K(mm, nn);
  };

  const double K0 = K(m, n);
  const double resA =
      i * K0 - (term(p1 * (m + n - N), m + 1, n) - p1 * (m + n - N) * K0 +
                (1.0 - p1) * m * K0 - term((1.0 - p1) * m, m - 1, n));

  double rhsB = (p1 * p2 / (1.0 - p1) * m +
                 (1.0 - p1 - p2) / (1.0 - p1) * n + p2 * (N - m - n)) *
                K0;
  rhsB -= term(p2 / (1.0 - p1) * m, m - 1, n + 1);
  rhsB -= term(p1 * (1.0 - p1 - p2) / (1.0 - p1) * n, m + 1, n - 1);
  rhsB += term(p2 * m, m - 1, n);
  rhsB += term(p1 * p2 / (1.0 - p1) * (N - n - m), m + 1, n);
  rhsB -= term((1.0 - p1 - p2) * n, m, n - 1);
  rhsB -= term(p2 / (1.0 - p1) * (N - n - m), m, n + 1);
  const double resB = k * K0 - rhsB;

  return {resA, resB};
}

namespace detail {

inline void require_generic_angle(double angle, const std::string& name) {
  if (std::min(std::abs(std::sin(angle)), std::abs(std::cos(angle))) < 1e-8)
    throw std::invalid_argument(name + " is a degenerate angle");
}

}  // namespace detail

/// Q family of C(theta, chi) = R_(yz)(theta) R_(xz)(chi), built through the
/// oracle route: the raising route is non-generic at R12 = 0, the oracle is
/// unconditional.
inline KrawtchoukFamily tratnik_rotation_Q(double theta, double chi, int N) {
  detail::require_generic_angle(theta, "theta");
  detail::require_generic_angle(chi, "chi");
  const RotationMatrix C =
      plane_rotation(3, 2, 3, theta) * plane_rotation(3, 1, 3, chi);
  const RepresentationMatrix rep = representation_matrix(
      std::vector<PlaneRotation>{{2, 3, theta}, {1, 3, chi}}, 2, N);
  return P_to_Q(build_P_oracle(rep, C));
}

/// Max |Q^{C(theta,chi)}_{m,n}(i,k) - K_2(m,n;i,k)| with p1 = sin^2(chi),
/// p2 = sin^2(theta) cos^2(chi), over the full index range.
inline double reduction_check(double theta, double chi, int N) {
  const KrawtchoukFamily fam = tratnik_rotation_Q(theta, chi, N);
  const double s = std::sin(chi), st = std::sin(theta), c = std::cos(chi);
  const TratnikParams params(s * s, st * st * c * c, N);
  double worst = 0.0;
  for (const auto& deg : fam.basis())
    for (const auto& var : fam.basis())
      worst = std::max(
          worst,
          std::abs(fam.Q(deg.n[0], deg.n[1], var.n[0], var.n[1]) -
                   tratnik_K2(deg.n[0], deg.n[1], var.n[0], var.n[1], params)));
  return worst;
}

/// Residual of the degenerate (R12 = 0) three-term recurrence
/// i Q = R11^2 m [Q - Q_{m-1,n}] + R13^2 (N-m-n) [Q - Q_{m+1,n}].
inline double degenerate_recurrence_residual(const KrawtchoukFamily& fam,
                                             int m, int n, int i, int k) {
  const auto& R = fam.rotation();
  const int N = fam.level();
  const double r11sq = R(1, 1) * R(1, 1);
  const double r13sq = R(1, 3) * R(1, 3);
  const double Q0 = fam.Q(m, n, i, k);
  double rhs = 0.0;
  if (m > 0) rhs += r11sq * m * (Q0 - fam.Q(m - 1, n, i, k));
  if (N - m - n > 0) rhs += r13sq * (N - m - n) * (Q0 - fam.Q(m + 1, n, i, k));
  return i * Q0 - rhs;
}

/// Max residual of the squared-entry identities tying C(theta, chi) to
/// (p1, p2): R11^2 = 1 - p1, R21^2 = p1 p2 / (1 - p1), R22^2 =
/// (1 - p1 - p2)/(1 - p1), R31^2 = p1 (1 - p1 - p2)/(1 - p1), R32^2 =
/// p2 / (1 - p1), R33^2 = 1 - p1 - p2.
inline double consistency_identities_residual(double theta, double chi) {
  const RotationMatrix C =
      plane_rotation(3, 2, 3, theta) * plane_rotation(3, 1, 3, chi);
  const double sc = std::sin(chi), cc = std::cos(chi), st = std::sin(theta);
  const double p1 = sc * sc, p2 = st * st * cc * cc;
  auto sq = [&](int r, int c) { return C(r, c) * C(r, c); };
  double worst = std::abs(sq(1, 1) - (1.0 - p1));
  worst = std::max(worst, std::abs(sq(2, 1) - p1 * p2 / (1.0 - p1)));
  worst = std::max(worst,
                   std::abs(sq(2, 2) - (1.0 - p1 - p2) / (1.0 - p1)));
  worst = std::max(worst,
                   std::abs(sq(3, 1) - p1 * (1.0 - p1 - p2) / (1.0 - p1)));
  worst = std::max(worst, std::abs(sq(3, 2) - p2 / (1.0 - p1)));
  worst = std::max(worst, std::abs(sq(3, 3) - (1.0 - p1 - p2)));
  return worst;
}

struct AdditionCheck {
  double residual = 0.0;
  bool used_polynomial_form = false;  // false: matrix-element form only
};

/// Residual of the general addition formula for C = A B. The polynomial
/// (W-ratio) form needs generic A, B, C; when genericity fails, only the
/// matrix-element form is checked and the report says so.
inline AdditionCheck addition_formula_residual(const RotationMatrix& A,
                                               const RotationMatrix& B,
                                               int N) {
  const RotationMatrix C(A.matrix() * B.matrix());
  AdditionCheck out;
  try {
    const KrawtchoukFamily famA = build_P_raising(A, N);
    const KrawtchoukFamily famB = build_P_raising(B, N);
    const KrawtchoukFamily famC = build_P_raising(C, N);
    const LevelBasis& basis = famA.basis();
    double worst = 0.0;
    for (const auto& var : basis) {
      const int i = var.n[0], k = var.n[1];
      const double WA = amplitude(A, N, i, k);
      const double WC = amplitude(C, N, i, k);
      for (const auto& deg : basis) {
        const int m = deg.n[0], n = deg.n[1];
        double rhs = 0.0;
        for (const auto& mid : basis) {
          const int q = mid.n[0], r = mid.n[1];
          rhs += amplitude(B, N, q, r) * famA.P(q, r, i, k) *
                 famB.P(m, n, q, r);
        }
        worst = std::max(worst,
                         std::abs(WC / WA * famC.P(m, n, i, k) - rhs));
      }
    }
    out.residual = worst;
    out.used_polynomial_form = true;
    return out;
  } catch (const GenericityError&) {
    // fall through to the matrix-element form
  }
  const RepresentationMatrix UA = representation_matrix(A, 2, N);
  const RepresentationMatrix UB = representation_matrix(B, 2, N);
  const RepresentationMatrix UC = representation_matrix(C, 2, N);
  out.residual = (UC.matrix() - UA.matrix() * UB.matrix())
                     .cwiseAbs()
                     .maxCoeff();
  out.used_polynomial_form = false;
  return out;
}

/// Right-hand side of the expansion of Q_{m,n}(i,k;N) for
/// R = R_(xz)(phi) C(theta, chi) in Krawtchouk-Tratnik polynomials.
inline double expand_Q_in_tratnik(double phi, double theta, double chi, int N,
                                  int m, int n, int i, int k) {
  detail::require_generic_angle(theta, "theta");
  detail::require_generic_angle(chi, "chi");
  if (m < 0 || n < 0 || m + n > N || i < 0 || k < 0 || i + k > N)
    throw std::invalid_argument("expand_Q_in_tratnik: index out of range");
  const RotationMatrix C =
      plane_rotation(3, 2, 3, theta) * plane_rotation(3, 1, 3, chi);
  const RotationMatrix R = plane_rotation(3, 1, 3, phi) * C;
  for (auto [r, c] : {std::pair{1, 3}, {2, 3}, {3, 1}, {3, 2}, {3, 3}})
    if (std::abs(R(r, c)) < kGenericityEps)
      throw std::invalid_argument("expand_Q_in_tratnik: non-generic rotation");

  const double sp = std::sin(phi), cp = std::cos(phi);
  const double tphi = sp / cp;
  const double sign_i = (i % 2 == 0) ? 1.0 : -1.0;
  const double omega = sign_i * ipow(tphi, i) * ipow(cp, N - k) *
                       ipow(C(3, 3) / R(3, 3), N) * ipow(R(3, 3) / R(1, 3), i) *
                       ipow(C(2, 3) * R(3, 3) / (C(3, 3) * R(2, 3)), k) *
                       ipow(C(3, 1) * R(3, 3) / (C(3, 3) * R(3, 1)), m) *
                       ipow(C(3, 2) * R(3, 3) / (C(3, 3) * R(3, 2)), n);

  const double sc = std::sin(chi), cc = std::cos(chi), st = std::sin(theta);
  const TratnikParams params(sc * sc, st * st * cc * cc, N);
  const double x = tphi * (sc / cc) / std::cos(theta);
  double sum = 0.0;
  double xpow = 1.0;  // x^p / p!
  for (int p = 0; p <= N - k; ++p) {
    if (xpow != 0.0) {
      const double kp =
          p == 0 ? 1.0 : kraw(p, i, UniKrawtchoukParams(sp * sp, N - k));
      sum += xpow * kp * tratnik_K2(m, n, p, k, params);
    }
    xpow *= x / (p + 1);
  }
  return omega * sum;
}

}  // namespace krawpoly
