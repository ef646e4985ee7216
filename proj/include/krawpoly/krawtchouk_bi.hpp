#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "krawpoly/boson_oracle.hpp"
#include "krawpoly/errors.hpp"
#include "krawpoly/fock_basis.hpp"
#include "krawpoly/math_util.hpp"
#include "krawpoly/rotations.hpp"

namespace krawpoly {

/// entries of R required nonzero by routes that divide by them
inline constexpr double kGenericityEps = 1e-10;

inline void require_generic(const RotationMatrix& R,
                            std::initializer_list<std::pair<int, int>> entries,
                            double eps = kGenericityEps) {
  GenericityReport rep;
  rep.threshold = eps;
  for (auto [r, c] : entries)
    if (std::abs(R(r, c)) < eps) rep.vanishing.emplace_back(r, c);
  if (rep.any()) throw GenericityError(rep);
}

inline GenericityReport genericity_report(const RotationMatrix& R,
                                          double eps = kGenericityEps) {
  GenericityReport rep;
  rep.threshold = eps;
  for (auto [r, c] : {std::pair{1, 3}, {2, 3}, {3, 3}, {3, 1}, {3, 2},
                      std::pair{1, 2}, {2, 1}})
    if (std::abs(R(r, c)) < eps) rep.vanishing.emplace_back(r, c);
  return rep;
}

enum class Route { raising, generating, hypergeometric, oracle };

inline std::string route_name(Route r) {
  switch (r) {
    case Route::raising: return "raising";
    case Route::generating: return "generating";
    case Route::hypergeometric: return "hypergeometric";
    case Route::oracle: return "oracle";
  }
  return "?";
}

/// W_{i,k;N} = R13^i R23^k R33^{N-i-k} sqrt(N!/(i!k!(N-i-k)!)),
/// evaluated as sign times exp of log magnitudes so it survives large N
inline double amplitude(const RotationMatrix& R, int N, int i, int k) {
  if (i < 0 || k < 0 || i + k > N)
    throw std::invalid_argument("amplitude: need i,k >= 0, i+k <= N");
  const int expo[3] = {i, k, N - i - k};
  const double entry[3] = {R(1, 3), R(2, 3), R(3, 3)};
  double sign = 1.0;
  double logmag = 0.5 * (log_factorial(N) - log_factorial(i) -
                         log_factorial(k) - log_factorial(N - i - k));
  for (int j = 0; j < 3; ++j) {
    if (expo[j] == 0) continue;
    if (entry[j] == 0.0) return 0.0;
    if (entry[j] < 0.0 && expo[j] % 2 == 1) sign = -sign;
    logmag += expo[j] * std::log(std::abs(entry[j]));
  }
  return sign * std::exp(logmag);
}

/// w_{i,k;N} = W^2, the trinomial orthogonality weight
inline double weight(const RotationMatrix& R, int N, int i, int k) {
  const double W = amplitude(R, N, i, k);
  return W * W;
}

/// Table of P and/or Q values for a fixed (R, N). Rows are ranked variable
/// pairs (i, k), columns ranked degree pairs (m, n), in LevelBasis order.
class KrawtchoukFamily {
 public:
  KrawtchoukFamily(RotationMatrix R, int N, Route route,
                   std::optional<Eigen::MatrixXd> tableP,
                   std::optional<Eigen::MatrixXd> tableQ)
      : R_(std::move(R)),
        basis_(2, N),
        route_(route),
        P_(std::move(tableP)),
        Q_(std::move(tableQ)) {
    const int dim = basis_.size();
    for (const auto* t : {&P_, &Q_})
      if (t->has_value() &&
          ((*t)->rows() != dim || (*t)->cols() != dim))
        throw std::invalid_argument("KrawtchoukFamily: table size mismatch");
  }

  const RotationMatrix& rotation() const { return R_; }
  int level() const { return basis_.N(); }
  const LevelBasis& basis() const { return basis_; }
  Route route() const { return route_; }

  bool has_P() const { return P_.has_value(); }
  bool has_Q() const { return Q_.has_value(); }

  double P(int m, int n, int i, int k) const {
    if (!P_) throw std::logic_error("KrawtchoukFamily: no P table");
    return (*P_)(rank(i, k), rank(m, n));
  }
  double Q(int m, int n, int i, int k) const {
    if (!Q_) throw std::logic_error("KrawtchoukFamily: no Q table");
    return (*Q_)(rank(i, k), rank(m, n));
  }

  const Eigen::MatrixXd& tableP() const {
    if (!P_) throw std::logic_error("KrawtchoukFamily: no P table");
    return *P_;
  }
  const Eigen::MatrixXd& tableQ() const {
    if (!Q_) throw std::logic_error("KrawtchoukFamily: no Q table");
    return *Q_;
  }

  /// test hook: additively perturb one P entry
  void perturb_P(int m, int n, int i, int k, double delta) {
    if (!P_) throw std::logic_error("KrawtchoukFamily: no P table");
    (*P_)(rank(i, k), rank(m, n)) += delta;
  }

  int rank(int a, int b) const { return basis_.rank(std::vector<int>{a, b}); }

 private:
  RotationMatrix R_;
  LevelBasis basis_;
  Route route_;
  std::optional<Eigen::MatrixXd> P_;
  std::optional<Eigen::MatrixXd> Q_;
};

/// Builds the full P table iteratively from P_{0,0} = 1 across levels
/// 0..N, one application of a raising relation per degree step.
inline KrawtchoukFamily build_P_raising(const RotationMatrix& R, int N) {
  require_generic(R, {{1, 3}, {2, 3}, {3, 3}});
  const double r11 = R(1, 1), r12 = R(1, 2), r13 = R(1, 3);
  const double r21 = R(2, 1), r22 = R(2, 2), r23 = R(2, 3);
  const double r31 = R(3, 1), r32 = R(3, 2), r33 = R(3, 3);

  Eigen::MatrixXd prev = Eigen::MatrixXd::Ones(1, 1);  // level 0
  for (int L = 1; L <= N; ++L) {
    const LevelBasis cur(2, L);
    const LevelBasis below(2, L - 1);
    Eigen::MatrixXd table(cur.size(), cur.size());
    // value of the level L-1 table, zero-coefficient convention on the
    // (i-1, k-1) shifts
    auto lower = [&](int m, int n, int i, int k) -> double {
      return prev(below.rank(std::vector<int>{i, k}),
                  below.rank(std::vector<int>{m, n}));
    };
    for (int col = 0; col < cur.size(); ++col) {
      const auto& deg = cur.at(col);
      const int m = deg.n[0], n = deg.n[1];
      for (int row = 0; row < cur.size(); ++row) {
        const auto& var = cur.at(row);
        const int i = var.n[0], k = var.n[1];
        double v;
        if (m == 0 && n == 0) {
          v = 1.0;
        } else if (m >= 1) {
          double acc = 0.0;
          if (i > 0) acc += (r11 / r13) * i * lower(m - 1, n, i - 1, k);
          if (k > 0) acc += (r21 / r23) * k * lower(m - 1, n, i, k - 1);
          if (L - i - k > 0)
            acc += (r31 / r33) * (L - i - k) * lower(m - 1, n, i, k);
          v = acc / std::sqrt(static_cast<double>(L) * m);
        } else {  // m == 0, n >= 1
          double acc = 0.0;
          if (i > 0) acc += (r12 / r13) * i * lower(0, n - 1, i - 1, k);
          if (k > 0) acc += (r22 / r23) * k * lower(0, n - 1, i, k - 1);
          if (L - i - k > 0)
            acc += (r32 / r33) * (L - i - k) * lower(0, n - 1, i, k);
          v = acc / std::sqrt(static_cast<double>(L) * n);
        }
        table(row, col) = v;
      }
    }
    prev = std::move(table);
  }
  return KrawtchoukFamily(R, N, Route::raising, std::move(prev), std::nullopt);
}

/// P from the ground truth: matrix element divided by the amplitude.
inline KrawtchoukFamily build_P_oracle(const RepresentationMatrix& rep,
                                       const RotationMatrix& R) {
  if (rep.basis().d() != 2)
    throw std::invalid_argument("build_P_oracle: d = 2 representation needed");
  const int N = rep.basis().N();
  const int dim = rep.basis().size();
  Eigen::MatrixXd table(dim, dim);
  for (int row = 0; row < dim; ++row) {
    const auto& var = rep.basis().at(row);
    const double W = amplitude(R, N, var.n[0], var.n[1]);
    for (int col = 0; col < dim; ++col) {
      const double u = rep.matrix()(row, col);
      if (std::abs(W) < 1e-14) {
        if (std::abs(u) > 1e-9)
          throw std::domain_error(
              "build_P_oracle: W vanishes at a point with a nonzero matrix "
              "element; the W*P factorization fails for this rotation");
        table(row, col) = 0.0;
      } else {
        table(row, col) = u / W;
      }
    }
  }
  return KrawtchoukFamily(R, N, Route::oracle, std::move(table), std::nullopt);
}

inline KrawtchoukFamily build_P_oracle(const RotationMatrix& R, int N) {
  return build_P_oracle(representation_matrix(R, 2, N), R);
}

namespace detail {

// monic rescaling: P = sqrt(N!/(m!n!(N-m-n)!)) (R31/R33)^m (R32/R33)^n Q
inline double def_q_scale(const RotationMatrix& R, int N, int m, int n) {
  return std::sqrt(trinomial(N, m, n)) * ipow(R(3, 1) / R(3, 3), m) *
         ipow(R(3, 2) / R(3, 3), n);
}

}  // namespace detail

inline KrawtchoukFamily P_to_Q(const KrawtchoukFamily& fam) {
  const auto& R = fam.rotation();
  require_generic(R, {{3, 1}, {3, 2}, {3, 3}});
  const int N = fam.level();
  const int dim = fam.basis().size();
  Eigen::MatrixXd tableQ(dim, dim);
  for (int col = 0; col < dim; ++col) {
    const auto& deg = fam.basis().at(col);
    const double c = detail::def_q_scale(R, N, deg.n[0], deg.n[1]);
    tableQ.col(col) = fam.tableP().col(col) / c;
  }
  return KrawtchoukFamily(R, N, fam.route(), fam.tableP(), std::move(tableQ));
}

inline KrawtchoukFamily Q_to_P(const KrawtchoukFamily& fam) {
  const auto& R = fam.rotation();
  require_generic(R, {{3, 1}, {3, 2}, {3, 3}});
  const int N = fam.level();
  const int dim = fam.basis().size();
  Eigen::MatrixXd tableP(dim, dim);
  for (int col = 0; col < dim; ++col) {
    const auto& deg = fam.basis().at(col);
    const double c = detail::def_q_scale(R, N, deg.n[0], deg.n[1]);
    tableP.col(col) = fam.tableQ().col(col) * c;
  }
  return KrawtchoukFamily(R, N, fam.route(), std::move(tableP), fam.tableQ());
}

namespace detail {

// dense bivariate polynomial, coeff(a, b) of z1^a z2^b
class BiPoly {
 public:
  explicit BiPoly(int maxdeg)
      : c_(Eigen::MatrixXd::Zero(maxdeg + 1, maxdeg + 1)) {
    c_(0, 0) = 1.0;
  }

  // multiply by (1 + alpha z1 + beta z2), repeated e times
  void mul_linear(double alpha, double beta, int e) {
    for (int rep = 0; rep < e; ++rep) {
      Eigen::MatrixXd next = c_;
      for (int a = 0; a + 1 < c_.rows(); ++a)
        for (int b = 0; a + b < c_.cols() - 1; ++b) {
          next(a + 1, b) += alpha * c_(a, b);
          next(a, b + 1) += beta * c_(a, b);
        }
      c_ = std::move(next);
    }
  }

  double coeff(int a, int b) const { return c_(a, b); }

 private:
  Eigen::MatrixXd c_;
};

struct RahmanRatios {
  double u11, u12, u21, u22;
};

inline RahmanRatios rahman_ratios(const RotationMatrix& R) {
  require_generic(R, {{1, 3}, {2, 3}, {3, 1}, {3, 2}, {3, 3}});
  return {R(1, 1) * R(3, 3) / (R(1, 3) * R(3, 1)),
          R(1, 2) * R(3, 3) / (R(1, 3) * R(3, 2)),
          R(2, 1) * R(3, 3) / (R(2, 3) * R(3, 1)),
          R(2, 2) * R(3, 3) / (R(2, 3) * R(3, 2))};
}

}  // namespace detail

/// Q_{m,n}(i,k;N) as the z1^m z2^n coefficient of
/// (1+u11 z1+u12 z2)^i (1+u21 z1+u22 z2)^k (1+z1+z2)^{N-i-k},
/// divided by the trinomial coefficient.
inline KrawtchoukFamily Q_via_generating(const RotationMatrix& R, int N) {
  const auto u = detail::rahman_ratios(R);
  const LevelBasis basis(2, N);
  const int dim = basis.size();
  Eigen::MatrixXd tableQ(dim, dim);
  for (int row = 0; row < dim; ++row) {
    const auto& var = basis.at(row);
    const int i = var.n[0], k = var.n[1];
    detail::BiPoly poly(N);
    poly.mul_linear(u.u11, u.u12, i);
    poly.mul_linear(u.u21, u.u22, k);
    poly.mul_linear(1.0, 1.0, N - i - k);
    for (int col = 0; col < dim; ++col) {
      const auto& deg = basis.at(col);
      const int m = deg.n[0], n = deg.n[1];
      tableQ(row, col) = poly.coeff(m, n) / trinomial(N, m, n);
    }
  }
  return KrawtchoukFamily(R, N, Route::generating, std::nullopt,
                          std::move(tableQ));
}

/// Q via the explicit Gel'fand-Aomoto quadruple sum with
/// omega_{jl} = 1 - u_{jl}; every Pochhammer of a negative integer
/// truncates the sum to a finite simplex.
inline KrawtchoukFamily Q_via_hypergeometric(const RotationMatrix& R, int N) {
  const auto u = detail::rahman_ratios(R);
  const double w11 = 1.0 - u.u11, w12 = 1.0 - u.u12;
  const double w21 = 1.0 - u.u21, w22 = 1.0 - u.u22;
  const LevelBasis basis(2, N);
  const int dim = basis.size();
  Eigen::MatrixXd tableQ(dim, dim);
  for (int row = 0; row < dim; ++row) {
    const int vi = basis.at(row).n[0], vk = basis.at(row).n[1];
    for (int col = 0; col < dim; ++col) {
      const int m = basis.at(col).n[0], n = basis.at(col).n[1];
      double sum = 0.0;
      for (int a = 0; a <= m && a <= vi; ++a)
        for (int b = 0; a + b <= m && b <= vk; ++b)
          for (int c = 0; c <= n && a + c <= vi; ++c)
            for (int e = 0; c + e <= n && b + e <= vk; ++e) {
              const int tot = a + b + c + e;
              sum += pochhammer(-m, a + b) * pochhammer(-n, c + e) *
                     pochhammer(-vi, a + c) * pochhammer(-vk, b + e) /
                     (factorial(a) * factorial(b) * factorial(c) *
                      factorial(e) * pochhammer(-N, tot)) *
                     ipow(w11, a) * ipow(w21, b) * ipow(w12, c) * ipow(w22, e);
            }
      tableQ(row, col) = sum;
    }
  }
  return KrawtchoukFamily(R, N, Route::hypergeometric, std::nullopt,
                          std::move(tableQ));
}

/// Residual of the lowering relations: needs the families at levels N and
/// N+1 for the same rotation. which selects relation 1 or 2.
inline double lowering_residual(const KrawtchoukFamily& famN,
                                const KrawtchoukFamily& famNp1, int which,
                                int m, int n, int i, int k) {
  const int N = famN.level();
  if (famNp1.level() != N + 1)
    throw std::invalid_argument("lowering_residual: need levels N and N+1");
  const auto& R = famN.rotation();
  const double alpha = which == 1 ? R(1, 1) * R(1, 3) : R(1, 2) * R(1, 3);
  const double beta = which == 1 ? R(2, 1) * R(2, 3) : R(2, 2) * R(2, 3);
  const int deg = which == 1 ? m : n;
  double lhs = 0.0;
  if (deg > 0) {
    lhs = std::sqrt(static_cast<double>(deg) / (N + 1)) *
          (which == 1 ? famN.P(m - 1, n, i, k) : famN.P(m, n - 1, i, k));
  }
  const double base = famNp1.P(m, n, i, k);
  const double rhs = alpha * (famNp1.P(m, n, i + 1, k) - base) +
                     beta * (famNp1.P(m, n, i, k + 1) - base);
  return lhs - rhs;
}

namespace detail {

// neighbor access with the vanishing-coefficient convention: out-of-simplex
// indices must come with a zero coefficient
template <typename Table>
inline double term(const Table& q, double coeff, int N, int a, int b, int c,
                   int e) {
  if (a < 0 || b < 0 || a + b > N || c < 0 || e < 0 || c + e > N) {
    if (std::abs(coeff) > 1e-12)
      throw std::logic_error("recurrence: nonzero coefficient on an "
                             "out-of-simplex neighbor");
    return 0.0;
  }
  return coeff * q(a, b, c, e);
}

}  // namespace detail

/// Residual of the seven-term recurrence in the degrees (m, n); which = 1
/// gives the relation with eigenvalue i, which = 2 the one with k.
inline double recurrence_residual_Q(const KrawtchoukFamily& fam, int which,
                                    int m, int n, int i, int k) {
  const auto& R = fam.rotation();
  const int N = fam.level();
  const double a1 = which == 1 ? R(1, 1) : R(2, 1);
  const double a2 = which == 1 ? R(1, 2) : R(2, 2);
  const double a3 = which == 1 ? R(1, 3) : R(2, 3);
  const double r31 = R(3, 1), r32 = R(3, 2), r33 = R(3, 3);
  auto q = [&](int mm, int nn, int ii, int kk) { return fam.Q(mm, nn, ii, kk); };
  const double lhs = (which == 1 ? i : k) * q(m, n, i, k);
  double rhs = (a1 * a1 * m + a2 * a2 * n + a3 * a3 * (N - m - n)) *
               q(m, n, i, k);
  rhs += detail::term(q, a1 * a2 * r32 / r31 * m, N, m - 1, n + 1, i, k);
  rhs += detail::term(q, a1 * a2 * r31 / r32 * n, N, m + 1, n - 1, i, k);
  rhs += detail::term(q, a1 * a3 * r33 / r31 * m, N, m - 1, n, i, k);
  rhs += detail::term(q, a1 * a3 * r31 / r33 * (N - m - n), N, m + 1, n, i, k);
  rhs += detail::term(q, a2 * a3 * r33 / r32 * n, N, m, n - 1, i, k);
  rhs += detail::term(q, a2 * a3 * r32 / r33 * (N - m - n), N, m, n + 1, i, k);
  return lhs - rhs;
}

/// Residual of the dual difference equation in the variables (i, k); the
/// coefficient pattern is the recurrence one under (m <-> i, n <-> k,
/// R <-> R^T).
inline double difference_residual_Q(const KrawtchoukFamily& fam, int which,
                                    int m, int n, int i, int k) {
  const auto& R = fam.rotation();
  const int N = fam.level();
  const double a1 = which == 1 ? R(1, 1) : R(1, 2);
  const double a2 = which == 1 ? R(2, 1) : R(2, 2);
  const double a3 = which == 1 ? R(3, 1) : R(3, 2);
  const double r13 = R(1, 3), r23 = R(2, 3), r33 = R(3, 3);
  auto q = [&](int ii, int kk, int mm, int nn) { return fam.Q(mm, nn, ii, kk); };
  const double lhs = (which == 1 ? m : n) * q(i, k, m, n);
  double rhs = (a1 * a1 * i + a2 * a2 * k + a3 * a3 * (N - i - k)) *
               q(i, k, m, n);
  rhs += detail::term(q, a1 * a2 * r23 / r13 * i, N, i - 1, k + 1, m, n);
  rhs += detail::term(q, a1 * a2 * r13 / r23 * k, N, i + 1, k - 1, m, n);
  rhs += detail::term(q, a1 * a3 * r33 / r13 * i, N, i - 1, k, m, n);
  rhs += detail::term(q, a1 * a3 * r13 / r33 * (N - i - k), N, i + 1, k, m, n);
  rhs += detail::term(q, a2 * a3 * r33 / r23 * k, N, i, k - 1, m, n);
  rhs += detail::term(q, a2 * a3 * r23 / r33 * (N - i - k), N, i, k + 1, m, n);
  return lhs - rhs;
}

/// Residual of the square-root-coefficient recurrence satisfied by P.
inline double recurrence_residual_P(const KrawtchoukFamily& fam, int which,
                                    int m, int n, int i, int k) {
  const auto& R = fam.rotation();
  const int N = fam.level();
  const double a1 = which == 1 ? R(1, 1) : R(2, 1);
  const double a2 = which == 1 ? R(1, 2) : R(2, 2);
  const double a3 = which == 1 ? R(1, 3) : R(2, 3);
  auto p = [&](int mm, int nn, int ii, int kk) { return fam.P(mm, nn, ii, kk); };
  const int l = N - m - n;
  const double lhs = (which == 1 ? i : k) * p(m, n, i, k);
  double rhs = (a1 * a1 * m + a2 * a2 * n + a3 * a3 * l) * p(m, n, i, k);
  rhs += detail::term(p, a1 * a2 * std::sqrt(m * (n + 1.0)), N, m - 1, n + 1,
                      i, k);
  rhs += detail::term(p, a1 * a2 * std::sqrt(n * (m + 1.0)), N, m + 1, n - 1,
                      i, k);
  rhs += detail::term(p, a1 * a3 * std::sqrt(m * (l + 1.0)), N, m - 1, n, i, k);
  rhs += detail::term(p, a1 * a3 * std::sqrt((m + 1.0) * l), N, m + 1, n, i, k);
  rhs += detail::term(p, a2 * a3 * std::sqrt(n * (l + 1.0)), N, m, n - 1, i, k);
  rhs += detail::term(p, a2 * a3 * std::sqrt((n + 1.0) * l), N, m, n + 1, i, k);
  return lhs - rhs;
}

/// Max residual of Q^{(R)}_{i,k}(m,n;N) = Q^{(R^T)}_{m,n}(i,k;N) over the
/// full index range. Both families are built through the oracle route so
/// the check does not presuppose any polynomial identity.
inline double duality_check(const RotationMatrix& R, int N) {
  const KrawtchoukFamily famR = P_to_Q(build_P_oracle(R, N));
  const KrawtchoukFamily famT = P_to_Q(build_P_oracle(R.transposed(), N));
  double worst = 0.0;
  for (const auto& deg : famR.basis())
    for (const auto& var : famR.basis()) {
      const int i = deg.n[0], k = deg.n[1];
      const int m = var.n[0], n = var.n[1];
      worst = std::max(worst, std::abs(famR.Q(i, k, m, n) -
                                       famT.Q(m, n, i, k)));
    }
  return worst;
}

}  // namespace krawpoly
