#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "krawpoly/boson_oracle.hpp"
#include "krawpoly/errors.hpp"
#include "krawpoly/fock_basis.hpp"
#include "krawpoly/krawtchouk_bi.hpp"
#include "krawpoly/math_util.hpp"
#include "krawpoly/rotations.hpp"

namespace krawpoly {

/// log of N! / (i_1! ... i_d! (N - sum)!)
inline double log_multinomial(int N, const std::vector<int>& i) {
  int s = 0;
  double acc = log_factorial(N);
  for (int v : i) {
    acc -= log_factorial(v);
    s += v;
  }
  return acc - log_factorial(N - s);
}

/// W_{i_1..i_d;N} for a (d+1)x(d+1) rotation
inline double amplitude_d(const RotationMatrix& R, int N,
                          const std::vector<int>& i) {
  const int d = R.size() - 1;
  if (static_cast<int>(i.size()) != d)
    throw std::invalid_argument("amplitude_d: index size mismatch");
  int s = 0;
  for (int v : i) {
    if (v < 0) throw std::invalid_argument("amplitude_d: negative index");
    s += v;
  }
  if (s > N) throw std::invalid_argument("amplitude_d: sum exceeds N");
  double sign = 1.0;
  double logmag = 0.5 * log_multinomial(N, i);
  auto fold = [&](double entry, int expo) -> bool {
    if (expo == 0) return true;
    if (entry == 0.0) return false;
    if (entry < 0.0 && expo % 2 == 1) sign = -sign;
    logmag += expo * std::log(std::abs(entry));
    return true;
  };
  for (int j = 0; j < d; ++j)
    if (!fold(R(j + 1, d + 1), i[j])) return 0.0;
  if (!fold(R(d + 1, d + 1), N - s)) return 0.0;
  return sign * std::exp(logmag);
}

/// General-d table of P and/or Q. Rows are ranked variable multi-indices,
/// columns ranked degree multi-indices, both in LevelBasis(d, N) order.
class MultiFamily {
 public:
  MultiFamily(RotationMatrix R, int N, Route route,
              std::optional<Eigen::MatrixXd> tableP,
              std::optional<Eigen::MatrixXd> tableQ)
      : R_(std::move(R)),
        basis_(R_.size() - 1, N),
        route_(route),
        P_(std::move(tableP)),
        Q_(std::move(tableQ)) {}

  const RotationMatrix& rotation() const { return R_; }
  int d() const { return basis_.d(); }
  int level() const { return basis_.N(); }
  const LevelBasis& basis() const { return basis_; }
  Route route() const { return route_; }
  bool has_P() const { return P_.has_value(); }
  bool has_Q() const { return Q_.has_value(); }

  double P(const std::vector<int>& deg, const std::vector<int>& var) const {
    if (!P_) throw std::logic_error("MultiFamily: no P table");
    return (*P_)(basis_.rank(var), basis_.rank(deg));
  }
  double Q(const std::vector<int>& deg, const std::vector<int>& var) const {
    if (!Q_) throw std::logic_error("MultiFamily: no Q table");
    return (*Q_)(basis_.rank(var), basis_.rank(deg));
  }
  const Eigen::MatrixXd& tableP() const {
    if (!P_) throw std::logic_error("MultiFamily: no P table");
    return *P_;
  }
  const Eigen::MatrixXd& tableQ() const {
    if (!Q_) throw std::logic_error("MultiFamily: no Q table");
    return *Q_;
  }

 private:
  RotationMatrix R_;
  LevelBasis basis_;
  Route route_;
  std::optional<Eigen::MatrixXd> P_;
  std::optional<Eigen::MatrixXd> Q_;
};

/// d-variate raising construction, derived from <i|U a_j^dag|n>_{N-1}
/// exactly as in the d = 2 case (one relation per mode j = 1..d).
/// Divides by the last column of R.
inline MultiFamily build_P_d_raising(const RotationMatrix& R, int N) {
  const int d = R.size() - 1;
  {
    GenericityReport rep;
    for (int j = 1; j <= d + 1; ++j)
      if (std::abs(R(j, d + 1)) < kGenericityEps)
        rep.vanishing.emplace_back(j, d + 1);
    if (rep.any()) throw GenericityError(rep);
  }

  Eigen::MatrixXd prev = Eigen::MatrixXd::Ones(1, 1);
  for (int L = 1; L <= N; ++L) {
    const LevelBasis cur(d, L);
    const LevelBasis below(d, L - 1);
    Eigen::MatrixXd table(cur.size(), cur.size());
    for (int col = 0; col < cur.size(); ++col) {
      std::vector<int> deg = cur.at(col).n;
      // raise the first nonzero degree component
      int j = -1;
      for (int t = 0; t < d; ++t)
        if (deg[t] > 0) {
          j = t;
          break;
        }
      for (int row = 0; row < cur.size(); ++row) {
        const auto& var = cur.at(row);
        if (j < 0) {
          table(row, col) = 1.0;
          continue;
        }
        std::vector<int> lower_deg = deg;
        lower_deg[j] -= 1;
        const int deg_col = below.rank(lower_deg);
        double acc = 0.0;
        std::vector<int> shifted = var.n;
        for (int l = 0; l < d; ++l) {
          if (var.n[l] == 0) continue;
          shifted[l] -= 1;
          acc += R(l + 1, j + 1) / R(l + 1, d + 1) * var.n[l] *
                 prev(below.rank(shifted), deg_col);
          shifted[l] += 1;
        }
        const int rest = L - var.sum();
        if (rest > 0)
          acc += R(d + 1, j + 1) / R(d + 1, d + 1) * rest *
                 prev(below.rank(var.n), deg_col);
        table(row, col) =
            acc / std::sqrt(static_cast<double>(L) * deg[j]);
      }
    }
    prev = std::move(table);
  }
  return MultiFamily(R, N, Route::raising, std::move(prev), std::nullopt);
}

inline MultiFamily build_P_d_oracle(const RotationMatrix& R, int N) {
  const int d = R.size() - 1;
  const RepresentationMatrix rep = representation_matrix(R, d, N);
  const int dim = rep.basis().size();
  Eigen::MatrixXd table(dim, dim);
  for (int row = 0; row < dim; ++row) {
    const double W = amplitude_d(R, N, rep.basis().at(row).n);
    for (int col = 0; col < dim; ++col) {
      const double u = rep.matrix()(row, col);
      if (std::abs(W) < 1e-14) {
        if (std::abs(u) > 1e-9)
          throw std::domain_error(
              "build_P_d_oracle: W*P factorization fails for this rotation");
        table(row, col) = 0.0;
      } else {
        table(row, col) = u / W;
      }
    }
  }
  return MultiFamily(R, N, Route::oracle, std::move(table), std::nullopt);
}

/// raising route when generic, oracle otherwise
inline MultiFamily build_P_d(const RotationMatrix& R, int N) {
  try {
    return build_P_d_raising(R, N);
  } catch (const GenericityError&) {
    return build_P_d_oracle(R, N);
  }
}

namespace detail {

// d-variate Def-Q scale, the natural generalization of the d = 2 one
inline double def_q_scale_d(const RotationMatrix& R, int N,
                            const std::vector<int>& deg) {
  const int d = R.size() - 1;
  double c = std::exp(0.5 * log_multinomial(N, deg));
  for (int k = 0; k < d; ++k)
    c *= ipow(R(d + 1, k + 1) / R(d + 1, d + 1), deg[k]);
  return c;
}

}  // namespace detail

inline MultiFamily P_to_Q_d(const MultiFamily& fam) {
  const auto& R = fam.rotation();
  const int d = fam.d();
  {
    GenericityReport rep;
    for (int j = 1; j <= d + 1; ++j)
      if (std::abs(R(d + 1, j)) < kGenericityEps)
        rep.vanishing.emplace_back(d + 1, j);
    if (rep.any()) throw GenericityError(rep);
  }
  const int N = fam.level();
  Eigen::MatrixXd tableQ(fam.basis().size(), fam.basis().size());
  for (int col = 0; col < fam.basis().size(); ++col)
    tableQ.col(col) = fam.tableP().col(col) /
                      detail::def_q_scale_d(R, N, fam.basis().at(col).n);
  return MultiFamily(R, N, fam.route(), fam.tableP(), std::move(tableQ));
}

/// Monic-normalized Q by exact multivariate expansion of
/// (1 + sum z)^{N-sum i} prod_j (1 + sum_k u_{j,k} z_k)^{i_j} with
/// u_{j,k} = R_{j,k} R_{d+1,d+1} / (R_{j,d+1} R_{d+1,k}).
inline MultiFamily Q_via_generating_d(const RotationMatrix& R, int N) {
  const int d = R.size() - 1;
  {
    GenericityReport rep;
    for (int j = 1; j <= d + 1; ++j) {
      if (std::abs(R(j, d + 1)) < kGenericityEps)
        rep.vanishing.emplace_back(j, d + 1);
      if (std::abs(R(d + 1, j)) < kGenericityEps &&
          (rep.vanishing.empty() || rep.vanishing.back() != std::pair{d + 1, j}))
        rep.vanishing.emplace_back(d + 1, j);
    }
    if (rep.any()) throw GenericityError(rep);
  }
  const LevelBasis basis(d, N);
  const int dim = basis.size();

  // monomials z^a with total degree <= N, indexed by LevelBasis rank
  auto mul_linear = [&](std::vector<double>& coeffs,
                        const std::vector<double>& lin, int e) {
    for (int rep = 0; rep < e; ++rep) {
      std::vector<double> next = coeffs;
      for (int r = 0; r < dim; ++r) {
        if (coeffs[r] == 0.0) continue;
        const auto& mono = basis.at(r);
        if (mono.sum() == N) continue;
        std::vector<int> up = mono.n;
        for (int t = 0; t < d; ++t) {
          up[t] += 1;
          next[basis.rank(up)] += lin[t] * coeffs[r];
          up[t] -= 1;
        }
      }
      coeffs = std::move(next);
    }
  };

  Eigen::MatrixXd tableQ(dim, dim);
  std::vector<double> ones(d, 1.0);
  for (int row = 0; row < dim; ++row) {
    const auto& var = basis.at(row);
    std::vector<double> coeffs(dim, 0.0);
    coeffs[basis.rank(std::vector<int>(d, 0))] = 1.0;
    for (int j = 0; j < d; ++j) {
      std::vector<double> lin(d);
      for (int k = 0; k < d; ++k)
        lin[k] = R(j + 1, k + 1) * R(d + 1, d + 1) /
                 (R(j + 1, d + 1) * R(d + 1, k + 1));
      mul_linear(coeffs, lin, var.n[j]);
    }
    mul_linear(coeffs, ones, N - var.sum());
    for (int col = 0; col < dim; ++col)
      tableQ(row, col) =
          coeffs[col] / std::exp(log_multinomial(N, basis.at(col).n));
  }
  return MultiFamily(R, N, Route::generating, std::nullopt, std::move(tableQ));
}

}  // namespace krawpoly
