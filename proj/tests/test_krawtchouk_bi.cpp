#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "krawpoly/krawtchouk_bi.hpp"
#include "krawpoly/param_maps.hpp"
#include "krawpoly/rotations.hpp"

using namespace krawpoly;

namespace {

double max_abs(const Eigen::MatrixXd& M) { return M.cwiseAbs().maxCoeff(); }

// rotation with a prescribed unit third column, the first two columns
// completed by Gram-Schmidt
RotationMatrix rotation_with_third_column(const Eigen::Vector3d& col3) {
  Eigen::Vector3d c3 = col3.normalized();
  Eigen::Vector3d seed(1.0, 0.0, 0.0);
  if (std::abs(c3.dot(seed)) > 0.9) seed = Eigen::Vector3d(0.0, 1.0, 0.0);
  Eigen::Vector3d c1 = (seed - seed.dot(c3) * c3).normalized();
  Eigen::Vector3d c2 = c3.cross(c1);
  Eigen::Matrix3d M;
  M.col(0) = c1;
  M.col(1) = c2;
  M.col(2) = c3;
  if (M.determinant() < 0) M.col(0) = -c1;
  return RotationMatrix(M);
}

Eigen::MatrixXd weighted_gram(const KrawtchoukFamily& fam) {
  const int dim = fam.basis().size();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const auto& var = fam.basis().at(r);
    const double w =
        weight(fam.rotation(), fam.level(), var.n[0], var.n[1]);
    G += w * fam.tableP().row(r).transpose() * fam.tableP().row(r);
  }
  return G;
}

}  // namespace

TEST_SUITE("krawtchouk_bi") {

TEST_CASE("amplitude ground value and a hand-checked entry") {
  std::mt19937 rng(31);
  const RotationMatrix R = random_generic_rotation(3, rng);
  CHECK(amplitude(R, 3, 0, 0) ==
        doctest::Approx(ipow(R(3, 3), 3)).epsilon(1e-14));

  const RotationMatrix T =
      rotation_with_third_column({2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0});
  CHECK(amplitude(T, 2, 1, 1) ==
        doctest::Approx(std::sqrt(2.0) * 4.0 / 9.0).epsilon(1e-14));
  CHECK_THROWS_AS(amplitude(T, 2, 2, 1), std::invalid_argument);
}

TEST_CASE("weights form a trinomial probability distribution") {
  std::mt19937 rng(32);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const int N = 6;
  double total = 0.0;
  for (int i = 0; i <= N; ++i)
    for (int k = 0; i + k <= N; ++k) total += weight(R, N, i, k);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // the weight is the trinomial coefficient times powers of the squared
  // third-column entries
  const EtaWeights eta = eta_from_R(R);
  const int i = 2, k = 3;
  CHECK(weight(R, N, i, k) ==
        doctest::Approx(trinomial(N, i, k) * ipow(eta.eta1, i) *
                        ipow(eta.eta2, k) * ipow(eta.eta0, N - i - k))
            .epsilon(1e-13));
}

TEST_CASE("raising route starts from one and stays orthonormal") {
  std::mt19937 rng(33);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const KrawtchoukFamily fam = build_P_raising(R, 4);
  for (const auto& var : fam.basis())
    CHECK(fam.P(0, 0, var.n[0], var.n[1]) == 1.0);
  const int dim = fam.basis().size();
  CHECK(max_abs(weighted_gram(fam) - Eigen::MatrixXd::Identity(dim, dim)) <=
        1e-10);
}

TEST_CASE("raising route at level one reproduces ratios of entries") {
  std::mt19937 rng(34);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const KrawtchoukFamily fam = build_P_raising(R, 1);
  // P_{1,0}(i,k;1) with (i,k) in {(0,0),(0,1),(1,0)}
  CHECK(fam.P(1, 0, 0, 0) == doctest::Approx(R(3, 1) / R(3, 3)));
  CHECK(fam.P(1, 0, 0, 1) == doctest::Approx(R(2, 1) / R(2, 3)));
  CHECK(fam.P(1, 0, 1, 0) == doctest::Approx(R(1, 1) / R(1, 3)));
  CHECK(fam.P(0, 1, 1, 0) == doctest::Approx(R(1, 2) / R(1, 3)));
}

TEST_CASE("oracle route agrees with raising and normalizes the ground state") {
  std::mt19937 rng(35);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const int N = 5;
  const KrawtchoukFamily viaRaising = build_P_raising(R, N);
  const KrawtchoukFamily viaOracle = build_P_oracle(R, N);
  CHECK(max_abs(viaRaising.tableP() - viaOracle.tableP()) <= 1e-9);
  for (const auto& var : viaOracle.basis())
    CHECK(viaOracle.P(0, 0, var.n[0], var.n[1]) ==
          doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("lowering relations connect adjacent levels") {
  std::mt19937 rng(36);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const int N = 3;
  const KrawtchoukFamily famN = build_P_oracle(R, N);
  KrawtchoukFamily famNp1 = build_P_oracle(R, N + 1);
  for (int which : {1, 2})
    for (const auto& deg : famN.basis())
      for (const auto& var : famN.basis())
        CHECK(std::abs(lowering_residual(famN, famNp1, which, deg.n[0],
                                         deg.n[1], var.n[0], var.n[1])) <=
              1e-9);
  // the residual is sensitive: corrupting one table entry breaks it
  famNp1.perturb_P(1, 0, 1, 0, 1e-3);
  double worst = 0.0;
  for (const auto& var : famN.basis())
    worst = std::max(worst,
                     std::abs(lowering_residual(famN, famNp1, 1, 1, 0,
                                                var.n[0], var.n[1])));
  CHECK(worst > 1e-4);
}

TEST_CASE("P and Q tables convert back and forth exactly") {
  std::mt19937 rng(37);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const KrawtchoukFamily fam = P_to_Q(build_P_oracle(R, 4));
  for (const auto& var : fam.basis())
    CHECK(fam.Q(0, 0, var.n[0], var.n[1]) ==
          doctest::Approx(1.0).epsilon(1e-11));
  const KrawtchoukFamily back = Q_to_P(fam);
  CHECK(max_abs(back.tableP() - fam.tableP()) <= 1e-12);
}

TEST_CASE("duality holds for Q and fails for P") {
  std::mt19937 rng(38);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const int N = 4;
  CHECK(duality_check(R, N) <= 1e-9);

  const KrawtchoukFamily famR = build_P_oracle(R, N);
  const KrawtchoukFamily famT = build_P_oracle(R.transposed(), N);
  double worstP = 0.0;
  for (const auto& deg : famR.basis())
    for (const auto& var : famR.basis())
      worstP = std::max(
          worstP, std::abs(famR.P(deg.n[0], deg.n[1], var.n[0], var.n[1]) -
                           famT.P(var.n[0], var.n[1], deg.n[0], deg.n[1])));
  CHECK(worstP > 1e-3);
}

TEST_CASE("generating route matches raising after normalization") {
  std::mt19937 rng(39);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const int N = 4;
  const KrawtchoukFamily gen = Q_to_P(Q_via_generating(R, N));
  const KrawtchoukFamily rai = build_P_raising(R, N);
  CHECK(max_abs(gen.tableP() - rai.tableP()) <= 1e-9);
  // Q_{m,n}(0,0) = 1 since the generating product collapses to (1+z1+z2)^N
  for (const auto& deg : gen.basis())
    CHECK(gen.Q(deg.n[0], deg.n[1], 0, 0) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hypergeometric route matches generating") {
  std::mt19937 rng(40);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const int N = 5;
  const KrawtchoukFamily hyp = Q_via_hypergeometric(R, N);
  const KrawtchoukFamily gen = Q_via_generating(R, N);
  CHECK(max_abs(hyp.tableQ() - gen.tableQ()) <= 1e-8);

  // at level one the quadruple sum has a single nontrivial term
  const KrawtchoukFamily one = Q_via_hypergeometric(R, 1);
  const RahmanU u = u_from_R(R);
  CHECK(one.Q(1, 0, 1, 0) == doctest::Approx(u.u11).epsilon(1e-12));
  CHECK(one.Q(0, 1, 0, 1) == doctest::Approx(u.u22).epsilon(1e-12));
  CHECK(one.Q(0, 0, 1, 0) == 1.0);
}

TEST_CASE("recurrence and difference residuals vanish on the whole simplex") {
  std::mt19937 rng(41);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const int N = 5;
  const KrawtchoukFamily fam = P_to_Q(build_P_oracle(R, N));
  CHECK(std::abs(recurrence_residual_Q(fam, 1, 0, 0, 2, 1)) <= 1e-10);
  CHECK(std::abs(difference_residual_Q(fam, 2, 0, 0, 2, 1)) <= 1e-10);
  for (int which : {1, 2})
    for (const auto& deg : fam.basis())
      for (const auto& var : fam.basis()) {
        const int m = deg.n[0], n = deg.n[1];
        const int i = var.n[0], k = var.n[1];
        CHECK(std::abs(recurrence_residual_Q(fam, which, m, n, i, k)) <= 1e-9);
        CHECK(std::abs(difference_residual_Q(fam, which, m, n, i, k)) <= 1e-9);
        CHECK(std::abs(recurrence_residual_P(fam, which, m, n, i, k)) <= 1e-9);
      }
}

TEST_CASE("the two recurrences and the level sum to the third relation") {
  // adding the analogous relation built from row 3 must reproduce
  // (i + k + (N-i-k)) Q = N Q, so its residual is minus the sum of the
  // other two residuals with lhs adjusted
  std::mt19937 rng(42);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const int N = 4;
  const KrawtchoukFamily fam = P_to_Q(build_P_oracle(R, N));
  auto q = [&](int mm, int nn, int ii, int kk) {
    return fam.Q(mm, nn, ii, kk);
  };
  const double r31 = R(3, 1), r32 = R(3, 2), r33 = R(3, 3);
  for (const auto& deg : fam.basis())
    for (const auto& var : fam.basis()) {
      const int m = deg.n[0], n = deg.n[1];
      const int i = var.n[0], k = var.n[1];
      const double lhs = (N - i - k) * q(m, n, i, k);
      double rhs = (r31 * r31 * m + r32 * r32 * n + r33 * r33 * (N - m - n)) *
                   q(m, n, i, k);
      rhs += detail::term(q, r31 * r32 * r32 / r31 * m, N, m - 1, n + 1, i, k);
      rhs += detail::term(q, r31 * r32 * r31 / r32 * n, N, m + 1, n - 1, i, k);
      rhs += detail::term(q, r31 * r33 * r33 / r31 * m, N, m - 1, n, i, k);
      rhs += detail::term(q, r31 * r33 * r31 / r33 * (N - m - n), N, m + 1, n,
                          i, k);
      rhs += detail::term(q, r32 * r33 * r33 / r32 * n, N, m, n - 1, i, k);
      rhs += detail::term(q, r32 * r33 * r32 / r33 * (N - m - n), N, m, n + 1,
                          i, k);
      CHECK(std::abs(lhs - rhs) <= 1e-9);
    }
}

TEST_CASE("Q has total degree m + n in the variables") {
  std::mt19937 rng(43);
  const RotationMatrix R = random_generic_rotation(3, rng);
  const int N = 6;
  const KrawtchoukFamily fam = P_to_Q(build_P_oracle(R, N));
  // the (m+n+1)-th mixed finite difference of a degree m+n polynomial
  // vanishes; take differences along i then along k
  auto value = [&](int m, int n, int i, int k) { return fam.Q(m, n, i, k); };
  for (auto [m, n] : {std::pair{1, 0}, {0, 2}, {2, 1}}) {
    const int order = m + n + 1;
    for (int a = 0; a <= order; ++a) {
      const int b = order - a;
      double diff = 0.0;
      for (int s = 0; s <= a; ++s)
        for (int t = 0; t <= b; ++t) {
          const double sign = ((a - s + b - t) % 2 == 0) ? 1.0 : -1.0;
          diff += sign * binomial(a, s) * binomial(b, t) * value(m, n, s, t);
        }
      CHECK(std::abs(diff) <= 1e-9);
    }
  }
}

TEST_CASE("non-generic rotations are reported with the vanishing entries") {
  const RotationMatrix R = plane_rotation(3, 2, 3, 0.7);  // R13 = 0
  CHECK_THROWS_AS(build_P_raising(R, 3), GenericityError);
  try {
    build_P_raising(R, 3);
  } catch (const GenericityError& e) {
    bool found = false;
    for (auto [r, c] : e.report().vanishing)
      if (r == 1 && c == 3) found = true;
    CHECK(found);
  }
  const GenericityReport rep = genericity_report(R);
  CHECK(rep.any());
}

}  // TEST_SUITE
