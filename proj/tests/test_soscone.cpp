#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <numeric>
#include <sstream>

#include "sosinterp/chebkit.hpp"
#include "sosinterp/soscone.hpp"

using namespace sosinterp;
using namespace sosinterp::sos;
using Vd = Eigen::VectorXd;
using Md = Eigen::MatrixXd;

namespace {

double cheb_T(int i, double t) { return std::cos(i * std::acos(std::clamp(t, -1.0, 1.0))); }

Md random_psd(Index k, std::mt19937& rng, Index rank = -1) {
  std::normal_distribution<double> nd;
  if (rank < 0) rank = k;
  Md G(k, rank);
  for (Index i = 0; i < G.size(); ++i) G.data()[i] = nd(rng);
  return G * G.transpose();
}

// Modified Gram-Schmidt in long double, signs fixed so each column has a positive
// inner product with the original column.
Md gram_schmidt(const Md& A) {
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> Q = A.cast<long double>();
  for (Index j = 0; j < Q.cols(); ++j) {
    for (Index i = 0; i < j; ++i) Q.col(j) -= Q.col(i).dot(Q.col(j)) * Q.col(i);
    Q.col(j) /= Q.col(j).norm();
  }
  return Q.cast<double>();
}

double long_double_defect(const Md& P) {
  const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> L = P.cast<long double>();
  return double(gram_defect<long double>(L));
}

}  // namespace

TEST_CASE("scaled Chebyshev basis") {
  CHECK(gram_defect<double>(scaled_chebyshev_basis(1).P) <= 1e-15);
  const auto b0 = scaled_chebyshev_basis(0);
  REQUIRE(b0.P.rows() == 1);
  REQUIRE(b0.P.cols() == 1);
  CHECK(b0.P(0, 0) == 1.0);
  const auto b100 = scaled_chebyshev_basis(100);
  CHECK(gram_defect<double>(b100.P) <= 1e-12);
  CHECK(b100.grid == cheb::cheb_points_first_kind(200));
  // entries match the stated scaling of T_i on the grid
  const auto b3 = scaled_chebyshev_basis(3);
  for (Index l = 0; l < 7; ++l) {
    CHECK(std::abs(b3.P(l, 0) - std::sqrt(1.0 / 7)) <= 1e-15);
    for (int i = 1; i <= 3; ++i) CHECK(std::abs(b3.P(l, i) - std::sqrt(2.0 / 7) * cheb_T(i, b3.grid[l])) <= 1e-15);
  }
  CHECK_THROWS_AS(scaled_chebyshev_basis(-1), InvalidArgument);
}

TEST_CASE("QR orthonormalization") {
  SUBCASE("orthonormal input changes by column signs only") {
    const Md P = scaled_chebyshev_basis(4).P;
    Md S = P;
    S.col(1) *= -1;
    S.col(3) *= -1;
    const Md Q = orthonormalize_at_points(S).P;
    for (Index j = 0; j < Q.cols(); ++j) {
      const double sgn = Q.col(j).dot(S.col(j)) > 0 ? 1 : -1;
      CHECK((Q.col(j) - sgn * S.col(j)).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
  SUBCASE("monomials on Cheb1(4) match Gram-Schmidt") {
    const auto g = cheb::cheb_points_first_kind(4);
    Md V(5, 3);
    for (Index l = 0; l < 5; ++l) V.row(l) << 1, g[l], g[l] * g[l];
    const Md Q = orthonormalize_at_points(V).P;
    CHECK((Q - gram_schmidt(V)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(gram_defect<double>(Q) <= 1e-14);
  }
  SUBCASE("weight 1 - t^2") {
    const auto g = cheb::cheb_points_first_kind(40);
    const Md T = cheb::chebyshev_T_values(19, g.points()).transpose();
    Vd w(41);
    for (Index l = 0; l < 41; ++l) w(l) = 1 - g[l] * g[l];
    const Md Q = orthonormalize_at_points(T, std::optional<Vd>(w)).P;
    CHECK(gram_defect<double>(Q) <= 1e-12);
    Md WT = T;
    for (Index l = 0; l < 41; ++l) WT.row(l) *= std::sqrt(w(l));
    CHECK((Q - gram_schmidt(WT)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("rank deficiency names the column") {
    Md V(6, 3);
    V.col(0).setOnes();
    V.col(1).setLinSpaced(6, -1, 1);
    V.col(2) = 2 * V.col(1);
    try {
      orthonormalize_at_points(V);
      FAIL("expected RankDeficiencyError");
    } catch (const RankDeficiencyError& e) {
      CHECK(e.column() == 2);
    }
    CHECK_THROWS_AS(orthonormalize_at_points(V, std::optional<Vd>(-Vd::Ones(6))), InvalidArgument);
  }
}

TEST_CASE("closed-form weighted bases equal the Householder factor") {
  for (Index n : {1, 2, 5, 8, 31, 64, 151}) {
    const auto g = cheb::cheb_points_first_kind(n);
    const Index N = n + 1;
    struct Case {
      WeightKind w;
      Index k;
    };
    const Case cases[] = {{WeightKind::One, n},
                          {WeightKind::OnePlusT, N - 1},
                          {WeightKind::OneMinusT, N - 1},
                          {WeightKind::OneMinusTSquared, std::max<Index>(N - 2, 0)}};
    for (const auto& c : cases) {
      if (c.w == WeightKind::OneMinusTSquared && N < 2) continue;
      // Householder is only reliable well away from full column rank
      const Index k = std::min<Index>(c.k, N / 2);
      const Md closed = first_kind_basis(g, k, c.w).P;
      const Md qr = orthonormalize_at_points(g, k, c.w).P;
      CHECK_MESSAGE((closed - qr).cwiseAbs().maxCoeff() <= 1e-13, "n=" << n << " w=" << to_string(c.w));
      CHECK(gram_defect<double>(first_kind_basis(g, c.k, c.w).P) <= 1e-13);
    }
  }
  CHECK_THROWS_AS(first_kind_basis(cheb::cheb_points_first_kind(4), 4, WeightKind::OneMinusTSquared),
                  RankDeficiencyError);
  CHECK_THROWS_AS(first_kind_basis(cheb::cheb_points_second_kind(4), 1, WeightKind::One), InvalidArgument);
}

TEST_CASE("Lagrange SOS cone") {
  for (Index k : {0, 1, 3, 10}) {
    const auto cone = lagrange_sos_cone(k);
    const Md& P = cone.basis().P;
    const Vd f = cone.apply(Md::Identity(k + 1, k + 1));
    for (Index l = 0; l < P.rows(); ++l) CHECK(std::abs(f(l) - P.row(l).squaredNorm()) <= 1e-15);
    CHECK(cone.apply(Md::Zero(k + 1, k + 1)).cwiseAbs().maxCoeff() == 0.0);
    for (Index l = 0; l < P.rows(); ++l) {
      const Md A = cone.constraint_matrix(l);
      CHECK(std::abs(A.trace() - P.row(l).squaredNorm()) <= 1e-15);
      Eigen::SelfAdjointEigenSolver<Md> es(A);
      CHECK(es.eigenvalues().minCoeff() >= -1e-15);
      CHECK((es.eigenvalues().array().abs() > 1e-14).count() <= 1);
    }
    if (k >= 1) {
      // t = T_1 = p_1 / sqrt(2/(2k+1))
      Vd v = Vd::Zero(k + 1);
      v(1) = 1 / std::sqrt(2.0 / (2 * k + 1));
      const Vd sq = cone.apply(v * v.transpose());
      const auto& g = cone.basis().grid;
      for (Index l = 0; l < g.size(); ++l) CHECK(std::abs(sq(l) - g[l] * g[l]) <= 1e-14);
    }
  }
}

TEST_CASE("Hermite SOS cone") {
  SUBCASE("q = a t^2 + c at a triple point") {
    const auto cone = hermite_sos_cone(Vd{{0.0}}, {2});
    REQUIRE(cone.d() == 1);
    const double a = 0.7, c = 1.9;
    // p_0 = 1/sqrt(3), p_1 = sqrt(2/3) t, so X = diag(3c, 3a/2) gives q = c + a t^2
    Md X = Md::Zero(2, 2);
    X(0, 0) = 3 * c;
    X(1, 1) = 1.5 * a;
    CHECK(cone.matrix(0, 0).cwiseProduct(X).sum() == doctest::Approx(c));
    CHECK(std::abs(cone.matrix(0, 1).cwiseProduct(X).sum()) <= 1e-15);
    CHECK(cone.matrix(0, 2).cwiseProduct(X).sum() == doctest::Approx(2 * a));
  }
  SUBCASE("multiplicity zero reduces to the Lagrange cone") {
    const Vd pts{{0.9, 0.4, 0.0, -0.3, -0.95}};
    const auto h = hermite_sos_cone(pts, {0, 0, 0, 0, 0});
    REQUIRE(h.d() == 2);
    Md P = cheb::chebyshev_T_values(2, pts).transpose();
    P.col(0) *= std::sqrt(1.0 / 5);
    P.rightCols(2) *= std::sqrt(2.0 / 5);
    const LagrangeSosCone<double> lag(BasisMatrix<double>{P, {}, WeightKind::One});
    for (Index l = 0; l < 5; ++l) CHECK((h.matrix(l, 0) - lag.constraint_matrix(l)).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("first-order matrices follow Leibniz") {
    const Vd pts{{0.3, -0.6}};
    const auto h = hermite_sos_cone(pts, {1, 2});
    REQUIRE(h.d() == 2);
    const double s0 = std::sqrt(1.0 / 5), s = std::sqrt(2.0 / 5);
    for (Index l = 0; l < 2; ++l) {
      const double t = pts(l), th = std::acos(t);
      Vd p(3), dp(3);
      for (int i = 0; i < 3; ++i) {
        const double sc = i == 0 ? s0 : s;
        p(i) = sc * cheb_T(i, t);
        // T_i' = i U_{i-1}, U_{i-1}(cos th) = sin(i th) / sin th
        dp(i) = sc * (i == 0 ? 0.0 : i * std::sin(i * th) / std::sin(th));
      }
      CHECK((h.matrix(l, 1) - (dp * p.transpose() + p * dp.transpose())).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
  SUBCASE("derivative recurrence matches trigonometric forms") {
    const double t = 0.37, th = std::acos(t);
    const Md D = chebyshev_T_derivatives<double>(12, 2, t);
    for (int i = 1; i <= 12; ++i) {
      const double d1 = i * std::sin(i * th) / std::sin(th);
      // (1 - t^2) T'' - t T' + i^2 T = 0
      const double d2 = (t * d1 - i * i * cheb_T(i, t)) / (1 - t * t);
      CHECK(std::abs(D(1, i) - d1) <= 1e-12);
      CHECK(std::abs(D(2, i) - d2) <= 1e-10);
    }
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(hermite_sos_cone(Vd{{0.0, 0.5}}, {0, 0}), InvalidArgument);
    CHECK_THROWS_AS(hermite_sos_cone(Vd{{0.0, 0.0}}, {0, 1}), InvalidArgument);
  }
  SUBCASE("random certificates give matching derivative data") {
    std::mt19937 rng(2);
    const Vd pts{{0.5, -0.2}};
    const auto h = hermite_sos_cone(pts, {2, 1});
    const Md X = random_psd(h.block_size(), rng);
    // q(t) = p(t)^T X p(t) sampled finely, differentiated by finite differences
    const double s0 = std::sqrt(1.0 / (2 * h.d() + 1)), s = std::sqrt(2.0 / (2 * h.d() + 1));
    auto q = [&](double t) {
      Vd p(h.block_size());
      for (Index i = 0; i < p.size(); ++i) p(i) = (i == 0 ? s0 : s) * cheb_T(int(i), t);
      return p.dot(X * p);
    };
    const double e = 1e-4;
    const Vd f = h.apply(X);
    CHECK(f(0) == doctest::Approx(q(0.5)).epsilon(1e-12));
    CHECK(f(1) == doctest::Approx((q(0.5 + e) - q(0.5 - e)) / (2 * e)).epsilon(1e-6));
    CHECK(f(2) == doctest::Approx((q(0.5 + e) - 2 * q(0.5) + q(0.5 - e)) / (e * e)).epsilon(1e-5));
    CHECK(f(4) == doctest::Approx((q(-0.2 + e) - q(-0.2 - e)) / (2 * e)).epsilon(1e-6));
  }
}

TEST_CASE("interval cone structure") {
  const auto c0 = interval_nonneg_cone(0);
  REQUIRE(c0.members().size() == 1);
  CHECK(c0.apply({Md::Constant(1, 1, 2.5)})(0) == doctest::Approx(2.5));

  for (Index n : {1, 2, 7, 8, 41, 100}) {
    const auto cone = interval_nonneg_cone(n);
    REQUIRE(cone.members().size() == 2);
    const auto& m0 = cone.members()[0].basis();
    const auto& m1 = cone.members()[1].basis();
    if (n % 2 == 1) {
      const Index k = (n + 1) / 2;
      CHECK(m0.weight == WeightKind::OnePlusT);
      CHECK(m1.weight == WeightKind::OneMinusT);
      CHECK(m0.degree() == k - 1);
      CHECK(m1.degree() == k - 1);
    } else {
      const Index k = n / 2;
      CHECK(m0.weight == WeightKind::OneMinusTSquared);
      CHECK(m1.weight == WeightKind::One);
      CHECK(m0.degree() == k - 1);
      CHECK(m1.degree() == k);
    }
    CHECK(m0.grid == cheb::cheb_points_first_kind(n));
    CHECK(gram_defect<double>(m0.P) <= 1e-12);
    CHECK(gram_defect<double>(m1.P) <= 1e-12);
  }

  // 1 - t^2 = (1 - t^2) * 1 + 0: q = 1 through the single weighted basis column
  const auto c2 = interval_nonneg_cone(2);
  const auto& q = c2.members()[0].basis();
  const Md Vq = unweighted_values(q);
  const double p0 = Vq(0, 0);
  const Vd f = c2.apply({Md::Constant(1, 1, 1 / (p0 * p0)), Md::Zero(2, 2)});
  for (Index l = 0; l < 3; ++l) CHECK(std::abs(f(l) - (1 - c2.grid()[l] * c2.grid()[l])) <= 1e-15);

  // general-grid interval cones go through QR
  const IntervalNonnegCone<double> c2k(cheb::cheb_points_second_kind(9));
  CHECK(gram_defect<double>(c2k.members()[0].basis().P) <= 1e-12);
  CHECK(gram_defect<double>(c2k.members()[1].basis().P) <= 1e-12);
}

TEST_CASE("dual matrix") {
  const auto b = scaled_chebyshev_basis(5);
  const Index N = b.rows();
  CHECK((dual_matrix(Vd(Vd::Ones(N)), b) - Md::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-14);
  const auto cone = LagrangeSosCone<double>(b);
  for (Index l = 0; l < N; ++l)
    CHECK((dual_matrix(Vd(Vd::Unit(N, l)), b) - cone.constraint_matrix(l)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(dual_matrix(Vd(Vd::Ones(3)), b), InvalidArgument);

  std::mt19937 rng(9);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    Vd y(N);
    for (auto& v : y) v = nd(rng) + 0.6;
    const Md Y = dual_matrix(y, b);
    Eigen::SelfAdjointEigenSolver<Md> es(Y);
    const double lmin = es.eigenvalues()(0);
    // y . f(X) = <Y, X> for every certificate; X = v v^T at the bottom eigenvector attains lambda_min
    const Vd v = es.eigenvectors().col(0);
    CHECK(std::abs(y.dot(cone.apply(v * v.transpose())) - lmin) <= 1e-12);
    double worst = 1e300;
    for (int s = 0; s < 20; ++s) {
      const Md X = random_psd(6, rng, 1);
      worst = std::min(worst, y.dot(cone.apply(X)) / X.trace());
    }
    if (lmin >= 0) CHECK(worst >= -1e-10);
    CHECK(worst >= lmin - 1e-10);
  }
}

TEST_CASE("primal soundness of Lagrange cones on [-3, 3]") {
  std::mt19937 rng(17);
  for (Index k : {1, 2, 5, 10, 25, 50}) {
    const auto cone = lagrange_sos_cone(k);
    for (int trial = 0; trial < 5; ++trial) {
      const Md X = random_psd(k + 1, rng, 1 + trial % (k + 1));
      const cheb::Interpolant<double> p(cone.basis().grid, cone.apply(X));
      double worst = 0;
      for (int i = 0; i < 10000; ++i) {
        const double t = -3 + 6.0 * i / 9999;
        worst = std::min(worst, p(t));
      }
      CHECK_MESSAGE(worst >= -1e-10 * X.trace(), "k=" << k);
    }
  }
}

TEST_CASE("interval soundness") {
  std::mt19937 rng(23);
  for (Index n : {1, 2, 3, 10, 11, 50, 99, 200}) {
    const auto cone = interval_nonneg_cone(n);
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<Md> X;
      double tr = 0;
      for (const auto& m : cone.members()) {
        X.push_back(random_psd(m.block_size(), rng, 1 + trial));
        tr += X.back().trace();
      }
      const auto p = cone.polynomial(X);
      double worst = 0;
      for (int i = 0; i < 10000; ++i) worst = std::min(worst, p(-1 + 2.0 * i / 9999));
      CHECK_MESSAGE(worst >= -1e-9 * tr, "n=" << n);
    }
  }
}

TEST_CASE("Gram defect does not grow with n") {
  std::vector<double> xs, ys;
  double worst = 0;
  for (Index n : {20, 21, 50, 51, 100, 101, 200, 201, 400, 401, 700, 701, 1000, 1001, 1400, 1401, 2000, 1999}) {
    const auto cone = interval_nonneg_cone(n);
    double d = 0;
    for (const auto& m : cone.members()) d = std::max(d, long_double_defect(m.basis().P));
    worst = std::max(worst, d);
    xs.push_back(double(n));
    ys.push_back(std::log(d));
  }
  CHECK(worst <= 1e-11);
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  MESSAGE("log-defect slope " << sxy / sxx);
  CHECK(sxy / sxx <= 0);
}

TEST_CASE("QR path stays orthonormal on large second-kind grids") {
  for (Index n : {200, 800}) {
    const IntervalNonnegCone<double> cone(cheb::cheb_points_second_kind(n));
    for (const auto& m : cone.members()) CHECK(long_double_defect(m.basis().P) <= 1e-11);
  }
}

TEST_CASE("constraint CSV dump") {
  std::ostringstream os;
  write_constraint_csv(os, lagrange_sos_cone(1));
  const std::string s = os.str();
  CHECK(s.rfind("l,i,j,value\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 3 * 3);
  std::ostringstream oh;
  write_constraint_csv(oh, hermite_sos_cone(Vd{{0.0}}, {2}));
  const std::string h = oh.str();
  CHECK(std::count(h.begin(), h.end(), '\n') == 1 + 3 * 3);
}
