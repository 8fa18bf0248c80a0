#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sosinterp/apps.hpp"
#include "sosinterp/chebkit.hpp"

using namespace sosinterp;
using namespace sosinterp::apps;

namespace {

Poly random_chebyshev_poly(std::mt19937& rng, Index d) {
  std::uniform_int_distribution<int> coef(-9, 9);
  VectorXd c(d + 1);
  for (Index i = 0; i <= d; ++i) c(i) = coef(rng);
  return Poly::from_function(Grid::first_kind(d), [&](double t) { return cheb::clenshaw(c, t); });
}

VectorXd probe(Index n = 10001) { return VectorXd::LinSpaced(n, -1.0, 1.0); }

double lambda_min(const MatrixXd& M) {
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

// P_k^(0,1)(t) = sum_s C(k, k - s) C(k + 1, s) ((t - 1)/2)^s ((t + 1)/2)^(k - s)
double jacobi01_explicit(Index k, double t) {
  auto binom = [](double n, Index r) {
    double b = 1;
    for (Index i = 1; i <= r; ++i) b = b * (n - double(r) + double(i)) / double(i);
    return b;
  };
  double s = 0;
  for (Index j = 0; j <= k; ++j)
    s += binom(double(k), k - j) * binom(double(k + 1), j) * std::pow((t - 1) / 2, double(j)) * std::pow((t + 1) / 2, double(k - j));
  return s;
}

const double kTable4Exact[] = {0.995556969790498, 0.976663921459518, 0.942974571228974, 0.894991997878275,
                               0.833442628760834, 0.759259263037358, 0.673566368473468, 0.577662930241223,
                               0.473002731445715, 0.361172305809388, 0.243866883720988, 0.12286469261071};

}  // namespace

TEST_CASE("interval cone attachment wires one row per grid point") {
  sdp::BlockSdpProblem p;
  std::vector<Index> rows;
  for (int l = 0; l < 6; ++l) rows.push_back(p.add_constraint(1.0));
  const auto att = attach_interval_cone(p, sos::interval_nonneg_cone(5), rows);
  CHECK(att.blocks.size() == 2);
  CHECK(p.blocks()[std::size_t(att.blocks[0])].size == 3);
  CHECK_THROWS_AS(attach_interval_cone(p, sos::interval_nonneg_cone(4), rows), InvalidArgument);
}

TEST_CASE("certify_nonnegative accepts sums of weighted squares and rejects negative polynomials") {
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    const Index d = 1 + trial % 6;
    VectorXd a(d + 1), b(d + 1);
    for (Index i = 0; i <= d; ++i) a(i) = nd(rng), b(i) = nd(rng);
    // (1 - t^2) q^2 + r^2 has degree 2d + 2 and is nonnegative on [-1, 1]
    auto f = [&](double t) {
      const double q = cheb::clenshaw(a, t), r = cheb::clenshaw(b, t);
      return (1 - t * t) * q * q + r * r;
    };
    const auto cert = certify_nonnegative(Poly::from_function(Grid::first_kind(2 * d + 2), f));
    CAPTURE(trial);
    CHECK(cert.certified);
    CHECK(cert.residual < 1e-8);
  }
  const auto bad = certify_nonnegative(Poly::from_function(Grid::first_kind(2), [](double t) { return t * t - 0.01; }));
  CHECK_FALSE(bad.certified);
  CHECK(bad.status == sdp::Status::PrimalInfeasible);
}

TEST_CASE("envelope of one polynomial is the polynomial") {
  std::mt19937 rng(3);
  const Poly p1 = random_chebyshev_poly(rng, 5);
  const auto prob = envelope_dual({p1}, 9);
  const auto sol = sdp::solve(prob.sdp);
  REQUIRE(sol.status == sdp::Status::Optimal);
  const double integral = cheb::integrate(p1);
  CHECK(sol.primal_objective == doctest::Approx(integral).epsilon(1e-8));
  const Poly env = envelope_recover(prob, sol);
  for (double t : {-1.0, -0.3, 0.2, 0.9}) CHECK(env(t) == doctest::Approx(p1(t)).epsilon(1e-7));
}

TEST_CASE("envelope of p and p + 1 integrates to the integral of p") {
  std::mt19937 rng(4);
  const Poly p1 = random_chebyshev_poly(rng, 5);
  const Poly p2(p1.grid(), (p1.values().array() + 1.0).matrix());
  const auto prob = envelope_dual({p1, p2}, 12);
  const auto sol = sdp::solve(prob.sdp);
  REQUIRE(sol.status == sdp::Status::Optimal);
  CHECK(sol.primal_objective == doctest::Approx(cheb::integrate(p1)).epsilon(1e-8));
}

TEST_CASE("envelope of three quintics at n = 75") {
  std::mt19937 rng(7);
  const std::vector<Poly> ps{random_chebyshev_poly(rng, 5), random_chebyshev_poly(rng, 5), random_chebyshev_poly(rng, 5)};
  const auto prob = envelope_dual(ps, 75);
  const auto sol = sdp::solve(prob.sdp);
  REQUIRE(sol.status == sdp::Status::Optimal);
  const Poly env = envelope_recover(prob, sol);
  auto lower = [&](double t) { return std::min({ps[0](t), ps[1](t), ps[2](t)}); };

  SUBCASE("lower bound on a dense probe") {
    double worst = -1e300;
    for (double t : probe()) worst = std::max(worst, env(t) - lower(t));
    CHECK(worst <= 1e-7);
  }
  SUBCASE("touches the minimum at its contact points") {
    std::size_t contacts = 0;
    for (const auto& p : ps) {
      const Poly gap(prob.grid, cheb::evaluate(p, prob.grid.points()) - env.values());
      for (double t : contact_points(gap)) {
        if (p(t) > lower(t) + 1e-9) continue;
        ++contacts;
        CHECK(std::abs(env(t) - lower(t)) <= 1e-6);
      }
    }
    CHECK(contacts >= 1);
  }
  SUBCASE("dual equality sum_i y_il = w_l") {
    const MatrixXd y = envelope_multipliers(prob, sol);
    CHECK((y.rowwise().sum() - prob.weights).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("the nonpositive variant has the same optimum") {
    EnvelopeOptions opt;
    opt.nonpositive = true;
    const auto prob2 = envelope_dual(ps, 75, opt);
    const auto sol2 = sdp::solve(prob2.sdp);
    REQUIRE(sol2.status == sdp::Status::Optimal);
    const Poly env2 = envelope_recover(prob2, sol2);
    CHECK(cheb::integrate(env2) == doctest::Approx(cheb::integrate(env)).epsilon(1e-8));
    double worst = -1e300;
    for (double t : probe()) worst = std::max(worst, env2(t) - lower(t));
    CHECK(worst <= 1e-7);
  }
}

TEST_CASE("envelope argument checks") {
  CHECK_THROWS_AS(envelope_dual({}, 5), InvalidArgument);
  std::mt19937 rng(1);
  CHECK_THROWS_AS(envelope_dual({random_chebyshev_poly(rng, 5)}, 4), InvalidArgument);
  const auto prob = envelope_dual({random_chebyshev_poly(rng, 2)}, 3);
  sdp::SdpSolution bad;
  bad.status = sdp::Status::PrimalInfeasible;
  CHECK_THROWS_AS(envelope_recover(prob, bad), UnsolvedError);
}

TEST_CASE("even-degree envelope grids use the 1 - t^2 pairing") {
  std::mt19937 rng(5);
  const std::vector<Poly> ps{random_chebyshev_poly(rng, 4), random_chebyshev_poly(rng, 4)};
  const auto prob = envelope_dual(ps, 20);
  CHECK(prob.cones[0].cone.parity() == IntervalCone::Parity::Even);
  const auto sol = sdp::solve(prob.sdp);
  REQUIRE(sol.status == sdp::Status::Optimal);
  const Poly env = envelope_recover(prob, sol);
  double worst = -1e300;
  for (double t : probe(2001)) worst = std::max(worst, env(t) - std::min(ps[0](t), ps[1](t)));
  CHECK(worst <= 1e-7);
}

TEST_CASE("legendre and jacobi roots") {
  CHECK(legendre_roots(1) == std::vector<double>{0.0});
  const auto r2 = legendre_roots(2);
  CHECK(r2[0] == doctest::Approx(-1 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2[1] == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-15));
  const auto r25 = legendre_roots(25);
  REQUIRE(r25.size() == 25);
  CHECK(r25[12] == 0.0);
  for (int i = 0; i < 12; ++i) {
    CHECK(std::abs(r25[std::size_t(24 - i)] - kTable4Exact[i]) <= 1e-12);
    CHECK(std::abs(r25[std::size_t(i)] + kTable4Exact[i]) <= 1e-12);
  }
  CHECK(jacobi01_roots(1)[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (Index k : {2, 5, 12}) {
    const auto r = jacobi01_roots(k);
    REQUIRE(Index(r.size()) == k);
    CHECK(std::is_sorted(r.begin(), r.end()));
    // derivative scale of P_k near its roots is about k^2
    for (double t : r) CHECK(std::abs(jacobi01_explicit(k, t)) <= 1e-12 * double(k * k));
  }
  CHECK_THROWS_AS(legendre_roots(0), InvalidArgument);
}

TEST_CASE("hermite_l1_oracle") {
  SUBCASE("t^2 with n = 1 is the tangent at 0") {
    const Poly p = hermite_l1_oracle([](double t) { return t * t; }, [](double t) { return 2 * t; }, 1);
    CHECK(p.values().cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("polynomials of degree <= n are returned unchanged") {
    auto f = [](double t) { return 1 - 2 * t + 3 * t * t * t; };
    auto df = [](double t) { return -2 + 9 * t * t; };
    for (Index n : {3, 4, 6}) {
      const Poly p = hermite_l1_oracle(f, df, n);
      for (double t : {-0.9, 0.1, 0.7}) CHECK(p(t) == doctest::Approx(f(t)).epsilon(1e-13));
    }
  }
  SUBCASE("exp(t^100), n = 49 touches at the Legendre-25 zeros") {
    auto f = [](double t) { return std::exp(std::pow(t, 100)); };
    auto df = [](double t) { return 100 * std::pow(t, 99) * std::exp(std::pow(t, 100)); };
    const auto nodes = hermite_l1_nodes(49);
    CHECK(nodes == legendre_roots(25));
    const Poly p = hermite_l1_oracle(f, df, 49);
    for (double t : nodes) CHECK(std::abs(p(t) - f(t)) <= 1e-10);
  }
  SUBCASE("even n adds the left endpoint") {
    const auto nodes = hermite_l1_nodes(4);
    REQUIRE(nodes.size() == 3);
    CHECK(nodes[0] == -1.0);
  }
}

TEST_CASE("one-sided approximation") {
  SUBCASE("a polynomial of the target degree is reproduced") {
    auto f = [](double t) { return 0.5 - t + 0.25 * t * t * t; };
    const auto prob = onesided_dual(Poly::from_function(Grid::first_kind(10), f), 3);
    const auto sol = sdp::solve(prob.sdp);
    REQUIRE(sol.status == sdp::Status::Optimal);
    const Poly p = onesided_recover(prob, sol);
    for (double t : {-1.0, -0.4, 0.5, 1.0}) CHECK(p(t) == doctest::Approx(f(t)).epsilon(1e-7));
  }
  SUBCASE("t^2 with n = 1 matches the oracle") {
    const auto prob = onesided_dual(Poly::from_function(Grid::first_kind(6), [](double t) { return t * t; }), 1);
    const auto sol = sdp::solve(prob.sdp);
    REQUIRE(sol.status == sdp::Status::Optimal);
    const Poly p = onesided_recover(prob, sol);
    CHECK(p.values().cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(onesided_l1(prob, sol) == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  }
  SUBCASE("argument checks") {
    const Poly f = Poly::from_function(Grid::first_kind(5), [](double t) { return t; });
    CHECK_THROWS_AS(onesided_dual(f, 5), InvalidArgument);
    CHECK_THROWS_AS(onesided_dual(f, -1), InvalidArgument);
  }
}

TEST_CASE("exp(t^100) from below with 50 points touches at the Legendre-25 zeros") {
  auto f = [](double t) { return std::exp(std::pow(t, 100)); };
  const auto prob = onesided_dual(Poly::from_function(Grid::first_kind(199), f), 49);
  const auto sol = sdp::solve(prob.sdp);
  REQUIRE(sol.status == sdp::Status::Optimal);
  const auto contacts = onesided_contacts(prob, sol);
  const auto exact = legendre_roots(25);
  REQUIRE(contacts.size() == 25);
  double err = 0;
  for (std::size_t i = 0; i < 25; ++i) err = std::max(err, std::abs(contacts[i] - exact[i]));
  CHECK(err <= 1e-5);
  const Poly p = onesided_recover(prob, sol);
  double worst = -1e300;
  for (double t : probe()) worst = std::max(worst, p(t) - f(t));
  CHECK(worst <= 1e-7);
}

TEST_CASE("one-sided objective agrees with the Hermite oracle on convex analytic functions") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 6; ++trial) {
    const Index n = 1 + Index(u(rng) * 9);
    Sampler f, df;
    switch (trial % 3) {
      case 0: {
        const double a = 3 + 5 * u(rng);
        f = [a](double t) { return std::exp(a * t); };
        df = [a](double t) { return a * std::exp(a * t); };
        break;
      }
      case 1: {
        const double c = 1.05 + 0.4 * u(rng);
        f = [c](double t) { return 1 / (c - t); };
        df = [c](double t) { return 1 / ((c - t) * (c - t)); };
        break;
      }
      default: {
        const double c = 1.05 + 0.4 * u(rng);
        f = [c](double t) { return -std::log(c - t); };
        df = [c](double t) { return 1 / (c - t); };
      }
    }
    const Poly fN = cheb::resample(cheb::adaptive_interpolate<double>(f, 1e-15).interpolant, Grid::first_kind(128));
    const auto prob = onesided_dual(fN, n);
    sdp::SolverConfig cfg;
    cfg.allow_stall_exit = true;
    const auto sol = sdp::solve(prob.sdp, cfg);
    REQUIRE(sol.status == sdp::Status::Optimal);
    const double l1_sdp = onesided_l1(prob, sol);
    const double l1_oracle = cheb::integrate(fN) - cheb::integrate(hermite_l1_oracle(f, df, n));
    CAPTURE(trial);
    CAPTURE(n);
    CHECK(std::abs(l1_sdp - l1_oracle) <= 1e-6 * l1_oracle);
  }
}

TEST_CASE("fisher_matrix") {
  FisherModel lin{{[](double) { return 1.0; }, [](double t) { return t; }}, {}, "linear"};
  const MatrixXd M1 = fisher_matrix(lin, VectorXd::Constant(1, 0.3), VectorXd::Ones(1));
  CHECK(M1(0, 0) == 1.0);
  CHECK(M1(0, 1) == 0.3);
  CHECK(M1(1, 1) == doctest::Approx(0.09));
  const MatrixXd M2 = fisher_matrix(lin, Eigen::Vector2d(-1, 1), Eigen::Vector2d(0.5, 0.5));
  CHECK((M2 - MatrixXd::Identity(2, 2)).norm() == 0.0);
  CHECK_THROWS_AS(fisher_matrix(lin, Eigen::Vector2d(-1, 1), Eigen::Vector2d(-0.5, 1.5)), InvalidArgument);
}

TEST_CASE("local_design_model") {
  const FisherModel m = logistic_model(0, 12);
  for (double t : {-0.5, 0.0, 0.2}) {
    const double g = 1 / (2 + 2 * std::cosh(12 * t));
    CHECK(m.basis[0](t) == doctest::Approx(g));
    CHECK(m.basis[1](t) == doctest::Approx(t * g));
  }
  // a linear model's parameter derivatives are its basis
  std::vector<ParametricSampler> lin{[](double, const VectorXd&) { return 1.0; }, [](double t, const VectorXd&) { return t; }};
  const FisherModel l = local_design_model(lin, Eigen::Vector2d(3, -2));
  CHECK(l.basis[1](0.4) == 0.4);
}

TEST_CASE("criterion representations evaluate to their closed forms") {
  MatrixXd X(3, 3);
  X << 2, 0.3, -0.1, 0.3, 1.5, 0.2, -0.1, 0.2, 1;
  CHECK(criterion_value(e_optimality(3), X) == doctest::Approx(lambda_min(X)).epsilon(1e-7));
  CHECK(criterion_value(a_optimality(3), X) == doctest::Approx(-X.inverse().trace()).epsilon(1e-7));
  CHECK(criterion_value(d_optimality(3), X) == doctest::Approx(std::cbrt(X.determinant())).epsilon(1e-7));
  const MatrixXd X2 = X.topLeftCorner(2, 2);
  CHECK(criterion_value(d_optimality(2), X2) == doctest::Approx(std::sqrt(X2.determinant())).epsilon(1e-7));
  CHECK(criterion_value(d_optimality(1), MatrixXd::Constant(1, 1, 0.7)) == doctest::Approx(0.7).epsilon(1e-7));
  CHECK_THROWS_AS(criterion_value(e_optimality(2), X), InvalidArgument);
}

TEST_CASE("E-optimal design for the Gaussian mixture") {
  const FisherModel model = gaussian_mixture_model({-0.5, 0.0, 0.5}, 3.0);
  const DesignResult r = eoptimal_design(model);
  REQUIRE(r.support.size() == 3);
  CHECK(std::abs(r.support[0] + 0.7410) <= 1e-3);
  CHECK(std::abs(r.support[1]) <= 1e-3);
  CHECK(std::abs(r.support[2] - 0.7410) <= 1e-3);
  CHECK(r.degree + 1 >= 36);
  CHECK(r.degree + 1 <= 52);
  CHECK(r.weights.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(r.weights(0) - r.weights(2)) <= 1e-8);

  const MatrixXd M = fisher_matrix(model, Eigen::Map<const VectorXd>(r.support.data(), 3), r.weights);
  CHECK(std::abs(lambda_min(M) - r.bound) <= 1e-6);

  SUBCASE("support property") {
    const double scale = r.pi.values().cwiseAbs().maxCoeff();
    double lo = 1e300;
    for (double t : probe()) lo = std::min(lo, r.pi(t));
    CHECK(lo >= -1e-8);
    for (double s : r.support) CHECK(std::abs(r.pi(s)) <= 1e-6 * scale);
  }
  SUBCASE("the generic route with the E representation finds the same roots") {
    const DesignResult g = optimal_design(model, e_optimality(3));
    REQUIRE(g.support.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(g.support[std::size_t(i)] - r.support[std::size_t(i)]) <= 1e-6);
    CHECK(g.bound == doctest::Approx(r.bound).epsilon(1e-7));
  }
  SUBCASE("perturbed weights never beat the optimal ones") {
    std::mt19937 rng(2);
    std::exponential_distribution<double> ex;
    const VectorXd s = Eigen::Map<const VectorXd>(r.support.data(), 3);
    const double best = lambda_min(fisher_matrix(model, s, r.weights));
    double worst_excess = -1e300;
    for (int k = 0; k < 1000; ++k) {
      VectorXd w(3);
      for (Index i = 0; i < 3; ++i) w(i) = ex(rng);
      w /= w.sum();
      worst_excess = std::max(worst_excess, lambda_min(fisher_matrix(model, s, w)) - best);
    }
    CHECK(worst_excess <= 1e-9);
  }
  SUBCASE("the adaptive degree policy agrees") {
    SupportOptions opt;
    opt.degree_policy = DegreePolicy::Adaptive;
    const DesignResult a = eoptimal_design(model, opt);
    REQUIRE(a.support.size() == 3);
    CHECK(a.degree >= r.degree);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(a.support[std::size_t(i)] - r.support[std::size_t(i)]) <= 1e-6);
  }
}

TEST_CASE("a one-dimensional constant model is degenerate") {
  const FisherModel one{{[](double) { return 1.0; }}, {}, "constant"};
  const DesignResult r = eoptimal_design(one);
  CHECK(r.degenerate);
  CHECK(r.support.empty());
  CHECK(r.bound == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("A-optimal design for the straight line sits at the endpoints") {
  const FisherModel lin{{[](double) { return 1.0; }, [](double t) { return t; }}, {}, "linear"};
  // two-point symmetric designs: tr M^-1 = 1 + 1/s^2
  double best_s = 0, best = -1e300;
  for (int i = 1; i <= 1000; ++i) {
    const double s = i / 1000.0;
    const double v = -(1 + 1 / (s * s));
    if (v > best) best = v, best_s = s;
  }
  const DesignResult r = optimal_design(lin, a_optimality(2));
  REQUIRE(r.support.size() == 2);
  CHECK(std::abs(r.support[0] + best_s) <= 1e-6);
  CHECK(std::abs(r.support[1] - best_s) <= 1e-6);
  CHECK(r.criterion_value == doctest::Approx(best).epsilon(1e-7));
}

TEST_CASE("a representation with B = 0 makes the support SDP infeasible") {
  CriterionRep crit = e_optimality(2);
  crit.blocks[0].B.setZero();
  const FisherModel lin{{[](double) { return 1.0; }, [](double t) { return t; }}, {}, "linear"};
  const auto prob = general_support_sdp(lin, crit);
  const auto sol = sdp::solve(prob.sdp);
  CHECK(sol.status == sdp::Status::PrimalInfeasible);
  CHECK_THROWS_AS(optimal_design(lin, crit), UnsolvedError);
}

TEST_CASE("design_weights") {
  const FisherModel lin{{[](double) { return 1.0; }, [](double t) { return t; }}, {}, "linear"};
  const FisherModel one{{[](double) { return 1.0; }}, {}, "constant"};
  CHECK(design_weights({0.3}, one, e_optimality(1)).weights(0) == doctest::Approx(1.0));
  const auto w = design_weights({-1.0, -0.5, 0.5, 1.0}, lin, d_optimality(2));
  CHECK(std::abs(w.weights(0) - w.weights(3)) <= 1e-8);
  CHECK(std::abs(w.weights(1) - w.weights(2)) <= 1e-8);
  CHECK(w.weights(0) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(w.weights(1) == 0.0);
  CHECK_THROWS_AS(design_weights({}, lin, e_optimality(2)), InvalidArgument);
}

TEST_CASE("logistic model designs") {
  const FisherModel model = logistic_model(0, 12);
  SUBCASE("E-optimal support is +-argmax t g(t)") {
    const DesignResult r = eoptimal_design(model);
    REQUIRE(r.support.size() == 2);
    // lambda_min of the symmetric design at +-s is s^2 g(s)^2
    double arg = 0, best = 0;
    for (int i = 1; i <= 100000; ++i) {
      const double s = i / 100000.0, g = 1 / (2 + 2 * std::cosh(12 * s));
      if (s * g > best) best = s * g, arg = s;
    }
    CHECK(std::abs(r.support[1] - arg) <= 1e-4);
    CHECK(std::abs(r.support[0] + arg) <= 1e-4);
  }
  SUBCASE("D-optimal support on the interpolated basis") {
    SupportOptions opt;
    opt.basis_points = 120;
    const DesignResult r = optimal_design(model, d_optimality(2), opt);
    REQUIRE(r.support.size() == 2);
    CHECK(std::abs(r.support[0] + 0.08697) <= 1e-4);
    CHECK(std::abs(r.support[1] - 0.08697) <= 1e-4);
    CHECK(r.degree == 2 * 119);
  }
}

TEST_CASE("Runge phenomenon of the logistic derivative") {
  auto g = [](double t) { return 1 / (2 + 2 * std::cosh(12 * t)); };
  CHECK(equispaced_interpolation_error(g, 100) > 0.1);
  CHECK(chebyshev_interpolation_error(g, 200) < 1e-13);
}

TEST_CASE("semi-infinite LP builder") {
  SUBCASE("t x <= 0 for all t forces x = 0") {
    SemiInfiniteProgram sip;
    sip.num_vars = 1;
    sip.rows = {{[](double t) { return t; }}};
    sip.rhs = VectorXd::Zero(1);
    const auto prob = build_silp_sdp(sip, 1e-14);
    const auto sol = sdp::solve(prob.sdp);
    REQUIRE(sol.status == sdp::Status::Optimal);
    CHECK(std::abs(silp_solution(prob, sol)(0)) <= 1e-7);
  }
  SUBCASE("a quintic row settles on the first adaptive grid") {
    SemiInfiniteProgram sip;
    sip.num_vars = 2;
    sip.rows = {{[](double t) { return std::pow(t, 5) - t; }, [](double) { return 1.0; }}};
    sip.rhs = VectorXd::Ones(1);
    sip.objective = Eigen::Vector2d(0, -1);
    const auto prob = build_silp_sdp(sip, 1e-14);
    CHECK(prob.grids[0].degree() == 16);
    const auto sol = sdp::solve(prob.sdp);
    REQUIRE(sol.status == sdp::Status::Optimal);
    // x_1 (t^5 - t) + x_2 <= 1: x_2 = 1 with x_1 = 0 is optimal
    CHECK(silp_solution(prob, sol)(1) == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("adaptive failure names the row") {
    SemiInfiniteProgram sip;
    sip.num_vars = 1;
    sip.rows = {{[](double) { return 1.0; }}, {[](double t) { return std::abs(t); }}};
    sip.rhs = VectorXd::Ones(2);
    try {
      build_silp_sdp(sip, 1e-15);
      FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
      CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
  }
  SUBCASE("the Gaussian-mixture support problem through the generic builder") {
    const FisherModel model = gaussian_mixture_model({-0.5, 0.0, 0.5}, 3.0);
    // x = (y, W_00, W_01, W_02, W_11, W_12, W_22); row: -y + W . M_t <= 0
    const std::vector<std::pair<int, int>> pairs{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    SemiInfiniteProgram sip;
    sip.num_vars = 7;
    std::vector<Sampler> row{[](double) { return -1.0; }};
    for (auto [a, b] : pairs) {
      const double mult = a == b ? 1.0 : 2.0;
      row.push_back([=](double t) { return mult * model.basis[std::size_t(a)](t) * model.basis[std::size_t(b)](t); });
    }
    sip.rows = {row};
    sip.rhs = VectorXd::Zero(1);
    sip.objective = VectorXd::Zero(7);
    sip.objective(0) = 1;
    sip.extra = [&](sdp::BlockSdpProblem& p, Index x) {
      const Index W = p.add_psd_block(3);
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const Index r = p.add_constraint(0.0);
        p.add_entry(r, x, Index(k) + 1, Index(k) + 1, 1.0);
        p.add_entry(r, W, pairs[k].first, pairs[k].second, pairs[k].first == pairs[k].second ? -1.0 : -0.5);
      }
      const Index tr = p.add_constraint(1.0);
      for (Index i = 0; i < 3; ++i) p.add_entry(tr, W, i, i, 1.0);
    };
    const auto prob = build_silp_sdp(sip, 1e-14);
    const auto sol = sdp::solve(prob.sdp);
    REQUIRE(sol.status == sdp::Status::Optimal);
    const auto roots = contact_points(silp_residual(prob, 0, sol));
    const DesignResult ref = eoptimal_design(model);
    REQUIRE(roots.size() == ref.support.size());
    for (std::size_t i = 0; i < roots.size(); ++i) CHECK(std::abs(roots[i] - ref.support[i]) <= 1e-5);
  }
}
