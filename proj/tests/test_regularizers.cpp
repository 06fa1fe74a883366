#include <doctest.h>

#include <cmath>
#include <random>

#include "fwopt/regularizers.hpp"
#include "oracles.hpp"

using namespace fwopt;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// prox objective 0.5||g - y||^2 + t R(g)
double prox_objective(const Regularizer& reg, const Vector& y, const Vector& g, double t) {
  return 0.5 * (g - y).squaredNorm() + t * reg.value(g);
}

}  // namespace

TEST_SUITE("regularizers") {

TEST_CASE("construction validation") {
  CHECK_THROWS_AS(Regularizer::box(vec({1.0}), vec({0.0})), InvalidInput);
  CHECK_THROWS_AS(Regularizer::box(vec({0.0, 0.0}), vec({1.0})), InvalidInput);
  CHECK_THROWS_AS(Regularizer::l1_penalty(-0.1), InvalidInput);
  CHECK_THROWS_AS(Regularizer::l1_ball(0.0), InvalidInput);
  CHECK_THROWS_AS(Regularizer::tv1d(-1.0), InvalidInput);
  CHECK_THROWS_AS(Regularizer::tv2d_anisotropic(1.0, 0, 4), InvalidInput);
}

TEST_CASE("values at pinned points") {
  CHECK(Regularizer::l1_penalty(2.0).value(vec({1.0, -3.0})) == 8.0);
  CHECK(Regularizer::l1_ball(1.0).value(vec({0.5, 0.4})) == 0.0);
  CHECK(Regularizer::l1_ball(1.0).value(vec({2.0, 0.0})) == kInf);
  CHECK(Regularizer::zero().value(vec({5.0, -7.0})) == 0.0);
  CHECK(Regularizer::tv1d(2.0).value(vec({0.0, 1.0, -1.0})) == 6.0);
  // 2x2 grid, z fastest: g = [[1, 2], [4, 3]] gives column diffs 3+1, row diffs 1+1
  CHECK(Regularizer::tv2d_anisotropic(1.0, 2, 2).value(vec({1.0, 4.0, 2.0, 3.0})) == 6.0);
}

TEST_CASE("shape and argument errors") {
  const auto box = Regularizer::box(vec({0.0, 0.0}), vec({1.0, 1.0}));
  CHECK_THROWS_AS(box.value(vec({0.5})), InvalidInput);
  const auto tv2 = Regularizer::tv2d_anisotropic(1.0, 2, 3);
  CHECK_THROWS_AS(tv2.prox(vec({1.0, 2.0}), 1.0), InvalidInput);
  CHECK_THROWS_AS(Regularizer::zero().prox(vec({1.0}), 0.0), InvalidInput);
  CHECK_THROWS_AS(Regularizer::zero().prox(vec({1.0}), -2.0), InvalidInput);
}

TEST_CASE("prox at pinned points") {
  CHECK((Regularizer::l1_penalty(1.0).prox(vec({2.0, -0.5, -3.0}), 1.0) -
         vec({1.0, 0.0, -2.0}))
            .norm() == 0.0);
  CHECK((Regularizer::l1_ball(1.0).prox(vec({3.0, 0.0}), 1.0) - vec({1.0, 0.0})).norm() <=
        1e-14);
  CHECK((Regularizer::l1_ball(1.0).prox(vec({2.0, 1.0}), 1.0) - vec({1.0, 0.0})).norm() <=
        1e-14);
  const auto box = Regularizer::box(vec({0.0, 0.0, 0.0}), vec({1.0, 1.0, 1.0}));
  for (double t : {0.5, 1.0, 7.0}) {
    CHECK((box.prox(vec({-0.5, 0.3, 7.0}), t) - vec({0.0, 0.3, 1.0})).norm() == 0.0);
  }
}

TEST_CASE("l1 ball prox matches the bisection oracle") {
  auto gen = oracles::rng(101);
  const auto reg = Regularizer::l1_ball(1.0);
  for (int t = 0; t < 100; ++t) {
    const Vector y = oracles::random_vector(gen, 12, 2.0);
    const Vector got = reg.prox(y, 0.7);
    const Vector want = oracles::project_l1_ball_bisect(y, 1.0);
    CHECK((got - want).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("tv1d prox: pinned 2-point example and grid-search oracle") {
  const Vector got = Regularizer::tv1d(1.0).prox(vec({0.0, 4.0}), 1.0);
  CHECK((got - vec({1.0, 3.0})).lpNorm<Eigen::Infinity>() <= 1e-12);

  // brute-force search over the 2-D prox objective confirms the minimizer
  const auto reg = Regularizer::tv1d(1.0);
  const Vector y = vec({0.0, 4.0});
  double best = kInf;
  Vector best_g = y;
  for (int a = -10; a <= 50; ++a) {
    for (int b = -10; b <= 50; ++b) {
      const Vector g = vec({a * 0.1, b * 0.1});
      const double val = prox_objective(reg, y, g, 1.0);
      if (val < best) {
        best = val;
        best_g = g;
      }
    }
  }
  CHECK((best_g - got).lpNorm<Eigen::Infinity>() <= 0.1 + 1e-12);
  CHECK(prox_objective(reg, y, got, 1.0) <= best + 1e-12);
}

TEST_CASE("tv1d prox of a constant vector is that vector") {
  const Vector y = Vector::Constant(17, 3.25);
  CHECK((Regularizer::tv1d(2.0).prox(y, 1.5) - y).norm() == 0.0);
}

TEST_CASE("tv1d prox matches the dual coordinate-descent oracle") {
  auto gen = oracles::rng(202);
  std::uniform_int_distribution<int> size(2, 60);
  std::uniform_real_distribution<double> lam(0.01, 2.0);
  for (int t = 0; t < 50; ++t) {
    const int n = size(gen);
    const Vector y = oracles::random_vector(gen, n, 1.5);
    const double level = lam(gen);
    const Vector got = tv1d_prox(y, level);
    const Vector want = oracles::tv1d_prox_dual_cd(y, level);
    CHECK((got - want).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("project_l1_ball: feasible fixed point and pinned projection") {
  const Vector inside = vec({0.2, -0.3, 0.1});
  CHECK((project_l1_ball(inside, 1.0) - inside).norm() == 0.0);
  CHECK((project_l1_ball(vec({2.0, 1.0}), 1.0) - vec({1.0, 0.0})).norm() <= 1e-14);
  CHECK_THROWS_AS(project_l1_ball(vec({1.0}), 0.0), InvalidInput);
  CHECK_THROWS_AS(project_l1_ball(vec({1.0}), -1.0), InvalidInput);
}

TEST_CASE("project_l1_ball matches the sort-based oracle") {
  auto gen = oracles::rng(303);
  std::uniform_real_distribution<double> scale(0.2, 5.0);
  for (int t = 0; t < 200; ++t) {
    const Vector y = oracles::random_vector(gen, 50, scale(gen));
    const Vector got = project_l1_ball(y, 1.0);
    const Vector want = oracles::project_l1_ball_sorted(y, 1.0);
    CHECK((got - want).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(got.lpNorm<1>() <= 1.0 + 1e-12);
  }
}

TEST_CASE("l1 ball projection equals soft thresholding at the optimal theta") {
  auto gen = oracles::rng(404);
  for (int t = 0; t < 20; ++t) {
    const Vector y = oracles::random_vector(gen, 30, 2.0);
    if (y.lpNorm<1>() <= 1.0) continue;
    const Vector proj = project_l1_ball(y, 1.0);
    // recover theta from any surviving coordinate
    double theta = -1.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (proj(i) != 0.0) {
        theta = std::abs(y(i)) - std::abs(proj(i));
        break;
      }
    }
    REQUIRE(theta >= 0.0);
    CHECK((proj - soft_threshold(y, theta)).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("soft thresholding zero set grows monotonically with lambda") {
  auto gen = oracles::rng(505);
  const Vector y = oracles::random_vector(gen, 200, 1.0);
  int prev_zeros = 0;
  for (double lam : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}) {
    const Vector s = soft_threshold(y, lam);
    int zeros = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) == 0.0) ++zeros;
      if (std::abs(y(i)) <= lam) CHECK(s(i) == 0.0);  // exact kill inside the threshold
    }
    CHECK(zeros >= prev_zeros);
    prev_zeros = zeros;
  }
}

TEST_CASE("prox optimality: random perturbations never beat the prox point") {
  auto gen = oracles::rng(606);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 16;
  const auto regs = std::vector<Regularizer>{
      Regularizer::zero(),
      Regularizer::box(Vector::Constant(n, -0.4), Vector::Constant(n, 0.9)),
      Regularizer::l1_penalty(0.7),
      Regularizer::l1_ball(2.0),
      Regularizer::tv1d(0.5),
      Regularizer::tv2d_anisotropic(0.4, 4, 4)};
  for (const auto& reg : regs) {
    const bool inexact = reg.kind() == RegularizerKind::TV2DAnisotropic;
    const double slack = inexact ? 1e-6 : 1e-10;
    for (int rep = 0; rep < 5; ++rep) {
      const Vector y = oracles::random_vector(gen, n, 1.0);
      const double t = 0.3 + 0.5 * rep;
      const Vector g = reg.prox(y, t);
      const double base = prox_objective(reg, y, g, t);
      for (int k = 0; k < 200; ++k) {
        Vector gp = g;
        for (Eigen::Index i = 0; i < n; ++i) gp(i) += 0.03 * normal(gen);
        if (reg.is_indicator()) gp = reg.prox(gp, 1.0);  // compare among feasible points
        CHECK(base <= prox_objective(reg, y, gp, t) + slack);
      }
    }
  }
}

TEST_CASE("prox is firmly nonexpansive (nonexpansiveness checked)") {
  auto gen = oracles::rng(707);
  const int n = 20;
  const auto regs = std::vector<Regularizer>{
      Regularizer::zero(),
      Regularizer::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)),
      Regularizer::l1_penalty(0.4),
      Regularizer::l1_ball(1.5),
      Regularizer::tv1d(0.8)};
  for (const auto& reg : regs) {
    for (int t = 0; t < 50; ++t) {
      const Vector y1 = oracles::random_vector(gen, n, 1.0);
      const Vector y2 = oracles::random_vector(gen, n, 1.0);
      const double step = 0.9;
      const double lhs = (reg.prox(y1, step) - reg.prox(y2, step)).norm();
      CHECK(lhs <= (y1 - y2).norm() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("indicator feasibility tolerance absorbs projection rounding") {
  auto gen = oracles::rng(808);
  const auto ball = Regularizer::l1_ball(0.37);
  for (int t = 0; t < 100; ++t) {
    const Vector y = oracles::random_vector(gen, 40, 3.0);
    CHECK(ball.value(ball.prox(y, 1.0)) == 0.0);
  }
  const auto box = Regularizer::box(Vector::Constant(5, 0.25), Vector::Constant(5, 0.75));
  const Vector z = box.prox(oracles::random_vector(gen, 5, 10.0), 1.0);
  CHECK(box.value(z) == 0.0);
}

}  // TEST_SUITE
