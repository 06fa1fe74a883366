#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "fwopt/penalties.hpp"
#include "oracles.hpp"

using namespace fwopt;

namespace {

ComplexMatrix random_residual(std::mt19937_64& gen, int rows, int cols, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  ComplexMatrix r(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) r(i, j) = Complex(normal(gen), normal(gen));
  return r;
}

// Huber as infimal convolution: eta(r) = min_t 0.5 (|r| - t)^2 + kappa |t|,
// evaluated on a fine grid of t.
double huber_inf_conv(double r, double kappa) {
  const double a = std::abs(r);
  double best = 0.5 * a * a;  // t = 0
  const int steps = 400000;
  for (int i = 0; i <= steps; ++i) {
    const double t = a * static_cast<double>(i) / steps;
    best = std::min(best, 0.5 * (a - t) * (a - t) + kappa * t);
  }
  return best;
}

// d value / d Re(r_ij) and d value / d Im(r_ij) by central differences.
double fd_real(const Penalty& p, ComplexMatrix r, int i, int j, double step) {
  ComplexMatrix rp = r, rm = r;
  rp(i, j) += step;
  rm(i, j) -= step;
  return (p.value(rp) - p.value(rm)) / (2.0 * step);
}

double fd_imag(const Penalty& p, ComplexMatrix r, int i, int j, double step) {
  ComplexMatrix rp = r, rm = r;
  rp(i, j) += Complex(0.0, step);
  rm(i, j) -= Complex(0.0, step);
  return (p.value(rp) - p.value(rm)) / (2.0 * step);
}

}  // namespace

TEST_SUITE("penalties") {

TEST_CASE("construction rejects nonpositive parameters") {
  CHECK_THROWS_AS(Penalty::huber(0.0), InvalidInput);
  CHECK_THROWS_AS(Penalty::huber(-1.0), InvalidInput);
  CHECK_THROWS_AS(Penalty::student_t(0.0), InvalidInput);
  CHECK_THROWS_AS(Penalty::student_t(-0.5), InvalidInput);
}

TEST_CASE("non-finite residual entries are rejected") {
  ComplexMatrix r = ComplexMatrix::Zero(2, 2);
  r(1, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(Penalty::least_squares().value(r), InvalidInput);
  CHECK_THROWS_AS(Penalty::student_t(1.0).gradient(r), InvalidInput);
}

TEST_CASE("values at pinned points") {
  const ComplexMatrix zero = ComplexMatrix::Zero(3, 4);
  CHECK(Penalty::least_squares().value(zero) == 0.0);

  ComplexMatrix one(1, 1);
  one(0, 0) = Complex(1.0, 0.0);
  CHECK(Penalty::student_t(1.0).value(one) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  ComplexMatrix three(1, 1);
  three(0, 0) = Complex(3.0, 0.0);
  CHECK(Penalty::huber(1.0).value(three) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("huber agrees with its infimal-convolution definition") {
  auto gen = oracles::rng(11);
  std::uniform_real_distribution<double> mag(0.0, 4.0);
  const double kappa = 1.0;
  const Penalty p = Penalty::huber(kappa);
  for (int t = 0; t < 20; ++t) {
    const double r = mag(gen);
    ComplexMatrix m(1, 1);
    m(0, 0) = Complex(r, 0.0);
    CHECK(p.value(m) == doctest::Approx(huber_inf_conv(r, kappa)).epsilon(1e-6));
  }
}

TEST_CASE("gradient vanishes at zero residual for every kind") {
  const ComplexMatrix zero = ComplexMatrix::Zero(2, 3);
  for (const auto& p :
       {Penalty::least_squares(), Penalty::huber(0.7), Penalty::student_t(2.0)}) {
    CHECK(p.gradient(zero).norm() == 0.0);
  }
}

TEST_CASE("gradient matches finite differences on real and imaginary parts") {
  auto gen = oracles::rng(22);
  for (const auto& p :
       {Penalty::least_squares(), Penalty::huber(1.3), Penalty::student_t(0.8)}) {
    const ComplexMatrix r = random_residual(gen, 3, 4, 1.0);
    const ComplexMatrix g = p.gradient(r);
    const double step = 1e-6;
    for (int j = 0; j < 4; ++j) {
      for (int i = 0; i < 3; ++i) {
        const double dre = fd_real(p, r, i, j, step);
        const double dim = fd_imag(p, r, i, j, step);
        CHECK(std::abs(dre - g(i, j).real()) <=
              1e-6 * std::max({1.0, std::abs(dre), std::abs(g(i, j).real())}));
        CHECK(std::abs(dim - g(i, j).imag()) <=
              1e-6 * std::max({1.0, std::abs(dim), std::abs(g(i, j).imag())}));
      }
    }
  }
}

TEST_CASE("directional derivative matches finite differences") {
  auto gen = oracles::rng(33);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& p :
       {Penalty::least_squares(), Penalty::huber(0.9), Penalty::student_t(1.5)}) {
    const ComplexMatrix r = random_residual(gen, 4, 5, 1.2);
    ComplexMatrix dir(4, 5);
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 4; ++i) dir(i, j) = Complex(normal(gen), normal(gen));
    const double step = 1e-6;
    const double fd = (p.value(r + step * dir) - p.value(r - step * dir)) / (2.0 * step);
    // d value = Re<gradient, dir>
    const double analytic = (p.gradient(r).conjugate().cwiseProduct(dir)).sum().real();
    CHECK(std::abs(fd - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic)));
  }
}

TEST_CASE("student_t influence is re-descending with factor 2 over x/(1+x^2)") {
  const Penalty p = Penalty::student_t(1.0);
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 25.0}) {
    ComplexMatrix r(1, 1);
    r(0, 0) = Complex(x, 0.0);
    const double g = p.gradient(r)(0, 0).real();
    CHECK(g == doctest::Approx(2.0 * x / (1.0 + x * x)).epsilon(1e-12));
  }
  // re-descending: decreasing past the peak at |r| = sqrt(nu)
  ComplexMatrix a(1, 1), b(1, 1);
  a(0, 0) = Complex(2.0, 0.0);
  b(0, 0) = Complex(20.0, 0.0);
  CHECK(std::abs(p.gradient(b)(0, 0)) < std::abs(p.gradient(a)(0, 0)));
}

TEST_CASE("student_t gradient magnitude is bounded by 1/sqrt(nu)") {
  auto gen = oracles::rng(44);
  for (double nu : {0.3, 1.0, 4.0}) {
    const Penalty p = Penalty::student_t(nu);
    const double bound = 1.0 / std::sqrt(nu);
    double seen = 0.0;
    for (int t = 0; t < 200; ++t) {
      const ComplexMatrix r = random_residual(gen, 2, 2, std::sqrt(nu));
      seen = std::max(seen, p.gradient(r).cwiseAbs().maxCoeff());
      CHECK(p.gradient(r).cwiseAbs().maxCoeff() <= bound * (1.0 + 1e-12));
    }
    // the bound is attained at |r| = sqrt(nu)
    ComplexMatrix peak(1, 1);
    peak(0, 0) = Complex(std::sqrt(nu), 0.0);
    CHECK(p.gradient(peak).cwiseAbs().maxCoeff() == doctest::Approx(bound).epsilon(1e-12));
    CHECK(seen <= bound);
  }
}

TEST_CASE("value lower bounds: minimum at zero residual") {
  auto gen = oracles::rng(55);
  const ComplexMatrix zero = ComplexMatrix::Zero(3, 3);
  for (int t = 0; t < 50; ++t) {
    const ComplexMatrix r = random_residual(gen, 3, 3, 2.0);
    CHECK(Penalty::least_squares().value(r) >= 0.0);
    CHECK(Penalty::huber(1.1).value(r) >= 0.0);
    CHECK(Penalty::student_t(0.7).value(r) >=
          Penalty::student_t(0.7).value(zero) - 1e-12);
  }
  CHECK(Penalty::student_t(0.7).value(zero) ==
        doctest::Approx(9.0 * std::log(0.7)).epsilon(1e-14));
}

TEST_CASE("huber seam: value and gradient agree across branches at |r| = kappa") {
  const double kappa = 1.7;
  const Penalty p = Penalty::huber(kappa);
  ComplexMatrix at(1, 1);
  at(0, 0) = std::polar(kappa, 0.3);
  // quadratic branch value and linear branch value coincide at the seam
  CHECK(p.value(at) == doctest::Approx(0.5 * kappa * kappa).epsilon(1e-14));
  const Complex g_at = p.gradient(at)(0, 0);
  CHECK(std::abs(g_at - at(0, 0)) <= 1e-14 * kappa);  // quadratic branch: g = r
  // just outside the seam both branches give nearly identical results
  ComplexMatrix out(1, 1);
  out(0, 0) = std::polar(kappa * (1.0 + 1e-12), 0.3);
  CHECK(std::abs(p.gradient(out)(0, 0) - g_at) <= 1e-10 * kappa);
  CHECK(p.value(out) == doctest::Approx(p.value(at)).epsilon(1e-10));
}

}  // TEST_SUITE
