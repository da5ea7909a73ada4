#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ilw/spectral.hpp"
#include "oracles.hpp"

using namespace ilw;
using std::numbers::pi;

TEST_CASE("grid nodes and FFT-order wavenumbers") {
  const SpectralGrid g(2.0, 8);
  CHECK(g.node(0) == doctest::Approx(-2.0));
  CHECK(g.node(4) == doctest::Approx(0.0));
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.mode(3) == 3);
  CHECK(g.mode(4) == -4);
  CHECK(g.mode(7) == -1);
  CHECK(g.nyquist_slot() == 4);
  CHECK(g.max_mode() == 3);
  CHECK(g.wavenumber(1) == doctest::Approx(pi / 2.0));
  for (int k = -4; k < 4; ++k) CHECK(g.mode(g.slot(k)) == k);
  CHECK_THROWS_AS(SpectralGrid(1.0, 6), InvalidArgument);
  CHECK_THROWS_AS(SpectralGrid(1.0, 9), InvalidArgument);
  CHECK_THROWS_AS(SpectralGrid(0.0, 8), InvalidArgument);
}

TEST_CASE("regime names") {
  CHECK(parse_regime("ilw") == Regime::ILW);
  CHECK(parse_regime("B-O") == Regime::BO);
  CHECK(parse_regime("BO") == Regime::BO);
  CHECK_THROWS_AS(parse_regime("kdv"), InvalidArgument);
}

TEST_CASE("symbols") {
  const ModelParams ilw{0.8, 1.2, Regime::ILW};
  const ModelParams bo{0.8, 1.2, Regime::BO};
  const double a = 1.2 / 0.8;

  SUBCASE("ILW matches |k| coth |k| away from the switch points") {
    for (double k : {1e-3, 0.3, 1.0, 5.0, 19.0}) {
      CHECK(symbol_g(ilw, k) == doctest::Approx(a * k / std::tanh(k)).epsilon(1e-13));
      CHECK(symbol_g(ilw, -k) == symbol_g(ilw, k));
    }
  }
  SUBCASE("ILW small-k series and large-k asymptote are continuous") {
    CHECK(symbol_g(ilw, 0.0) == doctest::Approx(a));
    CHECK(symbol_g(ilw, 1e-9) == doctest::Approx(a).epsilon(1e-15));
    CHECK(symbol_g(ilw, 20.0 + 1e-9) == doctest::Approx(a * (20.0 + 1e-9) / std::tanh(20.0)).epsilon(1e-15));
  }
  SUBCASE("BO") {
    CHECK(symbol_g(bo, 0.0) == 0.0);
    CHECK(symbol_g(bo, -3.0) == doctest::Approx(3.0 * a));
  }
  SUBCASE("J is affine in T") {
    for (double k : {0.0, 0.5, 2.0, 40.0}) {
      for (const auto& p : {ilw, bo}) {
        const double g = symbol_g(p, k);
        CHECK(symbol_T(p, k) == doctest::Approx(1.0 / (1.0 + g)));
        CHECK(symbol_J(p, k) == doctest::Approx((1.0 + (p.alpha - 1.0) / p.alpha * g) / (1.0 + g)));
      }
    }
  }
}

TEST_CASE("transform normalization and round trip") {
  const SpectralGrid g(3.0, 16);
  const Transform t(g);
  NodalValues f(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) f[j] = 2.0 + std::cos(pi * g.node(j) / 3.0);
  const Coefficients c = t.to_coefficients(f);
  CHECK(c[0].real() == doctest::Approx(2.0));
  CHECK(c[1].real() == doctest::Approx(0.5));
  CHECK(c[g.slot(-1)].real() == doctest::Approx(0.5));
  CHECK(std::abs(c[2]) < 1e-15);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    for (double& v : f) v = u(rng);
    const NodalValues back = t.to_nodal(t.to_coefficients(f));
    for (std::size_t j = 0; j < f.size(); ++j) CHECK(back[j] == doctest::Approx(f[j]).epsilon(1e-13));
  }
}

TEST_CASE("l2 norm is Parseval on [-l, l]") {
  const SpectralGrid g(3.0, 32);
  const Transform t(g);
  NodalValues f(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) f[j] = std::cos(2.0 * pi * g.node(j) / 3.0);
  // integral of cos^2 over one period of length 6 is 3
  CHECK(l2_norm(g, t.to_coefficients(f)) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("projected_product matches the O(N^2) convolution oracle") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {8u, 16u, 32u}) {
    const SpectralGrid g(5.0, n);
    const Transform t(g);
    for (int trial = 0; trial < 10; ++trial) {
      const Coefficients a = test::random_galerkin(g, rng);
      const Coefficients b = test::random_galerkin(g, rng);
      const Coefficients got = t.projected_product(a, b);
      const Coefficients want = test::convolution_oracle(g, a, b);
      double err = 0.0;
      for (std::size_t j = 0; j < n; ++j) err = std::max(err, std::abs(got[j] - want[j]));
      CHECK(err <= 1e-12);
    }
  }
}

TEST_CASE("projected_product is alias-free where plain collocation aliases") {
  const SpectralGrid g(1.0, 16);
  const Transform t(g);
  // modes 5 and 5 sum to 10, outside |k| <= 7; collocation folds it onto -6.
  Coefficients a(16, Complex{});
  a[5] = 0.5;
  a[g.slot(-5)] = 0.5;
  const Coefficients p = t.projected_product(a, a);
  CHECK(std::abs(p[g.slot(-6)]) < 1e-15);
  CHECK(std::abs(p[0] - Complex(0.5)) < 1e-15);

  const NodalValues v = t.to_nodal(a);
  NodalValues sq(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) sq[j] = v[j] * v[j];
  CHECK(std::abs(t.to_coefficients(sq)[g.slot(-6)]) > 0.1);
}

TEST_CASE("property: products of Hermitian inputs are Hermitian and Nyquist-free") {
  std::mt19937_64 rng(3);
  const SpectralGrid g(2.0, 32);
  const Transform t(g);
  for (int trial = 0; trial < 25; ++trial) {
    const Coefficients p = t.projected_product(test::random_galerkin(g, rng), test::random_galerkin(g, rng));
    CHECK(hermitian_defect(p) < 1e-15);
    CHECK(p[g.nyquist_slot()] == Complex{});
  }
}

TEST_CASE("make_hermitian and truncate") {
  Coefficients c{{1.0, 2.0}, {3.0, 1.0}, {4.0, 5.0}, {1.0, -3.0}};
  make_hermitian(c);
  CHECK(c[0] == Complex(1.0, 0.0));
  CHECK(c[2] == Complex(4.0, 0.0));
  CHECK(c[1] == Complex(2.0, 2.0));
  CHECK(c[3] == std::conj(c[1]));
  CHECK(hermitian_defect(c) == 0.0);
  truncate(c);
  CHECK(c[2] == Complex{});
}

TEST_CASE("translate") {
  const SpectralGrid g(4.0, 32);
  const Transform t(g);
  NodalValues f(g.size());
  auto profile = [](double x) { return std::exp(std::cos(pi * x / 4.0)); };
  for (std::size_t j = 0; j < g.size(); ++j) f[j] = profile(g.node(j));
  const Coefficients c = t.to_coefficients(f);

  SUBCASE("shift by s evaluates f(x - s)") {
    const NodalValues moved = t.to_nodal(translate(g, c, 1.3));
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(moved[j] == doctest::Approx(profile(g.node(j) - 1.3)).epsilon(1e-12));
    }
  }
  SUBCASE("property: unitary and composable") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> s(-20.0, 20.0);
    for (int trial = 0; trial < 20; ++trial) {
      const Coefficients r = test::random_galerkin(g, rng);
      const double a = s(rng);
      const double b = s(rng);
      CHECK(std::abs(l2_norm(g, translate(g, r, a)) - l2_norm(g, r)) <= 1e-13 * l2_norm(g, r));
      const Coefficients ab = translate(g, translate(g, r, a), b);
      const Coefficients once = translate(g, r, a + b);
      for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(ab[j] - once[j]) < 1e-12);
    }
  }
  SUBCASE("a full period is the identity") {
    const Coefficients same = translate(g, c, g.period());
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(same[j] - c[j]) < 1e-12);
  }
}

TEST_CASE("prolong evaluates the same trigonometric polynomial") {
  std::mt19937_64 rng(9);
  const SpectralGrid coarse(1.5, 16);
  const SpectralGrid fine(1.5, 64);
  const Coefficients c = test::random_galerkin(coarse, rng);
  const NodalValues v = Transform(fine).to_nodal(prolong(coarse, fine, c));
  for (std::size_t j = 0; j < fine.size(); ++j) {
    CHECK(v[j] == doctest::Approx(test::evaluate(coarse, c, fine.node(j))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(prolong(fine, coarse, Coefficients(64)), InvalidArgument);
}

TEST_CASE("nodal inner product equals the Euclidean product of nodal values") {
  std::mt19937_64 rng(13);
  const SpectralGrid g(2.0, 16);
  const Transform t(g);
  const StatePair a{test::random_galerkin(g, rng), test::random_galerkin(g, rng)};
  const StatePair b{test::random_galerkin(g, rng), test::random_galerkin(g, rng)};
  double want = 0.0;
  const NodalValues az = t.to_nodal(a.zeta), au = t.to_nodal(a.u);
  const NodalValues bz = t.to_nodal(b.zeta), bu = t.to_nodal(b.u);
  for (std::size_t j = 0; j < g.size(); ++j) want += az[j] * bz[j] + au[j] * bu[j];
  CHECK(nodal_inner(a, b) == doctest::Approx(want).epsilon(1e-13));
  CHECK(nodal_norm(a) * nodal_norm(a) == doctest::Approx(nodal_inner(a, a)));
}
