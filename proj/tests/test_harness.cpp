#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ilw/accel.hpp"
#include "ilw/harness.hpp"
#include "ilw/io.hpp"

using namespace ilw;

namespace {

const ModelParams kIlw{0.8, 1.2, Regime::ILW};
const ModelParams kBo{0.8, 1.2, Regime::BO};

std::vector<double> sample(const SpectralGrid& g, double (*f)(double)) {
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = f(g.node(j));
  return v;
}

AccelerationRow row(int mw, int iterations) {
  AccelerationRow r;
  r.mw = mw;
  r.iterations = iterations;
  r.converged = true;
  return r;
}

}  // namespace

TEST_CASE("decay_fit on known profiles") {
  const SpectralGrid g(40.0, 2048);
  const auto x = g.nodes();
  SUBCASE("sech^2 decays like e^{-2x}") {
    const auto z = sample(g, [](double s) { return std::pow(1.0 / std::cosh(s), 2); });
    const DecayFit e = decay_fit(x, z, DecayModel::exponential, 3.0, 12.0);
    CHECK(e.fitted_rate == doctest::Approx(2.0).epsilon(0.05));
    CHECK(e.fit_quality > 0.999);
    const DecayFit a = decay_fit(x, z, DecayModel::algebraic, 3.0, 12.0);
    CHECK(a.fit_quality < e.fit_quality);
  }
  SUBCASE("1/(1+x^2)^2 decays like |x|^-4") {
    const auto z = sample(g, [](double s) { return 1.0 / std::pow(1.0 + s * s, 2); });
    const DecayFit a = decay_fit(x, z, DecayModel::algebraic, 5.0, 36.0);
    CHECK(a.fitted_rate == doctest::Approx(4.0).epsilon(0.05));
    const DecayFit e = decay_fit(x, z, DecayModel::exponential, 5.0, 36.0);
    CHECK(e.fit_quality < a.fit_quality);
  }
  SUBCASE("a shifted center is honoured") {
    const auto z = sample(g, [](double s) { return std::exp(-0.7 * std::abs(s - 3.0)); });
    CHECK(decay_fit(x, z, DecayModel::exponential, 2.0, 20.0, 3.0).fitted_rate == doctest::Approx(0.7));
  }
  SUBCASE("underflow") {
    const auto z = sample(g, [](double s) { return std::exp(-3.0 * std::abs(s)); });
    CHECK_THROWS_AS(decay_fit(x, z, DecayModel::exponential, 5.0, 36.0), WindowUnderflow);
    CHECK_THROWS_AS(decay_fit(x, z, DecayModel::exponential, 5.0, 5.01), WindowUnderflow);
    const double xb = clip_to_floor(x, z, 2.0, 36.0, 1e-10);
    CHECK(xb == doctest::Approx(std::log(1e10) / 3.0).epsilon(0.01));
    CHECK_NOTHROW(decay_fit(x, z, DecayModel::exponential, 2.0, xb - g.spacing()));
  }
  CHECK_THROWS_AS(decay_fit(x, x, DecayModel::exponential, 5.0, 4.0), InvalidArgument);
}

TEST_CASE("default tail windows") {
  const SpectralGrid g(100.0, 64);
  auto [a, b] = tail_window(g, 0.5, DecayModel::exponential);
  CHECK(a == doctest::Approx(10.0));
  CHECK(b == doctest::Approx(90.0));
  std::tie(a, b) = tail_window(g, 0.5, DecayModel::algebraic);
  CHECK(b == doctest::Approx(50.0));
}

TEST_CASE("roundtrip at T = 0 is exact") {
  const SpectralGrid g(16.0, 64);
  const FixedPointSystem sys(kBo, g, 0.57);
  SolitaryConfig cfg;
  cfg.speed = 0.57;
  const auto r = traveling_wave_roundtrip(kBo, g, seed_profile(kBo, sys.transform(), cfg), 0.57, 0.0, 1e-3);
  CHECK(r.relative_error == 0.0);
}

TEST_CASE("roundtrip of a converged BO wave") {
  const SpectralGrid g(64.0, 512);
  SolitaryConfig cfg;
  cfg.speed = 0.57;
  const FixedPointSystem sys(kBo, g, cfg.speed);
  const SolitaryResult w = petviashvili_iterate(sys, cfg, seed_profile(kBo, sys.transform(), cfg));
  const auto r = traveling_wave_roundtrip(kBo, g, w.wave, cfg.speed, 1.0, 1e-3);
  CHECK(r.relative_error <= 1e-6);
  CHECK(r.zero_mode_drift <= 1e-12);
  // a wrong speed leaves a visible shift
  const auto off = traveling_wave_roundtrip(kBo, g, w.wave, 0.5, 1.0, 1e-3);
  CHECK(off.relative_error > 1e-3);
}

TEST_CASE("convergence study") {
  const InitialData gaussian = [](double x) {
    const double z = 0.05 * std::exp(-0.5 * x * x / (0.026 * 0.026));
    return std::pair{z, 0.5 * z};
  };
  ConvergenceSetup setup;
  setup.t_end = 0.1;
  for (const auto& p : {kIlw, kBo}) {
    setup.params = p;
    const ConvergenceReport r = convergence_study(setup, gaussian);
    REQUIRE(r.errors.size() == 3);
    CHECK(r.ratios.back() > 10.0);
    CHECK(r.all_ratios_at_least(16.0));
    CHECK_FALSE(r.temporal_floor_reached);
    CHECK(r.zero_mode_drift_rate <= 1e-12);
  }

  SUBCASE("band-limited data sits at the rounding floor once N/2 exceeds its top mode") {
    // amplitude small enough that harmonics generated by the products stay
    // below rounding over the run
    const InitialData low = [](double x) {
      const double z = 1e-6 * (std::cos(2 * std::numbers::pi * x) + std::sin(6 * std::numbers::pi * x));
      return std::pair{z, z};
    };
    setup.params = kIlw;
    const ConvergenceReport r = convergence_study(setup, low);
    for (double e : r.errors) CHECK(e < 1e-15);
  }
  SUBCASE("results do not depend on the thread count") {
    setup.params = kBo;
    setup.threads = 1;
    const ConvergenceReport one = convergence_study(setup, gaussian);
    setup.threads = 3;
    const ConvergenceReport three = convergence_study(setup, gaussian);
    CHECK(one.errors == three.errors);
    CHECK(one.temporal_error == three.temporal_error);
  }
  SUBCASE("resolution span") {
    setup.resolutions = {32, 64};
    CHECK_THROWS_AS(convergence_study(setup, gaussian), InvalidArgument);
  }
}

TEST_CASE("acceleration benchmark rows") {
  const SpectralGrid g(64.0, 1024);
  SolitaryConfig cfg;
  cfg.speed = 0.57;
  const std::vector<int> mws{1, 2};
  const auto rows = acceleration_benchmark(kBo, g, cfg, mws);
  REQUIRE(rows.size() == 2);
  const FixedPointSystem sys(kBo, g, cfg.speed);
  const auto plain = petviashvili_iterate(sys, cfg, seed_profile(kBo, sys.transform(), cfg));
  CHECK(rows[0].iterations == plain.trace.iterations_used);
  CHECK(rows[0].status == "converged");
  CHECK(rows[1].iterations < rows[0].iterations);

  cfg.max_iter = 3;
  const auto capped = acceleration_benchmark(kBo, g, cfg, mws);
  CHECK(capped[0].status == "not converged");
  CHECK_FALSE(capped[1].converged);
}

TEST_CASE("acceleration ordering rule") {
  using Rows = std::vector<AccelerationRow>;
  CHECK(acceleration_ordering_holds(Rows{row(1, 100), row(2, 30), row(3, 30), row(4, 25)}));
  CHECK_FALSE(acceleration_ordering_holds(Rows{row(1, 100), row(2, 100)}));
  CHECK_FALSE(acceleration_ordering_holds(Rows{row(1, 100), row(2, 30), row(3, 35)}));
  CHECK_FALSE(acceleration_ordering_holds(Rows{row(1, 100), row(2, 80), row(3, 20)}));
  Rows failed{row(1, 100), row(2, 30)};
  failed[1].converged = false;
  CHECK_FALSE(acceleration_ordering_holds(failed));
}

TEST_CASE("io: shortest round-trip numbers and CSV reload") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");

  const SpectralGrid g(8.0, 32);
  const Transform t(g);
  SolitaryConfig cfg;
  cfg.speed = 0.57;
  const StatePair s = seed_profile(kBo, t, cfg);
  const auto dir = std::filesystem::temp_directory_path() / "ilw_io_test";
  write_atomic(dir / "wave.csv", wave_csv(t, s));
  const NodalWave w = read_wave_csv(dir / "wave.csv");
  const NodalValues z = t.to_nodal(s.zeta);
  REQUIRE(w.x.size() == 32);
  for (std::size_t j = 0; j < 32; ++j) {
    CHECK(w.x[j] == g.node(j));
    CHECK(w.zeta[j] == z[j]);
  }
  CHECK_FALSE(std::filesystem::exists(dir / "wave.csv.tmp"));
  std::filesystem::remove_all(dir);
}
