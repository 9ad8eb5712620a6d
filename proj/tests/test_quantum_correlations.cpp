#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ghostoam/quantum_correlations.hpp"
#include "oracles.hpp"

using namespace ghostoam;

namespace {

std::vector<int> partner_index(const ModeTruncation& tr) {
  std::vector<int> out(tr.count());
  for (int i = 0; i < tr.count(); ++i) out[i] = tr.index(-tr.mode(i).l, tr.mode(i).p);
  return out;
}

}  // namespace

TEST_CASE("density assembly") {
  const SpiralSpectrum one = build_spectrum(source_geometry(1e-3, 5e-4), 0, 0);
  const ThermalState s = assemble_density(one);
  const double p2 = std::pow(one.amplitude(0, 0), 2);
  CHECK(s.d == 1);
  CHECK(s.rho_c(0, 0).real() == doctest::Approx(p2));
  CHECK(s.rho_q(0, 0).real() == doctest::Approx(p2));
  CHECK(s.rho(0, 0).real() == doctest::Approx(2 * p2));

  const SpiralSpectrum sp = build_spectrum(source_geometry(1e-3, 5e-4), 1, 1);
  const ThermalState t = assemble_density(sp);
  CHECK(t.trace_rho == doctest::Approx(sp.sum_squares() + sp.sum() * sp.sum()));
  CHECK(t.rho.trace().real() == doctest::Approx(t.trace_rho));
  CHECK_THROWS_AS(assemble_density(build_spectrum(source_geometry(1e-3, 5e-4), 3, 8)), std::invalid_argument);
}

TEST_CASE("robustness") {
  CHECK(robustness(build_spectrum(source_geometry(1e-3, std::numeric_limits<double>::infinity()), 3, 3)) == 0.0);
  const SpiralSpectrum s = build_spectrum(source_geometry(1e-3, 2e-3), 60, 60);
  CHECK(s.sum() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK(std::abs(robustness(s) - 1.0) < 1e-12);
}

TEST_CASE("separability certificate examples") {
  const SeparabilityCertificate trivial = separability_decomposition(assemble_density(build_spectrum(source_geometry(1e-3, 1e-3), 0, 0)));
  CHECK(trivial.reconstruction_residual == 0.0);

  const SeparabilityCertificate c = separability_decomposition(assemble_density(build_spectrum(source_geometry(1e-3, 2e-3), 1, 0)));
  CHECK(c.reconstruction_residual < 1e-12);
  CHECK(c.min_eigenvalue_plus >= -1e-12);
  CHECK(c.min_eigenvalue_minus >= -1e-12);
}

TEST_CASE("property: separability reconstruction over random geometries") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> lr(std::log(0.03), std::log(30.0));
  for (int trial = 0; trial < 40; ++trial) {
    const int L = static_cast<int>(rng() % 3), P = static_cast<int>(rng() % 3);
    if ((2 * L + 1) * (P + 1) > 16) continue;
    const ThermalState s = assemble_density(build_spectrum(source_geometry(1e-3, 1e-3 * std::exp(lr(rng))), L, P));
    const SeparabilityCertificate c = separability_decomposition(s);
    const Eigen::MatrixXcd rebuilt = (1 + c.robustness) * c.rho_s_plus + c.diagonal_part;
    CHECK((rebuilt - s.rho).cwiseAbs().maxCoeff() < 1e-12 * s.trace_rho);
    CHECK(c.min_eigenvalue_minus >= -1e-10);
    CHECK(c.min_eigenvalue_plus >= -1e-10);
    CHECK(min_eigenvalue(s.normalized()) >= -1e-10);
  }
}

TEST_CASE("thermal discord examples") {
  CHECK(geometric_discord_thermal(build_spectrum(source_geometry(1e-3, std::numeric_limits<double>::infinity()), 4, 4)) == 0.0);
  CHECK(geometric_discord_pure(build_spectrum(source_geometry(1e-3, std::numeric_limits<double>::infinity()), 4, 4)) == 0.0);
  CHECK(geometric_discord_thermal(SpiralSpectrum::flat(ModeTruncation(0, 1))) == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
  CHECK(discord_limit(source_geometry(1e-3, std::sqrt(2.0) * 1e-3)) == doctest::Approx(1.0 / 64.0).epsilon(1e-12));
  CHECK(discord_limit(source_geometry(1e-3, 2e-3)) == doctest::Approx(1.0 / 81.0).epsilon(1e-12));
  CHECK(discord_limit(source_geometry(1e-3, std::numeric_limits<double>::infinity())) == 0.0);
  CHECK(discord_limit(source_geometry(1e-3, 1e-9)) < 1e-20);
}

TEST_CASE("pure-state discord") {
  CHECK(geometric_discord_pure(SpiralSpectrum::flat(ModeTruncation(0, 0))) == 0.0);
  CHECK(geometric_discord_pure(SpiralSpectrum::flat(ModeTruncation(0, 1))) == doctest::Approx(0.5));
  double previous = 0.0;
  for (int P = 0; P < 6; ++P) {
    const SpiralSpectrum s = SpiralSpectrum::flat(ModeTruncation(1, P));
    const double d = geometric_discord_pure(s);
    CHECK(d == doctest::Approx(1.0 - 1.0 / s.dimension()));
    CHECK(d > previous - 1e-15);
    previous = d;
  }
}

TEST_CASE("property: thermal discord matches the direct matrix-element oracle") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lr(std::log(0.05), std::log(20.0));
  for (int trial = 0; trial < 15; ++trial) {
    const int L = static_cast<int>(rng() % 3), P = static_cast<int>(rng() % 3);
    const SpiralSpectrum s = build_spectrum(source_geometry(1e-3, 1e-3 * std::exp(lr(rng))), L, P);
    const double want = oracle::thermal_discord(s.amplitudes(), partner_index(s.truncation()));
    CHECK(std::abs(geometric_discord_thermal(s) - want) <= 1e-9 * want + 1e-15);
    const ThermalState st = assemble_density(s);
    CHECK(std::abs(discord_objective(st.normalized(), Eigen::MatrixXcd::Identity(st.d, st.d)) - want) <= 1e-9 * want + 1e-15);
  }
}

TEST_CASE("property: full-lattice discord equals the limit") {
  for (double ratio : {0.5, 1.0, std::sqrt(2.0), 2.0, 5.0}) {
    const SourceGeometry g = source_geometry(1e-3, ratio * 1e-3);
    const double t = g.t;
    const double closed = t * t * std::pow(1 - t, 4) / std::pow(1 + t * t, 4);
    CHECK(std::abs(discord_limit(g) - closed) < 1e-12);
    CHECK(std::abs(geometric_discord_thermal(build_spectrum(g, 200, 200)) - closed) < 1e-12);
  }
}

TEST_CASE("brute-force discord") {
  BruteForceOptions opts;
  Eigen::MatrixXcd product = Eigen::MatrixXcd::Zero(4, 4);
  product(0, 0) = 1.0;
  CHECK(std::abs(brute_force_discord(product, 2, opts)) < 1e-9);

  Eigen::MatrixXcd bell = Eigen::MatrixXcd::Zero(4, 4);
  bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
  CHECK(brute_force_discord(bell, 2, opts) == doctest::Approx(0.5).epsilon(1e-4).scale(1.0));

  const ThermalState s = assemble_density(SpiralSpectrum::flat(ModeTruncation(0, 1)));
  CHECK(std::abs(brute_force_discord(s.normalized(), 2, opts) - 1.0 / 18.0) < 1e-4);

  Eigen::MatrixXcd bad = bell;
  bad(0, 0) = 0.7;
  CHECK_THROWS_AS(brute_force_discord(bad, 2, opts), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_discord(bell, 3, opts), std::invalid_argument);
}

TEST_CASE("property: brute force is an upper bound that reaches the closed form") {
  BruteForceOptions opts;
  opts.seed = 17;
  for (double ratio : {0.3, 1.0, 3.0}) {
    const SpiralSpectrum s = build_spectrum(source_geometry(1e-3, ratio * 1e-3), 0, 3);
    const ThermalState st = assemble_density(s);
    const double closed = geometric_discord_thermal(s);
    const double found = brute_force_discord(st.normalized(), st.d, opts);
    CHECK(found >= closed - 1e-9);
    CHECK(found - closed < 1e-3);
  }
}

TEST_CASE("brute force is deterministic for a fixed seed") {
  BruteForceOptions opts;
  opts.seed = 99;
  const ThermalState st = assemble_density(build_spectrum(source_geometry(1e-3, 3e-4), 0, 2));
  CHECK(brute_force_discord(st.normalized(), st.d, opts) == brute_force_discord(st.normalized(), st.d, opts));
}

TEST_CASE("discord curve rows") {
  const auto rows = discord_curve(1e-3, {5e-4, 1e-3, std::sqrt(2.0) * 1e-3}, {{1, 1}, {2, 0}});
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].l_max == 1);
  CHECK(rows[1].l_max == 2);
  CHECK(rows[4].sigma_g_over_sigma_s == doctest::Approx(std::sqrt(2.0)));
  CHECK(rows[4].d_inf == doctest::Approx(1.0 / 64.0));
  CHECK(rows[4].d == 6);
  CHECK_THROWS_AS(discord_curve(1e-3, {}, {{1, 1}}), std::invalid_argument);
}
