#include <cmath>
#include <complex>

#include <doctest.h>

#include "nhchain/hamiltonian.hpp"
#include "nhchain/observables.hpp"

using namespace nhchain;
using Complex = std::complex<double>;

TEST_CASE("ipr of reference states") {
  Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(10);
  delta[3] = Complex(1.0, 0.0);
  CHECK(ipr(delta) == 1.0);

  const Eigen::VectorXcd uniform = Eigen::VectorXcd::Constant(16, Complex(0.25, 0.0));
  CHECK(ipr(uniform) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));

  Eigen::VectorXcd two = Eigen::VectorXcd::Zero(8);
  two[0] = Complex(1.0, 0.0);
  two[5] = Complex(0.0, 1.0);  // phases are irrelevant
  CHECK(ipr(two) == doctest::Approx(0.5).epsilon(1e-14));

  // normalization is internal
  CHECK(ipr((two * Complex(3.0, -2.0)).eval()) == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(ipr(Eigen::VectorXcd::Zero(4)), std::domain_error);
}

TEST_CASE("mipr of the degenerate free ring") {
  // V = 0, theta = 0, periodic, odd N: plane-wave pairs; any real basis of
  // each two-dimensional eigenspace gives MIPR = (3N - 1) / (2 N^2)
  const Eigen::Index n = 101;
  ChainSpec ring{AlternatingParams{0.0, 0.0}, n, Boundary::Periodic};
  const auto sp = eig(build_hamiltonian(ring, Hopping(1.0, 0.0)).entries);
  const double analytic =
      (3.0 * static_cast<double>(n) - 1.0) / (2.0 * static_cast<double>(n * n));
  CHECK(mipr(sp) == doctest::Approx(analytic).epsilon(1e-12));
}

TEST_CASE("phase rigidity identities") {
  // Hermitian: left = right, rigidity 1
  Eigen::VectorXcd v(3);
  v << Complex(0.5, 0.5), Complex(-0.3, 0.1), Complex(0.0, 0.7);
  CHECK(phase_rigidity(v, v) == doctest::Approx(1.0).epsilon(1e-14));

  // normalization-independent
  CHECK(phase_rigidity((2.0 * v).eval(), (v * Complex(0.0, 3.0)).eval()) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // exceptional-point vector (i, 1)/sqrt(2) under the complex-symmetric
  // pairing left = conj(right): rigidity = |sum psi^2| = 0
  Eigen::Vector2cd ep(Complex(0.0, 1.0) / std::sqrt(2.0), Complex(1.0, 0.0) / std::sqrt(2.0));
  CHECK(phase_rigidity(ep.conjugate(), ep) < 1e-15);

  CHECK_THROWS_AS(phase_rigidity(Eigen::Vector2cd::Zero().eval(), ep), std::domain_error);
}

TEST_CASE("rigidity on a complex-symmetric spectrum equals |sum psi^2|") {
  ChainSpec spec{FibonacciWordParams{8, 1.0, -1.0}, 34, Boundary::Open};
  const auto sp = eig(build_hamiltonian(spec, Hopping(2.0, 17.0 * M_PI / 36.0)).entries);
  REQUIRE(sp.complex_symmetric);
  for (Eigen::Index k = 0; k < sp.size(); ++k) {
    const auto psi = sp.right_vectors.col(k);
    const double direct = std::abs((psi.transpose() * psi).value());
    CHECK(phase_rigidity(sp, k) == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("sublattice polarization") {
  Eigen::VectorXi signs(2);
  signs << 1, -1;

  Eigen::Vector2cd a_site(Complex(1.0, 0.0), Complex(0.0, 0.0));
  CHECK(sigma_z_abs(a_site, signs) == 1.0);

  Eigen::Vector2cd even(Complex(1.0, 0.0), Complex(0.0, 1.0));
  CHECK(sigma_z_abs(even, signs) == doctest::Approx(0.0).epsilon(1e-15));

  Eigen::Vector2cd tilted(Complex(std::sqrt(0.75), 0.0), Complex(0.5, 0.0));
  CHECK(sigma_z_abs(tilted, signs) == doctest::Approx(0.5).epsilon(1e-14));

  Eigen::VectorXi wrong(3);
  wrong << 1, -1, 1;
  CHECK_THROWS_AS(sigma_z_abs(even, wrong), std::invalid_argument);
  CHECK_THROWS_AS(sigma_z_abs(Eigen::Vector2cd::Zero().eval(), signs), std::domain_error);
}

TEST_CASE("localization length of reference profiles") {
  Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(11);
  delta[4] = Complex(1.0, 0.0);
  CHECK(localization_length(delta) == 0.0);

  // uniform state over N sites: variance of the uniform distribution on
  // {1..N} is (N^2 - 1)/12
  const Eigen::Index n = 32;
  const Eigen::VectorXcd uniform =
      Eigen::VectorXcd::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
  CHECK(localization_length(uniform) ==
        doctest::Approx(std::sqrt((static_cast<double>(n * n) - 1.0) / 12.0)).epsilon(1e-13));

  // reflection and global phase leave the spread unchanged
  Eigen::VectorXcd prof(6);
  prof << Complex(0.1, 0.2), Complex(0.5, 0.0), Complex(0.2, -0.4), Complex(0.05, 0.0),
      Complex(0.0, 0.3), Complex(0.15, -0.1);
  const double xi = localization_length(prof);
  CHECK(localization_length(prof.reverse().eval()) == doctest::Approx(xi).epsilon(1e-13));
  CHECK(localization_length((prof * std::polar(1.0, 1.1)).eval()) ==
        doctest::Approx(xi).epsilon(1e-13));

  CHECK_THROWS_AS(localization_length(Eigen::VectorXcd::Zero(4)), std::domain_error);
}

TEST_CASE("scaling fit recovers a synthetic power law") {
  const std::vector<Eigen::Index> sizes = {89, 144, 233, 377, 610, 987};
  std::vector<double> iprs;
  for (const auto n : sizes)
    iprs.push_back(0.7 * std::pow(static_cast<double>(n), -0.37));
  const auto fit = fractal_dimension(sizes, iprs);
  CHECK(fit.d2 == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(fit.fit_residual < 1e-12);
  CHECK(fit.sizes == sizes);

  // exactly localized: IPR independent of N -> D2 = 0
  const auto flat = fractal_dimension(sizes, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
  CHECK(flat.d2 == doctest::Approx(0.0).epsilon(1e-14));

  CHECK_THROWS_AS(fractal_dimension({89, 144, 233}, {1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fractal_dimension({89, 89, 144, 233}, {1.0, 1.0, 1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fractal_dimension(sizes, {1.0, 1.0, 1.0, 1.0, 1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fractal_dimension(sizes, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("observable records carry the per-state diagnostics") {
  ChainSpec spec{FibonacciWordParams{6, 1.0, -1.0}, 13, Boundary::Open};
  const auto sp = eig(build_hamiltonian(spec, Hopping(1.0, 0.3)).entries);
  const auto recs = observable_records(sp, sublattice_signs(spec));
  REQUIRE(recs.size() == 13);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    CHECK(recs[k].state_index == static_cast<Eigen::Index>(k));
    CHECK(recs[k].eigenvalue == sp.eigenvalues[static_cast<Eigen::Index>(k)]);
    CHECK(recs[k].ipr > 0.0);
    CHECK(recs[k].rigidity > 0.0);
    CHECK(std::isfinite(recs[k].sigma_z));
    CHECK(recs[k].loc_length >= 0.0);
  }

  // no sublattice structure: sigma_z stays NaN
  const auto bare = observable_records(sp, std::nullopt);
  CHECK(std::isnan(bare[0].sigma_z));
}

TEST_CASE("extreme state selection is deterministic and pinned") {
  // localized regime regression: substitution chain N = 89, T = 13, theta 0
  ChainSpec spec{FibonacciWordParams{10, 1.0, -1.0}, 89, Boundary::Open};
  const auto sp = eig(build_hamiltonian(spec, Hopping(13.0, 0.0)).entries);

  const auto kmin = select_extreme_state(sp, ExtremeMode::MinIpr);
  const auto kmax = select_extreme_state(sp, ExtremeMode::MaxIpr);
  CHECK(kmin == 88);
  CHECK(kmax == 55);
  CHECK(ipr(sp.right_vectors.col(kmin)) == doctest::Approx(0.01641335110010949).epsilon(1e-10));
  CHECK(ipr(sp.right_vectors.col(kmax)) ==
        doctest::Approx(0.035737028212949842).epsilon(1e-10));

  // selection consistency: nothing beats the extremes
  for (Eigen::Index k = 0; k < sp.size(); ++k) {
    CHECK(ipr(sp.right_vectors.col(k)) >= ipr(sp.right_vectors.col(kmin)));
    CHECK(ipr(sp.right_vectors.col(k)) <= ipr(sp.right_vectors.col(kmax)));
  }
}
