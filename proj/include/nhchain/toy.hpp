#pragma once

// Two-band Bloch model of the alternating chain: a 2x2 matrix per crystal
// momentum k, with the same non-reciprocal-phase hopping t = T e^{i theta}
// in both off-diagonal slots.  Everything here has a closed form, which
// makes the model the exact oracle for the dense machinery.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "nhchain/eigensolver.hpp"
#include "nhchain/hamiltonian.hpp"

namespace nhchain {

struct ToyParams {
  double v_a = -1.0;  // A-site potential
  double v_b = 1.0;   // B-site potential, v_b > v_a
  Hopping hopping{};
  double spacing_a = 1.0;  // unit cell length

  double delta_v() const { return v_b - v_a; }
};

namespace detail {

inline void validate(const ToyParams& p) {
  require(std::isfinite(p.v_a) && std::isfinite(p.v_b), "toy potentials must be finite");
  require(p.v_b > p.v_a, "toy model needs v_b > v_a (positive detuning)");
  require(p.spacing_a > 0.0 && std::isfinite(p.spacing_a), "unit cell spacing must be > 0");
}

}  // namespace detail

// [[V_A, t (1 + e^{-ika})], [t (1 + e^{+ika}), V_B]]
inline Eigen::Matrix2cd bloch_matrix(const ToyParams& p, double k) {
  detail::validate(p);
  const std::complex<double> t = p.hopping.amplitude();
  const std::complex<double> phase(std::cos(k * p.spacing_a), std::sin(k * p.spacing_a));
  Eigen::Matrix2cd m;
  m << std::complex<double>(p.v_a), t * (1.0 + std::conj(phase)),
      t * (1.0 + phase), std::complex<double>(p.v_b);
  return m;
}

// E_% = (V_A + V_B)/2 -+ sqrt(dV^2 + 16 t^2 cos^2(ka/2)) / 2, returned as
// (lower branch, upper branch); complex t^2 drives the square root complex.
inline std::pair<std::complex<double>, std::complex<double>> closed_energies(
    const ToyParams& p, double k) {
  detail::validate(p);
  const std::complex<double> t = p.hopping.amplitude();
  const double c = std::cos(0.5 * k * p.spacing_a);
  const std::complex<double> disc =
      p.delta_v() * p.delta_v() + 16.0 * t * t * c * c;
  const std::complex<double> sq = std::sqrt(disc);
  const double mean = 0.5 * (p.v_a + p.v_b);
  return {mean - 0.5 * sq, mean + 0.5 * sq};
}

struct ToyEigvec {
  Eigen::Vector2cd vec;  // unit norm
  bool at_ep = false;    // both branches collapsed onto one direction
};

// Unnormalized closed form (2 t (1 + e^{-ika}), dV +- sqrt(disc)); branch
// -1 is the lower-energy root, +1 the upper.  At the branch-point zeros of
// the discriminant both choices coincide and at_ep is set.
inline ToyEigvec closed_eigvec(const ToyParams& p, double k, int branch) {
  detail::validate(p);
  detail::require(branch == 1 || branch == -1, "branch must be +1 or -1");
  const std::complex<double> t = p.hopping.amplitude();
  const double c = std::cos(0.5 * k * p.spacing_a);
  const std::complex<double> phase(std::cos(k * p.spacing_a), std::sin(k * p.spacing_a));
  const std::complex<double> disc =
      p.delta_v() * p.delta_v() + 16.0 * t * t * c * c;
  const std::complex<double> sq = std::sqrt(disc);

  ToyEigvec out;
  const double scale = p.delta_v() + 4.0 * p.hopping.magnitude;
  out.at_ep = std::abs(sq) <= 1e-6 * scale;
  Eigen::Vector2cd v;
  v << 2.0 * t * (1.0 + std::conj(phase)),
      std::complex<double>(p.delta_v()) + static_cast<double>(branch) * sq;
  const double nrm = v.norm();
  if (nrm == 0.0) throw std::domain_error("closed_eigvec degenerated to zero");
  out.vec = v / nrm;
  return out;
}

// T_c(k) = dV / (4 cos(ka/2)); at the zone edge cos vanishes and the
// sentinel +infinity means "no finite critical hopping".
inline double critical_hopping(const ToyParams& p, double k) {
  detail::validate(p);
  const double c = std::cos(0.5 * k * p.spacing_a);
  if (std::abs(c) <= 1e-12) return std::numeric_limits<double>::infinity();
  return p.delta_v() / (4.0 * c);
}

enum class Region { Blue, Yellow, Boundary };  // T > T_c, T < T_c, on the line

struct ToyGridRow {
  double k = 0.0;
  double t = 0.0;
  int branch = 0;  // -1 lower, +1 upper (by closed-form pairing)
  std::complex<double> energy;         // numeric (dense solver)
  std::complex<double> energy_closed;  // closed form
  double sigma_z = 0.0;
  double rigidity = 0.0;
  Region region = Region::Boundary;
};

// Dense-solver sweep of the (k, T) plane at fixed phase, paired row by row
// with the closed forms.  Row order: k outer, T inner, branch -1 then +1.
inline std::vector<ToyGridRow> order_parameter_grid(const ToyParams& base,
                                                    const std::vector<double>& k_values,
                                                    const std::vector<double>& t_values) {
  detail::validate(base);
  std::vector<ToyGridRow> rows;
  rows.reserve(k_values.size() * t_values.size() * 2);
  for (const double k : k_values) {
    for (const double t_mag : t_values) {
      ToyParams p = base;
      p.hopping = Hopping(t_mag, base.hopping.theta);
      const auto sp = eig(bloch_matrix(p, k));
      const auto closed = closed_energies(p, k);

      // pair numeric states to branches by total eigenvalue distance
      const double straight = std::abs(sp.eigenvalues[0] - closed.first) +
                              std::abs(sp.eigenvalues[1] - closed.second);
      const double crossed = std::abs(sp.eigenvalues[0] - closed.second) +
                             std::abs(sp.eigenvalues[1] - closed.first);
      const Eigen::Index lower = (straight <= crossed) ? 0 : 1;

      const double tc = critical_hopping(p, k);
      Region region = Region::Boundary;
      if (t_mag > tc * (1.0 + 1e-12)) {
        region = Region::Blue;
      } else if (t_mag < tc * (1.0 - 1e-12)) {
        region = Region::Yellow;
      }

      for (const int branch : {-1, 1}) {
        const Eigen::Index idx = (branch == -1) ? lower : 1 - lower;
        ToyGridRow row;
        row.k = k;
        row.t = t_mag;
        row.branch = branch;
        row.energy = sp.eigenvalues[idx];
        row.energy_closed = (branch == -1) ? closed.first : closed.second;
        const auto psi = sp.right_vectors.col(idx);
        row.sigma_z = std::abs(std::norm(psi[0]) - std::norm(psi[1]));
        row.rigidity = std::abs(sp.left_vectors.col(idx).dot(psi));
        row.region = region;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace nhchain
