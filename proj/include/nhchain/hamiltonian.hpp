#pragma once

// Dense chain Hamiltonians: real on-site terms on the diagonal and one
// shared complex hopping t = T e^{i theta} on BOTH nearest-neighbour
// off-diagonals.  The matrix is therefore complex symmetric (H^T = H),
// not Hermitian; theta != 0 mod pi makes the spectrum genuinely complex.

#include <complex>
#include <iostream>
#include <stdexcept>

#include <Eigen/Core>

#include "nhchain/lattice.hpp"

namespace nhchain {

struct Hopping {
  double magnitude = 1.0;  // T >= 0
  double theta = 0.0;      // phase, stored wrapped into [0, 2 pi)

  Hopping() = default;
  Hopping(double t_magnitude, double phase) : magnitude(t_magnitude), theta(phase) {
    detail::require(std::isfinite(magnitude) && magnitude >= 0.0,
                    "hopping magnitude must be finite and >= 0");
    detail::require(std::isfinite(theta), "hopping phase must be finite");
    if (theta < 0.0 || theta >= 2.0 * M_PI) {
      theta = std::fmod(theta, 2.0 * M_PI);
      if (theta < 0.0) theta += 2.0 * M_PI;
    }
  }

  std::complex<double> amplitude() const { return std::polar(magnitude, theta); }
};

struct Hamiltonian {
  Eigen::MatrixXcd entries;
  Boundary boundary = Boundary::Open;

  Eigen::Index dim() const { return entries.rows(); }
};

inline Hamiltonian build_hamiltonian(const ChainSpec& spec, const Hopping& hopping) {
  const Eigen::VectorXd v = potentials(spec);
  const Eigen::Index n = spec.n_sites;
  const std::complex<double> t = hopping.amplitude();

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  h.diagonal() = v.cast<std::complex<double>>();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    // one stored value for both slots keeps H^T = H exact to the bit
    h(i, i + 1) = t;
    h(i + 1, i) = t;
  }
  if (spec.boundary == Boundary::Periodic) {
    h(0, n - 1) = t;
    h(n - 1, 0) = t;
  }
  return Hamiltonian{std::move(h), spec.boundary};
}

// Matrix dump as CSV with interleaved re/im pairs:
// re00,im00,re01,im01,...  One matrix row per line, 17 significant digits.
inline void write_matrix_csv(const Eigen::MatrixXcd& m, std::ostream& out) {
  char buf[64];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", m(r, c).real(), m(r, c).imag());
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace nhchain
