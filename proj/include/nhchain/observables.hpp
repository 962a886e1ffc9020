#pragma once

// Localization diagnostics computed from eigenstates.  States are treated
// as probability distributions p_i = |psi_i|^2 after 2-norm normalization;
// site positions are 1..N.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "nhchain/eigensolver.hpp"

namespace nhchain {

// sum_i |psi_i|^4 for the normalized state: 1 for a single-site state,
// 1/N for a uniform one.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real ipr(
    const Eigen::MatrixBase<Derived>& state) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const Real nrm2 = state.squaredNorm();
  if (nrm2 == Real(0)) throw std::domain_error("ipr of a zero vector");
  return state.cwiseAbs2().squaredNorm() / (nrm2 * nrm2);
}

// mean IPR over the whole spectrum, accumulated in eigenvalue-sorted order
template <typename Real>
Real mipr(const Spectrum<Real>& spectrum) {
  Real acc = Real(0);
  for (Eigen::Index k = 0; k < spectrum.size(); ++k)
    acc += ipr(spectrum.right_vectors.col(k));
  return acc / static_cast<Real>(spectrum.size());
}

// r = |<y|x>| / (||y|| ||x||); 1 in the Hermitian limit, -> 0 approaching
// an exceptional point.
template <typename DerivedL, typename DerivedR>
typename Eigen::NumTraits<typename DerivedL::Scalar>::Real phase_rigidity(
    const Eigen::MatrixBase<DerivedL>& left, const Eigen::MatrixBase<DerivedR>& right) {
  using Real = typename Eigen::NumTraits<typename DerivedL::Scalar>::Real;
  const Real ln = left.norm(), rn = right.norm();
  if (ln == Real(0) || rn == Real(0))
    throw std::domain_error("phase rigidity of a zero vector");
  return std::abs(left.dot(right)) / (ln * rn);
}

template <typename Real>
Real phase_rigidity(const Spectrum<Real>& spectrum, Eigen::Index k) {
  return phase_rigidity(spectrum.left_vectors.col(k), spectrum.right_vectors.col(k));
}

// |sum_i s_i |psi_i|^2| with s_i = +1 on A sites, -1 on B sites.  0 means
// equal weight on both sublattices, 1 full polarization.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real sigma_z_abs(
    const Eigen::MatrixBase<Derived>& state, const Eigen::VectorXi& signs) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (state.size() != signs.size())
    throw std::invalid_argument("state and sublattice sign vector differ in length");
  const Real nrm2 = state.squaredNorm();
  if (nrm2 == Real(0)) throw std::domain_error("sigma_z of a zero vector");
  const Real acc = (state.cwiseAbs2().array() * signs.cast<Real>().array()).sum();
  return std::abs(acc) / nrm2;
}

// root-mean-square spread sqrt(<x^2> - <x>^2) over positions x = 1..N
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real localization_length(
    const Eigen::MatrixBase<Derived>& state) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const Real nrm2 = state.squaredNorm();
  if (nrm2 == Real(0)) throw std::domain_error("localization length of a zero vector");
  Real m1 = Real(0), m2 = Real(0);
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const Real p = std::norm(state[i]) / nrm2;
    const Real pos = static_cast<Real>(i + 1);
    m1 += pos * p;
    m2 += pos * pos * p;
  }
  return std::sqrt(std::max(Real(0), m2 - m1 * m1));
}

struct ScalingFit {
  std::vector<Eigen::Index> sizes;
  std::vector<double> iprs;
  double d2 = 0.0;            // -slope of log(IPR) vs log(N)
  double fit_residual = 0.0;  // RMS residual of the fit in log space
};

// Unweighted least squares of log(IPR) against log(N).  Needs at least 4
// strictly increasing sizes with positive IPRs.
inline ScalingFit fractal_dimension(const std::vector<Eigen::Index>& sizes,
                                    const std::vector<double>& iprs) {
  if (sizes.size() != iprs.size())
    throw std::invalid_argument("fractal_dimension: sizes and iprs differ in length");
  if (sizes.size() < 4)
    throw std::invalid_argument("fractal_dimension needs at least 4 sizes");
  const std::size_t m = sizes.size();
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0 && sizes[i] <= sizes[i - 1])
      throw std::invalid_argument("fractal_dimension sizes must strictly increase");
    if (!(iprs[i] > 0.0)) throw std::invalid_argument("fractal_dimension needs IPR > 0");
    lx[i] = std::log(static_cast<double>(sizes[i]));
    ly[i] = std::log(iprs[i]);
  }
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    xbar += lx[i];
    ybar += ly[i];
  }
  xbar /= static_cast<double>(m);
  ybar /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - xbar) * (lx[i] - xbar);
    sxy += (lx[i] - xbar) * (ly[i] - ybar);
  }
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = ly[i] - (ybar + slope * (lx[i] - xbar));
    ss += e * e;
  }
  ScalingFit fit;
  fit.sizes = sizes;
  fit.iprs = iprs;
  fit.d2 = -slope;
  fit.fit_residual = std::sqrt(ss / static_cast<double>(m));
  return fit;
}

// per-state summary used by the spectrum/complex-plane outputs
struct ObservableRecord {
  Eigen::Index state_index = 0;
  std::complex<double> eigenvalue;
  double ipr = 0.0;
  double rigidity = 0.0;
  double sigma_z = std::numeric_limits<double>::quiet_NaN();  // NaN: no sublattice
  double loc_length = 0.0;
  bool ep_flag = false;
};

template <typename Real>
std::vector<ObservableRecord> observable_records(
    const Spectrum<Real>& spectrum, const std::optional<Eigen::VectorXi>& signs) {
  std::vector<ObservableRecord> records;
  records.reserve(static_cast<std::size_t>(spectrum.size()));
  for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
    const auto psi = spectrum.right_vectors.col(k);
    ObservableRecord rec;
    rec.state_index = k;
    rec.eigenvalue = spectrum.eigenvalues[k];
    rec.ipr = ipr(psi);
    rec.rigidity = phase_rigidity(spectrum.left_vectors.col(k), psi);
    if (signs) rec.sigma_z = sigma_z_abs(psi, *signs);
    rec.loc_length = localization_length(psi);
    rec.ep_flag = spectrum.ep_flags[k];
    records.push_back(rec);
  }
  return records;
}

enum class ExtremeMode { MaxIpr, MinIpr };

// index of the spectrally sorted state with the largest (smallest) IPR;
// ties resolve to the lowest index, keeping selection deterministic
template <typename Real>
Eigen::Index select_extreme_state(const Spectrum<Real>& spectrum, ExtremeMode mode) {
  Eigen::Index best = 0;
  Real best_val = ipr(spectrum.right_vectors.col(0));
  for (Eigen::Index k = 1; k < spectrum.size(); ++k) {
    const Real val = ipr(spectrum.right_vectors.col(k));
    const bool better = (mode == ExtremeMode::MaxIpr) ? (val > best_val) : (val < best_val);
    if (better) {
      best = k;
      best_val = val;
    }
  }
  return best;
}

}  // namespace nhchain
