#pragma once

// Dense complex (non-Hermitian) eigensolver.  Pipeline:
//
//   1. diagonal balancing with powers of 2 (exact similarity, optional),
//   2. Householder reduction to upper Hessenberg form,
//   3. implicit single-shift QR with Wilkinson shifts, deflation test
//      |T(k+1,k)| <= eps * (|T(k,k)| + |T(k+1,k+1)|), an exceptional shift
//      every 10 stalled sweeps, and a hard budget of 40 sweeps per
//      eigenvalue (exceeded -> SolverError naming the stuck slot),
//   4. back-substitution on the triangular factor for right and left
//      eigenvectors, back-transformed through the accumulated unitary,
//   5. residual certification of every returned pair against the input
//      matrix (failure -> SolverError).
//
// Chain Hamiltonians are complex symmetric (H^T = H); for bitwise-symmetric
// input the left eigenvectors are the conjugated right ones, which this
// solver detects and exploits.  left_vectors_generic() recomputes left
// vectors the slow way (eigenvectors of H^H) as an independent cross-check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Householder>
#include <Eigen/Jacobi>

#include "nhchain/errors.hpp"

namespace nhchain {

struct EigOptions {
  bool balance = true;
  double residual_tolerance = 1e-8;  // relative to ||H||_F
  int sweeps_per_eigenvalue = 40;    // QR budget: this many sweeps times N in total
};

template <typename Real>
struct Spectrum {
  using Complex = std::complex<Real>;
  using MatrixC = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorC = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
  using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  VectorC eigenvalues;    // sorted by (Re, Im) ascending
  MatrixC right_vectors;  // unit columns, H x = lambda x
  MatrixC left_vectors;   // unit columns, y^H H = lambda y^H
  VectorR right_residuals;
  VectorR left_residuals;
  Eigen::Array<bool, Eigen::Dynamic, 1> ep_flags;  // near-degenerate pair with
                                                   // near-parallel right vectors
  Real matrix_norm = Real(0);                      // Frobenius norm of the input
  bool complex_symmetric = false;
  int qr_sweeps = 0;

  Eigen::Index size() const { return eigenvalues.size(); }
};

namespace detail {

// Parlett-Reinsch balancing restricted to powers of 2, so the similarity
// D^-1 A D is exact.  d holds the diagonal of D.
template <typename MatrixC, typename VectorR>
void balance_in_place(MatrixC& a, VectorR& d) {
  using Real = typename VectorR::Scalar;
  const Eigen::Index n = a.rows();
  d.setOnes(n);
  if (n < 2) return;
  const Real radix = Real(2);
  const auto abs1 = [](const typename MatrixC::Scalar& z) {
    return std::abs(z.real()) + std::abs(z.imag());
  };
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      Real c = Real(0), r = Real(0);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += abs1(a(j, i));
        r += abs1(a(i, j));
      }
      if (c == Real(0) || r == Real(0)) continue;
      const Real s = c + r;
      Real f = Real(1);
      while (c < r / radix) {
        c *= radix;
        r /= radix;
        f *= radix;
      }
      while (c >= r * radix) {
        c /= radix;
        r *= radix;
        f /= radix;
      }
      if (c + r < Real(0.95) * s) {
        converged = false;
        d[i] *= f;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

// Householder similarity A -> Q^H A Q with A = Q H Q^H, H upper Hessenberg.
template <typename MatrixC>
void hessenberg_in_place(MatrixC& h, MatrixC& q) {
  using Complex = typename MatrixC::Scalar;
  using Real = typename Eigen::NumTraits<Complex>::Real;
  const Eigen::Index n = h.rows();
  q.setIdentity(n, n);
  if (n < 3) return;
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> temp(n);
  for (Eigen::Index k = 0; k < n - 2; ++k) {
    const Eigen::Index rem = n - k - 1;
    Complex tau;
    Real beta;
    h.col(k).tail(rem).makeHouseholderInPlace(tau, beta);
    h.coeffRef(k + 1, k) = Complex(beta);
    h.bottomRightCorner(rem, n - k - 1)
        .applyHouseholderOnTheLeft(h.col(k).tail(rem - 1), tau, temp.data());
    h.rightCols(rem).applyHouseholderOnTheRight(h.col(k).tail(rem - 1), std::conj(tau),
                                                temp.data());
    q.rightCols(rem).applyHouseholderOnTheRight(h.col(k).tail(rem - 1), std::conj(tau),
                                                temp.data());
    h.col(k).tail(rem - 1).setZero();
  }
}

// Root of z^2 - (a+d) z + (ad - bc) closer to d.
template <typename Complex>
Complex wilkinson_shift(const Complex& a, const Complex& b, const Complex& c,
                        const Complex& d) {
  using Real = typename Eigen::NumTraits<Complex>::Real;
  const Complex p = (a - d) * Real(0.5);
  const Complex disc = std::sqrt(p * p + b * c);
  const Complex m1 = d + p + disc;
  const Complex m2 = d + p - disc;
  return std::abs(m1 - d) <= std::abs(m2 - d) ? m1 : m2;
}

// Implicit single-shift QR on a Hessenberg matrix, accumulating the
// rotations into q.  On return t is upper triangular with the eigenvalues
// on its diagonal and (original) q satisfies q_in * t * q_in^H similarity.
template <typename MatrixC>
void schur_in_place(MatrixC& t, MatrixC& q, int max_total_sweeps, int& sweeps_used) {
  using Complex = typename MatrixC::Scalar;
  using Real = typename Eigen::NumTraits<Complex>::Real;
  const Eigen::Index n = t.rows();
  const Real eps = Eigen::NumTraits<Real>::epsilon();
  const Real fro = t.norm();
  Eigen::JacobiRotation<Complex> rot;
  int total = 0;
  int stalled = 0;
  Eigen::Index hi = n - 1;
  while (hi > 0) {
    Eigen::Index lo = hi;
    while (lo > 0) {
      const Real sub = std::abs(t(lo, lo - 1));
      Real thresh = eps * (std::abs(t(lo - 1, lo - 1)) + std::abs(t(lo, lo)));
      if (thresh == Real(0)) thresh = eps * fro;
      if (sub <= thresh) break;
      --lo;
    }
    if (lo > 0) t(lo, lo - 1) = Complex(0);
    if (lo == hi) {
      --hi;
      stalled = 0;
      continue;
    }
    if (total >= max_total_sweeps)
      throw SolverError("QR iteration spent its budget of " +
                            std::to_string(max_total_sweeps) +
                            " sweeps without converging eigenvalue slot " +
                            std::to_string(hi),
                        static_cast<std::int64_t>(hi));
    ++stalled;
    ++total;
    Complex shift;
    if (stalled % 10 == 0) {
      // stagnation escape: perturb away from the trailing entry
      shift = t(hi, hi) + Real(0.75) * std::abs(t(hi, hi - 1));
    } else {
      shift = wilkinson_shift(t(hi - 1, hi - 1), t(hi - 1, hi), t(hi, hi - 1), t(hi, hi));
    }

    rot.makeGivens(t(lo, lo) - shift, t(lo + 1, lo));
    t.rightCols(n - lo).applyOnTheLeft(lo, lo + 1, rot.adjoint());
    t.topRows(std::min(lo + 2, hi) + 1).applyOnTheRight(lo, lo + 1, rot);
    q.applyOnTheRight(lo, lo + 1, rot);
    for (Eigen::Index m = lo + 1; m < hi; ++m) {
      Complex r;
      rot.makeGivens(t(m, m - 1), t(m + 1, m - 1), &r);
      t(m, m - 1) = r;
      t(m + 1, m - 1) = Complex(0);
      t.rightCols(n - m).applyOnTheLeft(m, m + 1, rot.adjoint());
      t.topRows(std::min(m + 2, hi) + 1).applyOnTheRight(m, m + 1, rot);
      q.applyOnTheRight(m, m + 1, rot);
    }
  }
  sweeps_used = total;
}

// Right eigenvectors of an upper triangular matrix: for eigenvalue slot k,
// x[k] = 1 and x[j] = -(sum_{m=j+1..k} t(j,m) x[m]) / (t(j,j) - lambda_k)
// going up.  Near-singular pivots fall back to a solve with the eigenvalue
// nudged by 1e-10 * max|T| and pivots floored, like LAPACK's ztrevc.
template <typename MatrixC, typename VectorC>
MatrixC triangular_right_vectors(const MatrixC& t, const VectorC& lambdas) {
  using Complex = typename MatrixC::Scalar;
  using Real = typename Eigen::NumTraits<Complex>::Real;
  const Eigen::Index n = t.rows();
  const Real eps = Eigen::NumTraits<Real>::epsilon();
  const Real smlnum =
      std::numeric_limits<Real>::min() * static_cast<Real>(std::max<Eigen::Index>(n, 1)) / eps;
  const Real tnorm = t.cwiseAbs().maxCoeff();
  const Real huge_val = Real(1e250);
  MatrixC x = MatrixC::Zero(n, n);
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> work(n);

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex lam = lambdas[k];
    const Real smin = std::max(eps * std::abs(lam), smlnum);

    const auto solve = [&](const Complex& mu, bool floor_pivots) -> bool {
      work[k] = Complex(1);
      for (Eigen::Index j = k - 1; j >= 0; --j) {
        Complex s(0);
        for (Eigen::Index m = j + 1; m <= k; ++m) s += t(j, m) * work[m];
        Complex diag = t(j, j) - mu;
        if (std::abs(diag) < smin) {
          if (!floor_pivots) return false;
          diag = (diag == Complex(0)) ? Complex(smin)
                                      : diag * (smin / std::abs(diag));
        }
        work[j] = -s / diag;
        const Real aw = std::abs(work[j]);
        if (aw > huge_val) work.segment(j, k - j + 1) /= aw;
      }
      return true;
    };

    if (!solve(lam, false)) {
      // (near-)repeated diagonal entry: shift the eigenvalue a hair off the
      // spectrum so the back-substitution stays well defined
      const Real delta = Real(1e-10) * (tnorm > Real(0) ? tnorm : Real(1));
      solve(lam + Complex(delta), true);
    }
    const Real mx = work.head(k + 1).cwiseAbs().maxCoeff();
    x.col(k).head(k + 1) = work.head(k + 1) / mx;
  }
  return x;
}

// Left eigenvectors of an upper triangular matrix.  The row vector u with
// u[k] = 1 and u[j] = -(sum_{m=k..j-1} u[m] t(m,j)) / (t(j,j) - lambda_k)
// for j > k satisfies u T = lambda_k u; the returned column is conj(u), so
// w^H T = lambda_k w^H.
template <typename MatrixC, typename VectorC>
MatrixC triangular_left_vectors(const MatrixC& t, const VectorC& lambdas) {
  using Complex = typename MatrixC::Scalar;
  using Real = typename Eigen::NumTraits<Complex>::Real;
  const Eigen::Index n = t.rows();
  const Real eps = Eigen::NumTraits<Real>::epsilon();
  const Real smlnum =
      std::numeric_limits<Real>::min() * static_cast<Real>(std::max<Eigen::Index>(n, 1)) / eps;
  const Real tnorm = t.cwiseAbs().maxCoeff();
  const Real huge_val = Real(1e250);
  MatrixC w = MatrixC::Zero(n, n);
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> work(n);

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex lam = lambdas[k];
    const Real smin = std::max(eps * std::abs(lam), smlnum);

    const auto solve = [&](const Complex& mu, bool floor_pivots) -> bool {
      work[k] = Complex(1);
      for (Eigen::Index j = k + 1; j < n; ++j) {
        Complex s(0);
        for (Eigen::Index m = k; m < j; ++m) s += work[m] * t(m, j);
        Complex diag = t(j, j) - mu;
        if (std::abs(diag) < smin) {
          if (!floor_pivots) return false;
          diag = (diag == Complex(0)) ? Complex(smin)
                                      : diag * (smin / std::abs(diag));
        }
        work[j] = -s / diag;
        const Real aw = std::abs(work[j]);
        if (aw > huge_val) work.segment(k, j - k + 1) /= aw;
      }
      return true;
    };

    if (!solve(lam, false)) {
      const Real delta = Real(1e-10) * (tnorm > Real(0) ? tnorm : Real(1));
      solve(lam + Complex(delta), true);
    }
    const Real mx = work.tail(n - k).cwiseAbs().maxCoeff();
    w.col(k).tail(n - k) = work.tail(n - k).conjugate() / mx;
  }
  return w;
}

}  // namespace detail

template <typename Derived>
Spectrum<typename Eigen::NumTraits<typename Derived::Scalar>::Real> eig(
    const Eigen::MatrixBase<Derived>& matrix, const EigOptions& options = {}) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  using Complex = std::complex<Real>;
  using MatrixC = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  MatrixC a = matrix.template cast<Complex>();
  const Eigen::Index n = a.rows();
  if (n == 0 || a.cols() != n)
    throw std::invalid_argument("eig needs a square nonempty matrix");
  if (!a.allFinite()) throw std::invalid_argument("eig input has non-finite entries");

  Spectrum<Real> out;
  out.matrix_norm = a.norm();
  out.complex_symmetric = true;
  for (Eigen::Index j = 0; j < n && out.complex_symmetric; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i)
      if (a(i, j) != a(j, i)) {
        out.complex_symmetric = false;
        break;
      }

  if (n == 1) {
    out.eigenvalues.resize(1);
    out.eigenvalues[0] = a(0, 0);
    out.right_vectors = MatrixC::Ones(1, 1);
    out.left_vectors = MatrixC::Ones(1, 1);
    out.right_residuals = VectorR::Zero(1);
    out.left_residuals = VectorR::Zero(1);
    out.ep_flags.setConstant(1, false);
    return out;
  }

  MatrixC t = a;
  VectorR d = VectorR::Ones(n);
  if (options.balance) detail::balance_in_place(t, d);

  MatrixC q;
  detail::hessenberg_in_place(t, q);
  detail::schur_in_place(t, q, options.sweeps_per_eigenvalue * static_cast<int>(n),
                         out.qr_sweeps);
  if (!t.allFinite() || !q.allFinite())
    throw SolverError("QR iteration produced non-finite values");

  typename Spectrum<Real>::VectorC lambdas = t.diagonal();

  MatrixC right = q * detail::triangular_right_vectors(t, lambdas);
  if (options.balance) right = d.asDiagonal() * right;
  MatrixC left;
  if (out.complex_symmetric) {
    // H^T = H makes y = conj(x) a left eigenvector whenever x is a right one
    left = right.conjugate();
  } else {
    left = q * detail::triangular_left_vectors(t, lambdas);
    if (options.balance) left = d.cwiseInverse().asDiagonal() * left;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    right.col(k).normalize();
    left.col(k).normalize();
  }

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index(0));
  std::stable_sort(perm.begin(), perm.end(), [&](Eigen::Index i, Eigen::Index j) {
    if (lambdas[i].real() != lambdas[j].real())
      return lambdas[i].real() < lambdas[j].real();
    return lambdas[i].imag() < lambdas[j].imag();
  });
  out.eigenvalues.resize(n);
  out.right_vectors.resize(n, n);
  out.left_vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = lambdas[perm[static_cast<std::size_t>(k)]];
    out.right_vectors.col(k) = right.col(perm[static_cast<std::size_t>(k)]);
    out.left_vectors.col(k) = left.col(perm[static_cast<std::size_t>(k)]);
  }

  // certify every pair against the input matrix
  out.right_residuals.resize(n);
  out.left_residuals.resize(n);
  const MatrixC hx = a * out.right_vectors;
  for (Eigen::Index k = 0; k < n; ++k)
    out.right_residuals[k] =
        (hx.col(k) - out.eigenvalues[k] * out.right_vectors.col(k)).norm();
  if (out.complex_symmetric) {
    // with left = conj(right), ||H^H y - conj(lambda) y|| = ||conj(H x - lambda x)||
    out.left_residuals = out.right_residuals;
  } else {
    const MatrixC hy = a.adjoint() * out.left_vectors;
    for (Eigen::Index k = 0; k < n; ++k)
      out.left_residuals[k] =
          (hy.col(k) - std::conj(out.eigenvalues[k]) * out.left_vectors.col(k)).norm();
  }
  const Real tol = static_cast<Real>(options.residual_tolerance) * out.matrix_norm;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(out.right_residuals[k] <= tol) || !(out.left_residuals[k] <= tol)) {
      const Real worst = std::max(out.right_residuals[k], out.left_residuals[k]);
      throw SolverError("eigenpair " + std::to_string(k) + " failed certification: residual " +
                            std::to_string(worst) + " > " + std::to_string(tol),
                        static_cast<std::int64_t>(k));
    }
  }

  // flag eigenvalue clusters whose right vectors have collapsed onto each
  // other (exceptional-point candidates)
  out.ep_flags.setConstant(n, false);
  const Real ep_tol = Real(1e-6) * (out.matrix_norm > Real(0) ? out.matrix_norm : Real(1));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      if (out.eigenvalues[k].real() - out.eigenvalues[j].real() > ep_tol) break;
      if (std::abs(out.eigenvalues[k] - out.eigenvalues[j]) >= ep_tol) continue;
      const Real overlap =
          std::abs(out.right_vectors.col(j).dot(out.right_vectors.col(k)));
      if (overlap > Real(0.99)) {
        out.ep_flags[j] = true;
        out.ep_flags[k] = true;
      }
    }
  }
  return out;
}

template <typename MatDerived, typename VecDerived>
typename Eigen::NumTraits<typename MatDerived::Scalar>::Real residual(
    const Eigen::MatrixBase<MatDerived>& matrix,
    const std::complex<typename Eigen::NumTraits<typename MatDerived::Scalar>::Real>& lambda,
    const Eigen::MatrixBase<VecDerived>& v) {
  using Real = typename Eigen::NumTraits<typename MatDerived::Scalar>::Real;
  using Complex = std::complex<Real>;
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> x = v.template cast<Complex>();
  const Real nrm = x.norm();
  if (nrm == Real(0)) throw std::invalid_argument("residual of a zero vector");
  return (matrix.template cast<Complex>() * x - lambda * x).norm() / nrm;
}

template <typename Real>
struct LeftVectorSet {
  typename Spectrum<Real>::MatrixC vectors;
  Eigen::Array<bool, Eigen::Dynamic, 1> ambiguous;  // matching fell inside a cluster
};

// Independent route to the left eigenvectors: diagonalize H^H and match its
// eigenvalues mu_j to conj(lambda_k).  Matching inside a degenerate cluster
// is flagged, not treated as an error.
template <typename Derived, typename Real>
LeftVectorSet<Real> left_vectors_generic(const Eigen::MatrixBase<Derived>& matrix,
                                         const Spectrum<Real>& spectrum,
                                         const EigOptions& options = {}) {
  using Complex = std::complex<Real>;
  const Eigen::Index n = spectrum.size();
  const auto adj = eig(matrix.adjoint().eval(), options);

  LeftVectorSet<Real> out;
  out.vectors.resize(n, n);
  out.ambiguous.setConstant(n, false);
  const Real match_tol =
      Real(1e-6) * (spectrum.matrix_norm > Real(0) ? spectrum.matrix_norm : Real(1));
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex target = std::conj(spectrum.eigenvalues[k]);
    Eigen::Index best = -1;
    Real best_dist = std::numeric_limits<Real>::infinity();
    int close = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Real dist = std::abs(adj.eigenvalues[j] - target);
      if (dist < match_tol) ++close;  // cluster size, counting used slots too
      if (!used[static_cast<std::size_t>(j)] && dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    out.ambiguous[k] = close > 1;
    out.vectors.col(k) = adj.right_vectors.col(best);
  }
  return out;
}

}  // namespace nhchain
