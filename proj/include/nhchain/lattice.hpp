#pragma once

// On-site potential families for the 1D chains: the smooth quasiperiodic
// (AAF-type) potential, its two-valued substitution-word limit, plain
// two-site alternation, and box-distributed random disorder.  Sites are
// indexed i = 1..N throughout; generated vectors store V_i at entry i-1.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "nhchain/rng.hpp"

namespace nhchain {

inline const double kGoldenRatio = (1.0 + std::sqrt(5.0)) / 2.0;

enum class Boundary { Open, Periodic };

// V_i = -lambda * tanh(beta * (cos(2 pi alpha i + phi) - cos(pi alpha))) / tanh(beta)
//
// beta = 0 is the smooth cosine limit -lambda * (cos(...) - cos(pi alpha)),
// beta = inf the two-valued limit -lambda * sign(...).  alpha defaults to
// the golden ratio; phi shifts the sampling phase.
struct AAFParams {
  double lambda = 1.0;
  double beta = 0.0;
  double phi = 0.0;
  double alpha = kGoldenRatio;
};

// Two-valued chain from the substitution A -> AB, B -> A.  Letter A takes
// value v_a, letter B takes v_b.
struct FibonacciWordParams {
  int order = 1;
  double v_a = 1.0;
  double v_b = -1.0;
};

// ... A B A B ... starting with v_a on site 1.
struct AlternatingParams {
  double v_a = 1.0;
  double v_b = -1.0;
  double spacing_a = 1.0;  // unit cell length, carried for the momentum-space model
};

// V_i drawn i.i.d. uniform from [center - halfwidth, center + halfwidth),
// one draw per site in site order, from xoshiro256** seeded with `seed`.
struct RandomDisorderParams {
  double center = 0.0;
  double halfwidth = 0.5;
  std::uint64_t seed = 0;
};

using ModelParams =
    std::variant<AAFParams, FibonacciWordParams, AlternatingParams, RandomDisorderParams>;

struct ChainSpec {
  ModelParams model;
  Eigen::Index n_sites = 2;
  Boundary boundary = Boundary::Open;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

inline void require_sites(Eigen::Index n) {
  require(n >= 2, "chain needs at least 2 sites, got " + std::to_string(n));
}

}  // namespace detail

// Word lengths follow F_1 = 1, F_2 = 2, F_k = F_{k-1} + F_{k-2}
// (1, 2, 3, 5, 8, ..., 89 at order 10, 987 at order 15).
inline Eigen::Index fibonacci_length(int order) {
  detail::require(order >= 1, "substitution order must be >= 1");
  Eigen::Index prev = 1, cur = 1;  // F_0 = 1 (word "B"), F_1 = 1 (word "A")
  for (int k = 2; k <= order; ++k) {
    Eigen::Index next = cur + prev;
    detail::require(next > cur, "fibonacci_length overflow");
    prev = cur;
    cur = next;
  }
  return cur;
}

inline std::optional<int> fibonacci_order_for_length(Eigen::Index n) {
  Eigen::Index prev = 1, cur = 1;
  for (int order = 1; cur <= n; ++order) {
    if (cur == n) return order;
    Eigen::Index next = cur + prev;
    prev = cur;
    cur = next;
  }
  return std::nullopt;
}

// order - 1 parallel substitution passes applied to "A".  The cap guards
// against runaway growth (lengths grow like phi^order).
inline std::string fibonacci_word(int order, std::size_t max_length = (std::size_t{1} << 22)) {
  detail::require(order >= 1, "substitution order must be >= 1");
  std::string word = "A";
  for (int pass = 1; pass < order; ++pass) {
    std::string next;
    if (word.size() * 2 > max_length)
      throw std::length_error("fibonacci word would exceed cap of " +
                              std::to_string(max_length) + " letters");
    next.reserve(word.size() * 2);
    for (char c : word) {
      if (c == 'A') {
        next += "AB";
      } else {
        next += 'A';
      }
    }
    word.swap(next);
    if (word.size() > max_length)
      throw std::length_error("fibonacci word would exceed cap of " +
                              std::to_string(max_length) + " letters");
  }
  return word;
}

namespace detail {

inline void validate(const AAFParams& p) {
  require(p.lambda > 0.0, "AAF lambda must be > 0");
  require(p.beta >= 0.0, "AAF beta must be >= 0");  // NaN fails too
  require(std::isfinite(p.phi), "AAF phi must be finite");
  require(std::isfinite(p.alpha) && p.alpha > 0.0, "AAF alpha must be finite and > 0");
}

}  // namespace detail

inline double aaf_potential(const AAFParams& p, Eigen::Index i) {
  detail::validate(p);
  const double x = std::cos(2.0 * M_PI * p.alpha * static_cast<double>(i) + p.phi) -
                   std::cos(M_PI * p.alpha);
  if (p.beta == 0.0) return -p.lambda * x;
  if (std::isinf(p.beta)) {
    if (x == 0.0) return 0.0;
    return -p.lambda * (x > 0.0 ? 1.0 : -1.0);
  }
  return -p.lambda * std::tanh(p.beta * x) / std::tanh(p.beta);
}

inline Eigen::VectorXd aaf_potentials(const AAFParams& p, Eigen::Index n) {
  detail::require_sites(n);
  detail::validate(p);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = aaf_potential(p, i + 1);
  return v;
}

inline Eigen::VectorXd fibonacci_potentials(const FibonacciWordParams& p, Eigen::Index n) {
  detail::require_sites(n);
  detail::require(fibonacci_length(p.order) >= n,
                  "substitution order " + std::to_string(p.order) + " gives only " +
                      std::to_string(fibonacci_length(p.order)) + " letters, chain has " +
                      std::to_string(n) + " sites");
  const std::string word = fibonacci_word(p.order);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = (word[i] == 'A') ? p.v_a : p.v_b;
  return v;
}

inline Eigen::VectorXd alternating_potentials(const AlternatingParams& p, Eigen::Index n) {
  detail::require_sites(n);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? p.v_a : p.v_b;
  return v;
}

inline Eigen::VectorXd random_potentials(const RandomDisorderParams& p, Eigen::Index n) {
  detail::require_sites(n);
  detail::require(p.halfwidth >= 0.0 && std::isfinite(p.halfwidth),
                  "disorder halfwidth must be finite and >= 0");
  detail::require(std::isfinite(p.center), "disorder center must be finite");
  Xoshiro256StarStar rng(p.seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = p.center + p.halfwidth * (2.0 * rng.next_double() - 1.0);
  return v;
}

inline Eigen::VectorXd potentials(const ChainSpec& spec) {
  return std::visit(
      [&](const auto& p) -> Eigen::VectorXd {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, AAFParams>) {
          return aaf_potentials(p, spec.n_sites);
        } else if constexpr (std::is_same_v<P, FibonacciWordParams>) {
          return fibonacci_potentials(p, spec.n_sites);
        } else if constexpr (std::is_same_v<P, AlternatingParams>) {
          return alternating_potentials(p, spec.n_sites);
        } else {
          return random_potentials(p, spec.n_sites);
        }
      },
      spec.model);
}

// +1 for A-type sites, -1 for B-type.  The random model carries no
// sublattice structure.
inline std::optional<Eigen::VectorXi> sublattice_signs(const ChainSpec& spec) {
  const Eigen::Index n = spec.n_sites;
  detail::require_sites(n);
  Eigen::VectorXi s(n);
  if (std::holds_alternative<AlternatingParams>(spec.model)) {
    for (Eigen::Index i = 0; i < n; ++i) s[i] = (i % 2 == 0) ? 1 : -1;
    return s;
  }
  if (const auto* p = std::get_if<FibonacciWordParams>(&spec.model)) {
    const std::string word = fibonacci_word(p->order);
    detail::require(static_cast<Eigen::Index>(word.size()) >= n,
                    "substitution word shorter than chain");
    for (Eigen::Index i = 0; i < n; ++i) s[i] = (word[i] == 'A') ? 1 : -1;
    return s;
  }
  if (const auto* p = std::get_if<AAFParams>(&spec.model)) {
    // A where the potential sits on the +lambda branch, matching the
    // beta -> inf two-valued limit.
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x =
          std::cos(2.0 * M_PI * p->alpha * static_cast<double>(i + 1) + p->phi) -
          std::cos(M_PI * p->alpha);
      s[i] = (x <= 0.0) ? 1 : -1;
    }
    return s;
  }
  return std::nullopt;
}

}  // namespace nhchain
