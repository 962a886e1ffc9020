#pragma once

// Parameter-sweep engine.  Tasks are the cartesian product of
// (size, T, theta, replica) in lexicographic order; they are pure and may
// run on any number of worker threads, but results are always assembled by
// task index, so output is identical regardless of worker count.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nhchain/hamiltonian.hpp"
#include "nhchain/observables.hpp"
#include "nhchain/table.hpp"
#include "nhchain/toy.hpp"

namespace nhchain {

struct SweepGrid {
  ChainSpec chain;  // model template; n_sites is overridden by `sizes`
  std::vector<double> theta_values;
  std::vector<double> t_values;
  std::vector<Eigen::Index> sizes;
  int replicas = 1;  // disorder models only: seeds run seed, seed+1, ...
  EigOptions eig_options{};
};

// called once per finished task with a short human-readable line
using ProgressFn = std::function<void(const std::string&)>;

// one row per (size, T, theta); replicas are averaged with a standard error
struct SweepRow {
  Eigen::Index n = 0;
  double t = 0.0;
  double theta = 0.0;
  int replicas = 1;
  double mipr = 0.0;
  double mipr_se = 0.0;  // sample SE over replicas, 0 for a single replica
  double max_ipr = 0.0;
  double min_ipr = 0.0;
  double rigidity_max_state = 0.0;
  double rigidity_min_state = 0.0;
  double loc_length_max_state = 0.0;
};

std::vector<SweepRow> run_theta_sweep(const SweepGrid& grid, int threads = 1,
                                      const ProgressFn& progress = {});

enum class LandscapeQuantity { LogIpr, D2, Rigidity };

// one row per (T, theta) cell; extreme-state values at the largest size,
// D2 fitted across all sizes (NaN when fewer than 4)
struct LandscapeRow {
  double t = 0.0;
  double theta = 0.0;
  Eigen::Index state = 0;  // extreme-state index at the largest size
  double log_ipr = 0.0;
  double d2 = 0.0;
  double d2_residual = 0.0;
  double rigidity = 0.0;
};

std::vector<LandscapeRow> run_landscape(const SweepGrid& grid, ExtremeMode mode,
                                        LandscapeQuantity quantity, int threads = 1,
                                        const ProgressFn& progress = {});

// per-eigenstate diagnostics of one chain
std::vector<ObservableRecord> run_complex_plane(const ChainSpec& chain, const Hopping& hopping,
                                                const EigOptions& options = {});

struct LoclenRow {
  double theta = 0.0;
  double t = 0.0;
  Eigen::Index state = 0;  // max-IPR state index
  double xi = 0.0;
  double ipr = 0.0;
};

struct LoclenOutput {
  std::vector<LoclenRow> rows;
  // |psi_i|^2 of the max-IPR state per (theta, T) cell, in row order
  std::vector<Eigen::VectorXd> profiles;
};

// single-size grid over (theta, T); also dumps the max-IPR state profiles
LoclenOutput run_localization_length(const SweepGrid& grid, int threads = 1,
                                     const ProgressFn& progress = {});

// table builders with fixed, documented headers
Table to_table(const std::vector<SweepRow>& rows);
Table to_table(const std::vector<LandscapeRow>& rows);
Table to_table(const std::vector<ObservableRecord>& records);
Table to_table(const std::vector<LoclenRow>& rows);
Table to_table(const std::vector<ToyGridRow>& rows);
Table profile_table(const LoclenOutput& output);

// evenly spaced inclusive grid; count == 1 collapses to {lo}
std::vector<double> linspace(double lo, double hi, int count);

}  // namespace nhchain
