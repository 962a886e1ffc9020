#include "nhchain/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "nhchain/errors.hpp"
#include "nhchain/toy.hpp"

namespace nhchain {

namespace {

// Run tasks 0..count-1 on up to `threads` workers.  Each task writes only
// its own output slot, so execution order cannot influence results.  If
// tasks throw, the exception of the lowest task index is rethrown.
void run_tasks(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
  if (count == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_index = count;
  std::exception_ptr err;
  const auto body = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

ChainSpec chain_for_task(const ChainSpec& tmpl, Eigen::Index n, int replica) {
  ChainSpec chain = tmpl;
  chain.n_sites = n;
  if (auto* fib = std::get_if<FibonacciWordParams>(&chain.model)) {
    const auto order = fibonacci_order_for_length(n);
    if (!order)
      throw ConfigError("substitution-chain sizes must be Fibonacci lengths, got " +
                        std::to_string(n));
    fib->order = *order;
  }
  if (auto* rnd = std::get_if<RandomDisorderParams>(&chain.model)) {
    rnd->seed += static_cast<std::uint64_t>(replica);
  } else if (replica != 0) {
    throw ConfigError("replicas > 1 are only meaningful for the random model");
  }
  return chain;
}

std::string task_tag(Eigen::Index n, double t, double theta, int replica) {
  std::ostringstream os;
  os << "N=" << n << " T=" << t << " theta=" << theta;
  if (replica > 0) os << " replica=" << replica;
  return os.str();
}

struct StateStats {
  double mipr = 0.0;
  Eigen::Index max_state = 0, min_state = 0;
  double max_ipr = 0.0, min_ipr = 0.0;
  double rigidity_max = 0.0, rigidity_min = 0.0;
  double xi_max = 0.0;
};

template <typename Real>
StateStats state_stats(const Spectrum<Real>& sp) {
  StateStats s;
  const Eigen::Index n = sp.size();
  Eigen::VectorXd iprs(n);
  for (Eigen::Index k = 0; k < n; ++k) iprs[k] = ipr(sp.right_vectors.col(k));
  s.mipr = iprs.sum() / static_cast<double>(n);
  s.max_ipr = iprs[0];
  s.min_ipr = iprs[0];
  for (Eigen::Index k = 1; k < n; ++k) {
    if (iprs[k] > s.max_ipr) {
      s.max_ipr = iprs[k];
      s.max_state = k;
    }
    if (iprs[k] < s.min_ipr) {
      s.min_ipr = iprs[k];
      s.min_state = k;
    }
  }
  s.rigidity_max = phase_rigidity(sp, s.max_state);
  s.rigidity_min = phase_rigidity(sp, s.min_state);
  s.xi_max = localization_length(sp.right_vectors.col(s.max_state));
  return s;
}

void validate_grid(const SweepGrid& grid) {
  if (grid.sizes.empty() || grid.t_values.empty() || grid.theta_values.empty())
    throw ConfigError("sweep grid needs at least one size, one T and one theta");
  if (grid.replicas < 1) throw ConfigError("replicas must be >= 1");
  if (grid.replicas > 1 && !std::holds_alternative<RandomDisorderParams>(grid.chain.model))
    throw ConfigError("replicas > 1 are only meaningful for the random model");
}

}  // namespace

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("linspace needs count >= 1");
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < count; ++i)
    v[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  v.back() = hi;
  return v;
}

std::vector<SweepRow> run_theta_sweep(const SweepGrid& grid, int threads,
                                      const ProgressFn& progress) {
  validate_grid(grid);
  const std::size_t n_sizes = grid.sizes.size();
  const std::size_t n_t = grid.t_values.size();
  const std::size_t n_theta = grid.theta_values.size();
  const std::size_t n_rep = static_cast<std::size_t>(grid.replicas);
  const std::size_t count = n_sizes * n_t * n_theta * n_rep;

  std::vector<StateStats> outs(count);
  run_tasks(count, threads, [&](std::size_t i) {
    const int replica = static_cast<int>(i % n_rep);
    std::size_t rest = i / n_rep;
    const double theta = grid.theta_values[rest % n_theta];
    rest /= n_theta;
    const double t = grid.t_values[rest % n_t];
    const Eigen::Index n = grid.sizes[rest / n_t];
    const ChainSpec chain = chain_for_task(grid.chain, n, replica);
    try {
      const auto h = build_hamiltonian(chain, Hopping(t, theta));
      outs[i] = state_stats(eig(h.entries, grid.eig_options));
    } catch (const SolverError& e) {
      throw SolverError("task " + task_tag(n, t, theta, replica) + ": " + e.what(), e.index());
    }
    if (progress) progress("done " + task_tag(n, t, theta, replica));
  });

  std::vector<SweepRow> rows;
  rows.reserve(n_sizes * n_t * n_theta);
  std::size_t i = 0;
  for (std::size_t is = 0; is < n_sizes; ++is) {
    for (std::size_t it = 0; it < n_t; ++it) {
      for (std::size_t ith = 0; ith < n_theta; ++ith) {
        SweepRow row;
        row.n = grid.sizes[is];
        row.t = grid.t_values[it];
        row.theta = grid.theta_values[ith];
        row.replicas = grid.replicas;
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t r = 0; r < n_rep; ++r, ++i) {
          const StateStats& s = outs[i];
          sum += s.mipr;
          sumsq += s.mipr * s.mipr;
          row.max_ipr += s.max_ipr;
          row.min_ipr += s.min_ipr;
          row.rigidity_max_state += s.rigidity_max;
          row.rigidity_min_state += s.rigidity_min;
          row.loc_length_max_state += s.xi_max;
        }
        const double rep = static_cast<double>(n_rep);
        row.mipr = sum / rep;
        if (n_rep > 1) {
          const double var = (sumsq - sum * sum / rep) / (rep - 1.0);
          row.mipr_se = std::sqrt(std::max(0.0, var) / rep);
        }
        row.max_ipr /= rep;
        row.min_ipr /= rep;
        row.rigidity_max_state /= rep;
        row.rigidity_min_state /= rep;
        row.loc_length_max_state /= rep;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<LandscapeRow> run_landscape(const SweepGrid& grid, ExtremeMode mode,
                                        LandscapeQuantity quantity, int threads,
                                        const ProgressFn& progress) {
  validate_grid(grid);
  if (grid.replicas != 1) throw ConfigError("landscape runs use a single replica");
  if (quantity == LandscapeQuantity::D2 && grid.sizes.size() < 4)
    throw ConfigError("a D2 landscape needs at least 4 sizes for the scaling fit");

  struct CellPoint {
    double ipr_extreme = 0.0;
    double rigidity = 0.0;
    Eigen::Index state = 0;
  };
  const std::size_t n_sizes = grid.sizes.size();
  const std::size_t n_t = grid.t_values.size();
  const std::size_t n_theta = grid.theta_values.size();
  const std::size_t count = n_sizes * n_t * n_theta;

  std::vector<CellPoint> outs(count);
  run_tasks(count, threads, [&](std::size_t i) {
    const double theta = grid.theta_values[i % n_theta];
    std::size_t rest = i / n_theta;
    const double t = grid.t_values[rest % n_t];
    const Eigen::Index n = grid.sizes[rest / n_t];
    const ChainSpec chain = chain_for_task(grid.chain, n, 0);
    try {
      const auto h = build_hamiltonian(chain, Hopping(t, theta));
      const auto sp = eig(h.entries, grid.eig_options);
      CellPoint p;
      p.state = select_extreme_state(sp, mode);
      p.ipr_extreme = ipr(sp.right_vectors.col(p.state));
      p.rigidity = phase_rigidity(sp, p.state);
      outs[i] = p;
    } catch (const SolverError& e) {
      throw SolverError("task " + task_tag(n, t, theta, 0) + ": " + e.what(), e.index());
    }
    if (progress) progress("done " + task_tag(n, t, theta, 0));
  });

  std::vector<LandscapeRow> rows;
  rows.reserve(n_t * n_theta);
  for (std::size_t it = 0; it < n_t; ++it) {
    for (std::size_t ith = 0; ith < n_theta; ++ith) {
      LandscapeRow row;
      row.t = grid.t_values[it];
      row.theta = grid.theta_values[ith];
      std::vector<double> iprs(n_sizes);
      for (std::size_t is = 0; is < n_sizes; ++is)
        iprs[is] = outs[(is * n_t + it) * n_theta + ith].ipr_extreme;
      const CellPoint& top = outs[((n_sizes - 1) * n_t + it) * n_theta + ith];
      row.state = top.state;
      row.log_ipr = std::log(top.ipr_extreme);
      row.rigidity = top.rigidity;
      if (n_sizes >= 4) {
        const ScalingFit fit = fractal_dimension(grid.sizes, iprs);
        row.d2 = fit.d2;
        row.d2_residual = fit.fit_residual;
      } else {
        row.d2 = std::numeric_limits<double>::quiet_NaN();
        row.d2_residual = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ObservableRecord> run_complex_plane(const ChainSpec& chain, const Hopping& hopping,
                                                const EigOptions& options) {
  const auto h = build_hamiltonian(chain, hopping);
  const auto sp = eig(h.entries, options);
  return observable_records(sp, sublattice_signs(chain));
}

LoclenOutput run_localization_length(const SweepGrid& grid, int threads,
                                     const ProgressFn& progress) {
  validate_grid(grid);
  if (grid.sizes.size() != 1)
    throw ConfigError("localization-length scans use a single system size");
  if (grid.replicas != 1) throw ConfigError("localization-length scans use a single replica");

  const Eigen::Index n = grid.sizes[0];
  const std::size_t n_t = grid.t_values.size();
  const std::size_t n_theta = grid.theta_values.size();
  const std::size_t count = n_t * n_theta;

  LoclenOutput out;
  out.rows.resize(count);
  out.profiles.resize(count);
  run_tasks(count, threads, [&](std::size_t i) {
    const double theta = grid.theta_values[i % n_theta];
    const double t = grid.t_values[i / n_theta];
    const ChainSpec chain = chain_for_task(grid.chain, n, 0);
    try {
      const auto h = build_hamiltonian(chain, Hopping(t, theta));
      const auto sp = eig(h.entries, grid.eig_options);
      LoclenRow row;
      row.theta = theta;
      row.t = t;
      row.state = select_extreme_state(sp, ExtremeMode::MaxIpr);
      const auto psi = sp.right_vectors.col(row.state);
      row.xi = localization_length(psi);
      row.ipr = ipr(psi);
      out.rows[i] = row;
      out.profiles[i] = psi.cwiseAbs2();
    } catch (const SolverError& e) {
      throw SolverError("task " + task_tag(n, t, theta, 0) + ": " + e.what(), e.index());
    }
    if (progress) progress("done " + task_tag(n, t, theta, 0));
  });
  return out;
}

Table to_table(const std::vector<SweepRow>& rows) {
  Table table({"n", "t", "theta", "replicas", "mipr", "mipr_se", "max_ipr", "min_ipr",
               "rigidity_max_state", "rigidity_min_state", "loc_length_max_state"});
  for (const auto& r : rows)
    table.append_row({static_cast<std::int64_t>(r.n), r.t, r.theta,
                      static_cast<std::int64_t>(r.replicas), r.mipr, r.mipr_se, r.max_ipr,
                      r.min_ipr, r.rigidity_max_state, r.rigidity_min_state,
                      r.loc_length_max_state});
  return table;
}

Table to_table(const std::vector<LandscapeRow>& rows) {
  Table table({"t", "theta", "state", "log_ipr", "d2", "d2_residual", "rigidity"});
  for (const auto& r : rows)
    table.append_row({r.t, r.theta, static_cast<std::int64_t>(r.state), r.log_ipr, r.d2,
                      r.d2_residual, r.rigidity});
  return table;
}

Table to_table(const std::vector<ObservableRecord>& records) {
  Table table({"state", "re_energy", "im_energy", "ipr", "rigidity", "sigma_z_abs",
               "loc_length", "ep_flag"});
  for (const auto& r : records)
    table.append_row({static_cast<std::int64_t>(r.state_index), r.eigenvalue.real(),
                      r.eigenvalue.imag(), r.ipr, r.rigidity, r.sigma_z, r.loc_length,
                      static_cast<std::int64_t>(r.ep_flag ? 1 : 0)});
  return table;
}

Table to_table(const std::vector<LoclenRow>& rows) {
  Table table({"theta", "t", "state", "xi", "ipr"});
  for (const auto& r : rows)
    table.append_row({r.theta, r.t, static_cast<std::int64_t>(r.state), r.xi, r.ipr});
  return table;
}

Table profile_table(const LoclenOutput& output) {
  Table table({"theta", "t", "site", "prob"});
  for (std::size_t i = 0; i < output.rows.size(); ++i) {
    const auto& row = output.rows[i];
    const auto& prof = output.profiles[i];
    for (Eigen::Index s = 0; s < prof.size(); ++s)
      table.append_row({row.theta, row.t, static_cast<std::int64_t>(s + 1), prof[s]});
  }
  return table;
}

Table to_table(const std::vector<ToyGridRow>& rows) {
  Table table({"k", "t", "branch", "re_energy", "im_energy", "sigma_z_abs", "rigidity",
               "region"});
  for (const auto& r : rows) {
    const char* region = r.region == Region::Blue     ? "BLUE"
                         : r.region == Region::Yellow ? "YELLOW"
                                                      : "BOUNDARY";
    table.append_row({r.k, r.t, static_cast<std::int64_t>(r.branch), r.energy.real(),
                      r.energy.imag(), r.sigma_z, r.rigidity, std::string(region)});
  }
  return table;
}

}  // namespace nhchain
