// Command-line front end.  Every subcommand reads an optional JSON config
// file, overlays command-line flags (flags win), and hands the merged
// document to parse_settings.  Exit codes: 0 success, 2 bad configuration,
// 3 eigensolver non-convergence, 4 output I/O failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhchain/config.hpp"
#include "nhchain/errors.hpp"
#include "nhchain/hamiltonian.hpp"
#include "nhchain/sweep.hpp"
#include "nhchain/toy.hpp"
#include "nhchain/version.hpp"

namespace {

using nhchain::ConfigError;
using nlohmann::ordered_json;

// every option a chain subcommand may set; presence is tracked via count()
struct ChainFlags {
  std::string config_path;
  std::string model;
  double lambda = 0.0;
  std::string beta;
  std::string phi;
  double alpha = 0.0;
  double v = 0.0;
  double va = 0.0;
  double vb = 0.0;
  double center = 0.0;
  double halfwidth = 0.0;
  std::int64_t order = 0;
  std::vector<double> t_values;
  std::vector<std::string> theta;
  std::int64_t theta_count = 0;
  std::string theta_min;
  std::string theta_max;
  std::vector<std::int64_t> sizes;
  std::string boundary;
  std::uint64_t seed = 0;
  std::int64_t replicas = 0;
  std::string output;
  std::string format;
  std::int64_t threads = 0;
  std::string mode;
  std::string quantity;
  std::string matrix_out;
  std::string profile_out;
  bool no_balance = false;
  double residual_tol = 0.0;
  std::int64_t sweeps = 0;
  bool verbose = false;
};

void add_chain_options(CLI::App* cmd, ChainFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "JSON config file; flags override its keys");
  cmd->add_option("--model", f.model, "aaf, fibonacci, alternating or random");
  cmd->add_option("--lambda", f.lambda, "modulation amplitude of the aaf potential");
  cmd->add_option("--beta", f.beta, "aaf steepness; a number or inf");
  cmd->add_option("--phi", f.phi, "aaf sampling phase, number or pi form like pi/2");
  cmd->add_option("--alpha", f.alpha, "aaf incommensurate frequency");
  cmd->add_option("-v,--v", f.v, "half detuning: site energies +v / -v");
  cmd->add_option("--va", f.va, "explicit A-site energy (overrides --v)");
  cmd->add_option("--vb", f.vb, "explicit B-site energy (overrides --v)");
  cmd->add_option("--center", f.center, "random potential center");
  cmd->add_option("--halfwidth", f.halfwidth, "random potential halfwidth");
  cmd->add_option("--order", f.order, "substitution depth for the fibonacci chain");
  cmd->add_option("-T,--T", f.t_values, "hopping magnitude(s)");
  cmd->add_option("--theta", f.theta, "hopping phase(s); numbers or pi forms like 17pi/36");
  cmd->add_option("--theta-count", f.theta_count, "sample theta on a uniform grid of this size");
  cmd->add_option("--theta-min", f.theta_min, "grid start, default 0");
  cmd->add_option("--theta-max", f.theta_max, "grid end, default pi/2");
  cmd->add_option("-N,--size", f.sizes, "chain length(s)");
  cmd->add_option("--boundary", f.boundary, "open or periodic");
  cmd->add_option("--seed", f.seed, "base seed for random potentials");
  cmd->add_option("--replicas", f.replicas, "disorder realizations per grid point");
  cmd->add_option("-o,--output", f.output, "output path; stdout when omitted");
  cmd->add_option("--format", f.format, "csv or json");
  cmd->add_option("--threads", f.threads, "worker threads");
  cmd->add_option("--mode", f.mode, "extreme state: max_ipr or min_ipr");
  cmd->add_option("--quantity", f.quantity, "landscape quantity: log_ipr, d2 or rigidity");
  cmd->add_option("--matrix-out", f.matrix_out, "also dump the Hamiltonian as re,im CSV");
  cmd->add_option("--profile-out", f.profile_out, "also dump |psi|^2 site profiles");
  cmd->add_flag("--no-balance", f.no_balance, "skip diagonal balancing before the QR pass");
  cmd->add_option("--residual-tol", f.residual_tol, "eigenpair residual gate, relative");
  cmd->add_option("--sweeps-per-eigenvalue", f.sweeps, "QR sweep budget per eigenvalue");
  cmd->add_flag("--verbose", f.verbose, "progress notes on stderr");
}

ordered_json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse config file '" + path + "': " + e.what());
  }
}

void merge_over(ordered_json& doc, const ordered_json& layer) {
  if (!layer.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = layer.begin(); it != layer.end(); ++it) doc[it.key()] = it.value();
}

ordered_json beta_value(const std::string& text) {
  if (text == "inf" || text == "infinity") return "inf";
  try {
    std::size_t used = 0;
    const double b = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return b;
  } catch (const std::logic_error&) {
    throw ConfigError("--beta expects a number or inf, got '" + text + "'");
  }
}

// merged document: subcommand defaults, then config file, then given flags
ordered_json merged_document(const CLI::App* cmd, const ChainFlags& f, ordered_json doc) {
  if (cmd->count("--config")) merge_over(doc, load_config_file(f.config_path));
  if (cmd->count("--model")) doc["model"] = f.model;
  if (cmd->count("--lambda")) doc["lambda"] = f.lambda;
  if (cmd->count("--beta")) doc["beta"] = beta_value(f.beta);
  if (cmd->count("--phi")) doc["phi"] = f.phi;
  if (cmd->count("--alpha")) doc["alpha"] = f.alpha;
  if (cmd->count("--v")) doc["v"] = f.v;
  if (cmd->count("--va")) doc["va"] = f.va;
  if (cmd->count("--vb")) doc["vb"] = f.vb;
  if (cmd->count("--center")) doc["center"] = f.center;
  if (cmd->count("--halfwidth")) doc["halfwidth"] = f.halfwidth;
  if (cmd->count("--order")) doc["order"] = f.order;
  if (cmd->count("--T")) doc["T"] = f.t_values;
  if (cmd->count("--theta")) {
    doc["theta"] = f.theta;
    doc.erase("theta_count");
  }
  if (cmd->count("--theta-count")) {
    doc["theta_count"] = f.theta_count;
    doc.erase("theta");
  }
  if (cmd->count("--theta-min")) doc["theta_min"] = f.theta_min;
  if (cmd->count("--theta-max")) doc["theta_max"] = f.theta_max;
  if (cmd->count("--size")) doc["sizes"] = f.sizes;
  if (cmd->count("--boundary")) doc["boundary"] = f.boundary;
  if (cmd->count("--seed")) doc["seeds"] = f.seed;
  if (cmd->count("--replicas")) doc["replicas"] = f.replicas;
  if (cmd->count("--output")) doc["output"] = f.output;
  if (cmd->count("--format")) doc["format"] = f.format;
  if (cmd->count("--threads")) doc["threads"] = f.threads;
  if (cmd->count("--mode")) doc["mode"] = f.mode;
  if (cmd->count("--quantity")) doc["quantity"] = f.quantity;
  if (cmd->count("--matrix-out")) doc["matrix_output"] = f.matrix_out;
  if (cmd->count("--profile-out")) doc["profile_output"] = f.profile_out;
  if (cmd->count("--no-balance")) doc["balance"] = false;
  if (cmd->count("--residual-tol")) doc["residual_tolerance"] = f.residual_tol;
  if (cmd->count("--sweeps-per-eigenvalue")) doc["sweeps_per_eigenvalue"] = f.sweeps;
  if (cmd->count("--verbose")) doc["verbose"] = true;
  return doc;
}

void write_table(const nhchain::Table& table, const nhchain::RunSettings& s,
                 const ordered_json& metadata) {
  if (s.output.empty()) {
    if (s.format == nhchain::EmitFormat::Csv) {
      std::cout << nhchain::to_csv(table);
    } else {
      std::cout << nhchain::to_json(table).dump(2) << "\n";
    }
    return;
  }
  nhchain::emit(table, s.output, s.format, metadata);
  if (s.verbose) std::cerr << "wrote " << s.output.string() << "\n";
}

nhchain::ProgressFn progress_for(const nhchain::RunSettings& s) {
  if (!s.verbose) return {};
  return [](const std::string& tag) { std::cerr << tag << "\n"; };
}

ordered_json metadata_for(const std::string& command, const nhchain::RunSettings& s) {
  ordered_json meta;
  meta["command"] = command;
  meta["settings"] = nhchain::settings_metadata(s);
  return meta;
}

int run_spectrum(const nhchain::RunSettings& s) {
  if (s.t_values.size() != 1 || s.theta_values.size() != 1)
    throw ConfigError("spectrum takes a single T and a single theta");
  const nhchain::Hopping hopping(s.t_values.front(), s.theta_values.front());
  if (!s.matrix_output.empty()) {
    const auto h = nhchain::build_hamiltonian(s.chain, hopping);
    std::ofstream out(s.matrix_output);
    if (!out) throw nhchain::IoError("cannot open for writing", s.matrix_output.string());
    nhchain::write_matrix_csv(h.entries, out);
    if (!out.good()) throw nhchain::IoError("write failed", s.matrix_output.string());
  }
  const auto records = nhchain::run_complex_plane(s.chain, hopping, s.eig);
  write_table(nhchain::to_table(records), s, metadata_for("spectrum", s));
  return 0;
}

int run_sweep_command(const std::string& name, const nhchain::RunSettings& s) {
  const auto rows = nhchain::run_theta_sweep(s.grid(), s.threads, progress_for(s));
  write_table(nhchain::to_table(rows), s, metadata_for(name, s));
  return 0;
}

int run_landscape_command(const std::string& name, const nhchain::RunSettings& s) {
  const auto rows =
      nhchain::run_landscape(s.grid(), s.mode, s.quantity, s.threads, progress_for(s));
  write_table(nhchain::to_table(rows), s, metadata_for(name, s));
  return 0;
}

int run_loclen(const nhchain::RunSettings& s) {
  const auto out = nhchain::run_localization_length(s.grid(), s.threads, progress_for(s));
  const auto meta = metadata_for("loclen", s);
  if (!s.profile_output.empty()) {
    nhchain::RunSettings ps = s;
    ps.output = s.profile_output;
    write_table(nhchain::profile_table(out), ps, meta);
  }
  write_table(nhchain::to_table(out.rows), s, meta);
  return 0;
}

// two-band momentum-space model; its config keys are separate from the
// real-space chains: va, vb, theta, spacing, k_count, t_count, t_max
struct ToyFlags {
  std::string config_path;
  double va = 0.0;
  double vb = 0.0;
  std::string theta;
  double spacing = 0.0;
  std::int64_t k_count = 0;
  std::int64_t t_count = 0;
  double t_max = 0.0;
  std::string output;
  std::string format;
};

void add_toy_options(CLI::App* cmd, ToyFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "JSON config file; flags override its keys");
  cmd->add_option("--va", f.va, "A-site energy");
  cmd->add_option("--vb", f.vb, "B-site energy (must exceed --va)");
  cmd->add_option("--theta", f.theta, "hopping phase, number or pi form");
  cmd->add_option("--spacing", f.spacing, "unit cell length a");
  cmd->add_option("--k-count", f.k_count, "momentum samples over [0, pi/a]");
  cmd->add_option("--t-count", f.t_count, "hopping samples over [0, t_max]");
  cmd->add_option("--t-max", f.t_max, "largest hopping magnitude, default vb - va");
  cmd->add_option("-o,--output", f.output, "output path; stdout when omitted");
  cmd->add_option("--format", f.format, "csv or json");
}

int run_toy(const CLI::App* cmd, const ToyFlags& f) {
  ordered_json doc = {{"va", -1.0},       {"vb", 1.0},      {"theta", "pi/2"},
                      {"spacing", 1.0},   {"k_count", 201}, {"t_count", 201},
                      {"format", "csv"}};
  if (cmd->count("--config")) merge_over(doc, load_config_file(f.config_path));
  if (cmd->count("--va")) doc["va"] = f.va;
  if (cmd->count("--vb")) doc["vb"] = f.vb;
  if (cmd->count("--theta")) doc["theta"] = f.theta;
  if (cmd->count("--spacing")) doc["spacing"] = f.spacing;
  if (cmd->count("--k-count")) doc["k_count"] = f.k_count;
  if (cmd->count("--t-count")) doc["t_count"] = f.t_count;
  if (cmd->count("--t-max")) doc["t_max"] = f.t_max;
  if (cmd->count("--output")) doc["output"] = f.output;
  if (cmd->count("--format")) doc["format"] = f.format;

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    static const std::vector<std::string> known = {"va",      "vb",      "theta", "spacing",
                                                   "k_count", "t_count", "t_max", "output",
                                                   "format"};
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown toy config key '" + it.key() + "'");
  }

  nhchain::ToyParams base;
  base.v_a = doc.at("va").get<double>();
  base.v_b = doc.at("vb").get<double>();
  base.hopping = nhchain::Hopping(1.0, nhchain::parse_angle(doc.at("theta")));
  base.spacing_a = doc.at("spacing").get<double>();
  const auto k_count = doc.at("k_count").get<std::int64_t>();
  const auto t_count = doc.at("t_count").get<std::int64_t>();
  if (k_count < 1 || t_count < 1) throw ConfigError("k_count and t_count must be >= 1");
  const double t_max =
      doc.contains("t_max") ? doc.at("t_max").get<double>() : base.v_b - base.v_a;
  if (!(t_max >= 0.0)) throw ConfigError("t_max must be >= 0");

  const auto k_values =
      nhchain::linspace(0.0, M_PI / base.spacing_a, static_cast<int>(k_count));
  const auto t_values = nhchain::linspace(0.0, t_max, static_cast<int>(t_count));
  const auto rows = nhchain::order_parameter_grid(base, k_values, t_values);

  nhchain::RunSettings sink;
  if (doc.contains("output")) sink.output = doc.at("output").get<std::string>();
  const std::string format = doc.at("format").get<std::string>();
  if (format == "csv") {
    sink.format = nhchain::EmitFormat::Csv;
  } else if (format == "json") {
    sink.format = nhchain::EmitFormat::Json;
  } else {
    throw ConfigError("'format' must be \"csv\" or \"json\"");
  }
  ordered_json meta;
  meta["command"] = "toy";
  doc.erase("output");
  meta["settings"] = doc;
  write_table(nhchain::to_table(rows), sink, meta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-Hermitian tight-binding chain laboratory"};
  app.set_version_flag("--version", std::string("nhchain ") + nhchain::kVersionString);
  app.require_subcommand(1);

  auto* spectrum = app.add_subcommand(
      "spectrum", "full eigensystem diagnostics for one chain at one (T, theta)");
  auto* sweep = app.add_subcommand(
      "sweep", "inverse participation ratios across a (size, T, theta) grid");
  auto* landscape = app.add_subcommand(
      "landscape", "extreme-state quantity over the (T, theta) plane");
  auto* d2 = app.add_subcommand(
      "d2", "fractal dimension of the extreme state from finite-size scaling");
  auto* disorder = app.add_subcommand(
      "disorder", "replica-averaged sweep over random on-site potentials");
  auto* loclen = app.add_subcommand(
      "loclen", "localization length of the most localized state");
  auto* toy = app.add_subcommand(
      "toy", "two-band momentum-space model: closed-form order parameter grid");

  ChainFlags spectrum_flags, sweep_flags, landscape_flags, d2_flags, disorder_flags,
      loclen_flags;
  ToyFlags toy_flags;
  add_chain_options(spectrum, spectrum_flags);
  add_chain_options(sweep, sweep_flags);
  add_chain_options(landscape, landscape_flags);
  add_chain_options(d2, d2_flags);
  add_chain_options(disorder, disorder_flags);
  add_chain_options(loclen, loclen_flags);
  add_toy_options(toy, toy_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (spectrum->parsed()) {
      return run_spectrum(nhchain::parse_settings(
          merged_document(spectrum, spectrum_flags, {{"sizes", 987}, {"T", 1.0}})));
    }
    if (sweep->parsed()) {
      return run_sweep_command(
          "sweep", nhchain::parse_settings(merged_document(
                       sweep, sweep_flags, {{"sizes", 987}, {"theta_count", 25}})));
    }
    if (landscape->parsed()) {
      return run_landscape_command(
          "landscape",
          nhchain::parse_settings(merged_document(
              landscape, landscape_flags,
              {{"sizes", 233}, {"quantity", "log_ipr"}, {"theta_count", 25}})));
    }
    if (d2->parsed()) {
      return run_landscape_command(
          "d2", nhchain::parse_settings(merged_document(
                    d2, d2_flags,
                    {{"sizes", {89, 144, 233, 377, 610, 987}}, {"quantity", "d2"}})));
    }
    if (disorder->parsed()) {
      return run_sweep_command(
          "disorder",
          nhchain::parse_settings(merged_document(disorder, disorder_flags,
                                                  {{"model", "random"},
                                                   {"sizes", 233},
                                                   {"T", 4.0},
                                                   {"theta", {"0", "pi/2"}},
                                                   {"replicas", 20}})));
    }
    if (loclen->parsed()) {
      return run_loclen(nhchain::parse_settings(
          merged_document(loclen, loclen_flags,
                          {{"model", "fibonacci"},
                           {"sizes", 987},
                           {"T", 3.0},
                           {"theta", {"0", "pi/2"}}})));
    }
    return run_toy(toy, toy_flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nhchain::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const nhchain::IoError& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
