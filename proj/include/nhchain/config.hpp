#pragma once

// JSON run configuration shared by all CLI subcommands.  A config document
// can also arrive purely from command-line flags; the CLI merges flags over
// the file (flags win) and hands the merged document to parse_settings.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhchain/eigensolver.hpp"
#include "nhchain/lattice.hpp"
#include "nhchain/observables.hpp"
#include "nhchain/sweep.hpp"
#include "nhchain/table.hpp"

namespace nhchain {

struct RunSettings {
  ChainSpec chain;  // resolved model; n_sites = first requested size
  std::vector<Eigen::Index> sizes;
  std::vector<double> t_values;
  std::vector<double> theta_values;
  int replicas = 1;
  bool seed_given = false;
  std::uint64_t seed = 0;
  std::filesystem::path output;  // empty: write CSV/JSON to stdout
  EmitFormat format = EmitFormat::Csv;
  int threads = 1;
  ExtremeMode mode = ExtremeMode::MaxIpr;
  LandscapeQuantity quantity = LandscapeQuantity::D2;
  std::filesystem::path matrix_output;   // optional Hamiltonian dump
  std::filesystem::path profile_output;  // optional |psi|^2 profile dump
  EigOptions eig{};
  bool verbose = false;

  SweepGrid grid() const;
};

// Accepts plain numbers or strings like "pi/2", "17pi/36", "0.25pi".
double parse_angle(const nlohmann::json& value);

// Validates and resolves the merged config document.  Throws ConfigError
// on unknown model names, missing disorder seeds, bad grids, etc.
RunSettings parse_settings(const nlohmann::json& config);

// The resolved settings as a JSON document (used for metadata sidecars).
nlohmann::ordered_json settings_metadata(const RunSettings& settings);

}  // namespace nhchain
