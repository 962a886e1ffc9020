#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nhchain {

// Bad or inconsistent run parameters (unknown model name, missing seed,
// non-Fibonacci size for the substitution chain, ...).  The CLI maps this
// to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// QR iteration failed to converge or a computed pair failed residual
// certification.  `index` is the eigenvalue slot that got stuck (-1 when
// the failure is not tied to a single slot).  CLI exit code 3.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::int64_t index = -1)
      : std::runtime_error(what), index_(index) {}
  std::int64_t index() const noexcept { return index_; }

 private:
  std::int64_t index_;
};

// Filesystem trouble while emitting results.  CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, const std::string& path)
      : std::runtime_error(what + ": " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace nhchain
