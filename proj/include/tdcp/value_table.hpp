#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tdcp/error.hpp"
#include "tdcp/solver.hpp"

namespace tdcp {

class FingerprintMismatch : public Error {
 public:
  using Error::Error;
};

/// H state-value estimates indexed by Zobrist slot, tied to the solver
/// configuration that produced them.
///
/// On-disk layout (little-endian): 8-byte magic "TDCPVTAB", u32 version,
/// u64 H, u64 zobrist seed, u64 fingerprint digest, then H IEEE-754 doubles.
class ValueTable {
 public:
  ValueTable(std::size_t size, SolverFingerprint fingerprint, std::uint64_t zobrist_seed);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  const SolverFingerprint& fingerprint() const { return fingerprint_; }
  std::uint64_t zobrist_seed() const { return zobrist_seed_; }

  void save(const std::filesystem::path& path) const;

  /// Throws FingerprintMismatch when the file was written under a different
  /// solver configuration than `expected`.
  static ValueTable load(const std::filesystem::path& path, const SolverFingerprint& expected);

  friend bool operator==(const ValueTable&, const ValueTable&) = default;

 private:
  std::vector<double> values_;
  SolverFingerprint fingerprint_;
  std::uint64_t zobrist_seed_;
};

}  // namespace tdcp
