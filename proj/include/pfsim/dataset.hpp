#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pfsim/model.hpp"

namespace pfsim {

/// Initial-condition levels. With cross = true every (c0, seed) pair is run;
/// otherwise the two lists are zipped and must have equal length.
struct SweepSpec {
  std::vector<double> supersaturations;
  std::vector<std::uint64_t> seeds;
  bool cross = true;

  /// The 5 x 5 levels of the reference study.
  static SweepSpec reference();
  std::vector<std::pair<double, std::uint64_t>> combinations() const;  // sorted by (c0, seed)
};

struct SweepOptions {
  std::size_t frames = 100;
  std::size_t substeps = 10;
  double noise_amp = 0.01;
  std::size_t threads = 1;  // 0 = hardware concurrency
};

struct InstanceMeta {
  double c0 = 0.0;
  std::uint64_t seed = 0;
};

/// N trajectories sharing grid, frame count, spacing and parameters.
struct Dataset {
  static constexpr std::uint16_t kVersionMajor = 1;
  static constexpr std::uint16_t kVersionMinor = 0;

  GridPtr grid;
  std::size_t frames = 0;
  double dt = 0.0;  // frame spacing
  std::size_t substeps = 1;
  double noise_amp = 0.0;
  SimParams params;
  std::vector<InstanceMeta> meta;
  std::vector<Trajectory> instances;

  std::size_t size() const { return instances.size(); }
  SpatialForm spatial_form() const { return params.ch_spatial_form; }
  /// Throws DatasetError unless every instance matches grid/frames/dt.
  void validate() const;
};

/// Builds a one-instance dataset around an existing trajectory.
Dataset single_instance(Trajectory traj, InstanceMeta meta, std::size_t substeps, double noise_amp);

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class FormatVersionError : public DatasetError {
 public:
  FormatVersionError(std::uint16_t major, std::uint16_t minor);
  std::uint16_t major, minor;
};
class TruncatedFileError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};
class ChecksumError : public DatasetError {
 public:
  /// instance = -1 means the header block.
  explicit ChecksumError(long instance);
  long instance;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SweepError : public std::runtime_error {
 public:
  SweepError(double c0, std::uint64_t seed, const std::string& cause);
  double c0;
  std::uint64_t seed;
};

/// One trajectory per combination, ordered by (c0, seed). Instances may run
/// on several threads; the result does not depend on the thread count.
Dataset run_sweep(const SweepSpec& spec, const SimParams& params, GridPtr grid, const SweepOptions& opts);

/// Deterministic shuffled split keyed by selection_seed. Both halves keep the
/// original (c0, seed) order. Requires 1 <= n_train < N.
std::pair<Dataset, Dataset> split(const Dataset& dataset, std::size_t n_train, std::uint64_t selection_seed);

/// CRC-64/XZ (ECMA-182 polynomial, reflected, all-ones init and xor-out).
std::uint64_t crc64(const void* data, std::size_t n);

std::vector<std::uint8_t> encode_dataset(const Dataset& dataset);
Dataset decode_dataset(const std::vector<std::uint8_t>& bytes);
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// Writes dir/manifest.json plus one .npy array of shape (T, nx, ny) per
/// instance and channel.
void export_npy(const Dataset& dataset, const std::filesystem::path& dir);
Dataset import_npy(const std::filesystem::path& dir);

/// Reads either a binary dataset file or an export directory.
Dataset load_any(const std::filesystem::path& path);

}  // namespace pfsim
