#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfsim/dataset.hpp"
#include "pfsim/residuals.hpp"
#include "pfsim/serialize.hpp"
#include "pfsim/spectral.hpp"

namespace pfsim {

/// Everything a CLI run needs, validated up front. The on-disk form is JSON
/// with // comments allowed; see configs/default.jsonc.
struct RunConfig {
  std::size_t nx = 128, ny = 128;
  double lx = 128.0, ly = 128.0;

  SimParams params;
  std::size_t frames = 100;
  std::size_t substeps = 10;

  double c0 = 0.20;
  std::uint64_t seed = 494;
  double noise_amp = 0.01;

  SweepSpec sweep = SweepSpec::reference();
  std::size_t threads = 0;  // 0 = PFSIM_THREADS env var, else 1

  std::size_t n_train = 12;
  std::uint64_t selection_seed = 0;

  LossWeights weights;
  std::string backend = "pseudo";
  std::size_t fext_pad = DerivBackend::kDefaultPad;

  std::string out = "trajectory.pfds";
  bool plots = false;
  std::vector<std::size_t> plot_frames;  // empty = first and last

  /// Settings for the surrogate trainer; carried through untouched.
  nlohmann::json trainer = nlohmann::json::object();

  GridPtr grid() const { return Grid2D::make(nx, ny, lx, ly); }
  DerivBackend deriv_backend() const { return parse_backend(backend, fext_pad); }
  SweepOptions sweep_options() const;
  /// Throws ConfigError on any invalid value.
  void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
/// Parses a JSON-with-comments file. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Thread count from PFSIM_THREADS, or fallback when unset/invalid.
std::size_t env_thread_count(std::size_t fallback = 1);

}  // namespace pfsim
