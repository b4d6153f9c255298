#include "pfsim/config.hpp"

#include <cstdlib>
#include <fstream>

namespace pfsim {

using nlohmann::json;

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace

std::size_t env_thread_count(std::size_t fallback) {
  if (const char* v = std::getenv("PFSIM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return fallback;
}

SweepOptions RunConfig::sweep_options() const {
  return {frames, substeps, noise_amp, threads == 0 ? env_thread_count(1) : threads};
}

void RunConfig::validate() const {
  try {
    Grid2D(nx, ny, lx, ly);
    params.validate();
    weights.validate();
    deriv_backend().validate();
    if (!(c0 > 0.0 && c0 < 1.0)) throw std::invalid_argument("initial.c0 must lie in (0, 1)");
    if (!(noise_amp >= 0.0)) throw std::invalid_argument("initial.noise_amp must be >= 0");
    if (frames < 2) throw std::invalid_argument("time.frames must be >= 2");
    if (substeps < 1) throw std::invalid_argument("time.substeps must be >= 1");
    sweep.combinations();
    for (double v : sweep.supersaturations) {
      if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("sweep.supersaturations must lie in (0, 1)");
    }
    for (auto f : plot_frames) {
      if (f >= frames) throw std::invalid_argument("output.plot_frames entry exceeds the frame count");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

RunConfig config_from_json(const json& j) {
  require_known_keys(j, {"grid", "physics", "time", "initial", "sweep", "split", "loss", "output", "trainer"}, "config");
  RunConfig c;
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    require_known_keys(g, {"nx", "ny", "lx", "ly"}, "grid");
    read_opt(g, "nx", c.nx, "grid");
    read_opt(g, "ny", c.ny, "grid");
    c.lx = static_cast<double>(c.nx);
    c.ly = static_cast<double>(c.ny);
    read_opt(g, "lx", c.lx, "grid");
    read_opt(g, "ly", c.ly, "grid");
  }
  if (j.contains("physics")) c.params = params_from_json(j["physics"]);
  if (j.contains("time")) {
    const auto& t = j["time"];
    require_known_keys(t, {"dt", "substeps", "frames"}, "time");
    read_opt(t, "dt", c.params.dt, "time");
    read_opt(t, "substeps", c.substeps, "time");
    read_opt(t, "frames", c.frames, "time");
  }
  if (j.contains("initial")) {
    const auto& i = j["initial"];
    require_known_keys(i, {"c0", "seed", "noise_amp"}, "initial");
    read_opt(i, "c0", c.c0, "initial");
    read_opt(i, "seed", c.seed, "initial");
    read_opt(i, "noise_amp", c.noise_amp, "initial");
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    require_known_keys(s, {"supersaturations", "seeds", "cross", "threads"}, "sweep");
    read_opt(s, "supersaturations", c.sweep.supersaturations, "sweep");
    read_opt(s, "seeds", c.sweep.seeds, "sweep");
    read_opt(s, "cross", c.sweep.cross, "sweep");
    read_opt(s, "threads", c.threads, "sweep");
  }
  if (j.contains("split")) {
    const auto& s = j["split"];
    require_known_keys(s, {"n_train", "selection_seed"}, "split");
    read_opt(s, "n_train", c.n_train, "split");
    read_opt(s, "selection_seed", c.selection_seed, "split");
  }
  if (j.contains("loss")) {
    const auto& l = j["loss"];
    require_known_keys(l, {"weights", "backend", "fext_pad"}, "loss");
    if (l.contains("weights")) c.weights = weights_from_json(l["weights"]);
    read_opt(l, "backend", c.backend, "loss");
    read_opt(l, "fext_pad", c.fext_pad, "loss");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    require_known_keys(o, {"path", "plots", "plot_frames"}, "output");
    read_opt(o, "path", c.out, "output");
    read_opt(o, "plots", c.plots, "output");
    read_opt(o, "plot_frames", c.plot_frames, "output");
  }
  if (j.contains("trainer")) {
    if (!j["trainer"].is_object()) throw ConfigError("trainer: expected an object");
    c.trainer = j["trainer"];
  }
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  json physics = to_json(c.params);
  physics.erase("dt");
  return {{"grid", {{"nx", c.nx}, {"ny", c.ny}, {"lx", c.lx}, {"ly", c.ly}}},
          {"physics", physics},
          {"time", {{"dt", c.params.dt}, {"substeps", c.substeps}, {"frames", c.frames}}},
          {"initial", {{"c0", c.c0}, {"seed", c.seed}, {"noise_amp", c.noise_amp}}},
          {"sweep",
           {{"supersaturations", c.sweep.supersaturations},
            {"seeds", c.sweep.seeds},
            {"cross", c.sweep.cross},
            {"threads", c.threads}}},
          {"split", {{"n_train", c.n_train}, {"selection_seed", c.selection_seed}}},
          {"loss", {{"weights", to_json(c.weights)}, {"backend", c.backend}, {"fext_pad", c.fext_pad}}},
          {"output", {{"path", c.out}, {"plots", c.plots}, {"plot_frames", c.plot_frames}}},
          {"trainer", c.trainer}};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace pfsim
