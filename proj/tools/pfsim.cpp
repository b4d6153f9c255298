// pfsim command-line entry point.
//
// Exit codes: 0 success, 1 unexpected failure, 2 configuration/usage error,
// 3 numerical blowup, 4 I/O or file-format error, 5 incompatible or
// degenerate evaluation inputs.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "image.hpp"
#include "pfsim/config.hpp"
#include "pfsim/dataset.hpp"
#include "pfsim/evolution.hpp"
#include "pfsim/manufactured.hpp"
#include "pfsim/residuals.hpp"
#include "pfsim/serialize.hpp"

namespace fs = std::filesystem;
using namespace pfsim;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kBlowup = 3, kIo = 4, kData = 5 };

class DataMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  bool machine = false;

  std::string out;
  std::string in;
  std::string truth;
  std::string backend;
  std::string spatial_form;
  std::optional<std::size_t> frames;
  std::optional<std::uint64_t> seed;
  std::optional<double> c0;
  std::optional<std::size_t> n_train;
  std::optional<std::uint64_t> selection_seed;
  bool plots = false;
  bool manufactured = false;
};

RunConfig resolve_config(const Options& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.frames) cfg.frames = *o.frames;
  if (o.seed) cfg.seed = *o.seed;
  if (o.c0) cfg.c0 = *o.c0;
  if (o.n_train) cfg.n_train = *o.n_train;
  if (o.selection_seed) cfg.selection_seed = *o.selection_seed;
  if (!o.backend.empty()) cfg.backend = o.backend;
  if (!o.out.empty()) cfg.out = o.out;
  if (o.plots) cfg.plots = true;
  if (!o.spatial_form.empty()) {
    try {
      cfg.params.ch_spatial_form = parse_spatial_form(o.spatial_form);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  cfg.validate();
  return cfg;
}

std::string num(double v, bool machine) {
  char buf[40];
  std::snprintf(buf, sizeof buf, machine ? "%.17e" : "%.3e", v);
  return buf;
}

void write_snapshots(const Dataset& d, const RunConfig& cfg, const fs::path& stem) {
  std::vector<std::size_t> frames = cfg.plot_frames;
  if (frames.empty()) frames = {0, d.frames - 1};
  for (std::size_t n = 0; n < d.size(); ++n) {
    for (std::size_t f : frames) {
      const auto& fr = d.instances[n].frames.at(f);
      const char* names[3] = {"c", "eta1", "eta2"};
      for (int ch = 0; ch < 3; ++ch) {
        char suffix[64];
        std::snprintf(suffix, sizeof suffix, "_i%03zu_%s_f%03zu.ppm", n, names[ch], f);
        tools::write_ppm(stem.string() + suffix, ch == 0 ? fr.c : fr.eta(ch));
      }
    }
  }
}

void report_warnings(const Dataset& d) {
  for (std::size_t n = 0; n < d.size(); ++n)
    for (const auto& w : d.instances[n].warnings) std::cerr << "warning: instance " << n << ": " << w << '\n';
}

int cmd_simulate(const Options& o) {
  const RunConfig cfg = resolve_config(o);
  const auto grid = cfg.grid();
  auto traj = simulate(make_initial(cfg.c0, cfg.seed, grid, cfg.noise_amp), cfg.params, cfg.frames, cfg.substeps);
  Dataset d = single_instance(std::move(traj), {cfg.c0, cfg.seed}, cfg.substeps, cfg.noise_amp);
  report_warnings(d);
  write_dataset(d, cfg.out);
  if (cfg.plots) write_snapshots(d, cfg, fs::path(cfg.out).replace_extension());
  std::cout << "wrote " << cfg.out << ": T=" << d.frames << ", grid " << grid->nx() << "x" << grid->ny()
            << ", frame dt=" << num(d.dt, o.machine) << '\n';
  return kOk;
}

int cmd_sweep(const Options& o) {
  RunConfig cfg = resolve_config(o);
  if (o.out.empty() && cfg.out == RunConfig{}.out) cfg.out = "sweep.pfds";
  const auto d = run_sweep(cfg.sweep, cfg.params, cfg.grid(), cfg.sweep_options());
  report_warnings(d);
  write_dataset(d, cfg.out);
  if (cfg.plots) write_snapshots(d, cfg, fs::path(cfg.out).replace_extension());
  std::cout << "wrote " << cfg.out << ": N=" << d.size() << ", T=" << d.frames << '\n';
  return kOk;
}

int cmd_split(const Options& o) {
  const RunConfig cfg = resolve_config(o);
  const auto d = load_any(o.in);
  auto [train, test] = split(d, cfg.n_train, cfg.selection_seed);
  const std::string prefix = o.out.empty() ? fs::path(o.in).replace_extension().string() : o.out;
  write_dataset(train, prefix + "_train.pfds");
  write_dataset(test, prefix + "_test.pfds");
  std::cout << "train " << train.size() << " -> " << prefix << "_train.pfds\n"
            << "test " << test.size() << " -> " << prefix << "_test.pfds\n";
  for (const auto& m : train.meta) std::cout << "train," << num(m.c0, o.machine) << ',' << m.seed << '\n';
  for (const auto& m : test.meta) std::cout << "test," << num(m.c0, o.machine) << ',' << m.seed << '\n';
  return kOk;
}

double rms(const Field2D& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s / static_cast<double>(f.size()));
}

int cmd_residual(const Options& o) {
  const RunConfig cfg = resolve_config(o);
  const auto d = load_any(o.in);
  const auto backend = cfg.deriv_backend();
  std::optional<SpatialForm> form;
  if (!o.spatial_form.empty()) form = parse_spatial_form(o.spatial_form);
  LossWeights w = cfg.weights;
  w.data_c = w.data_eta1 = w.data_eta2 = 0.0;

  std::ofstream csv;
  if (!o.out.empty()) {
    csv.open(o.out);
    if (!csv) throw IoError("cannot open '" + o.out + "' for writing");
    csv << "instance,frame,ch_rms,ac1_rms,ac2_rms\n";
  }
  nlohmann::json reports = nlohmann::json::array();
  for (std::size_t n = 0; n < d.size(); ++n) {
    const auto& tr = d.instances[n];
    if (csv.is_open()) {
      const auto ch = ch_residual(tr, backend, form);
      const auto a1 = ac_residual(tr, 1, backend);
      const auto a2 = ac_residual(tr, 2, backend);
      for (std::size_t f = 0; f < tr.size(); ++f) {
        csv << n << ',' << f << ',' << num(rms(ch[f]), true) << ',' << num(rms(a1[f]), true) << ','
            << num(rms(a2[f]), true) << '\n';
      }
    }
    auto rep = to_json(total_loss(tr, nullptr, w, backend, form));
    rep["instance"] = n;
    rep["c0"] = d.meta[n].c0;
    rep["seed"] = d.meta[n].seed;
    reports.push_back(rep);
  }
  std::cout << (o.machine ? reports.dump() : reports.dump(2)) << '\n';
  return kOk;
}

void require_compatible(const Dataset& pred, const Dataset& truth) {
  if (pred.size() != truth.size()) {
    throw DataMismatch("instance count mismatch: prediction has " + std::to_string(pred.size()) + ", truth has " +
                       std::to_string(truth.size()));
  }
  if (pred.frames != truth.frames) {
    throw DataMismatch("frame count mismatch: prediction has " + std::to_string(pred.frames) + ", truth has " +
                       std::to_string(truth.frames));
  }
  if (!pred.grid->same_shape(*truth.grid)) {
    throw DataMismatch("grid mismatch: prediction is " + std::to_string(pred.grid->nx()) + "x" +
                       std::to_string(pred.grid->ny()) + ", truth is " + std::to_string(truth.grid->nx()) + "x" +
                       std::to_string(truth.grid->ny()));
  }
}

int cmd_evaluate(const Options& o) {
  const RunConfig cfg = resolve_config(o);
  const auto pred = load_any(o.in);
  const auto truth = load_any(o.truth);
  require_compatible(pred, truth);
  const auto backend = cfg.deriv_backend();
  std::optional<SpatialForm> form;
  if (!o.spatial_form.empty()) form = parse_spatial_form(o.spatial_form);

  std::ofstream csv;
  if (!o.out.empty()) {
    csv.open(o.out);
    if (!csv) throw IoError("cannot open '" + o.out + "' for writing");
    csv << "instance,c0,seed,channel,relative_l2\n";
  }
  nlohmann::json reports = nlohmann::json::array();
  LossComponents mean{};
  for (std::size_t n = 0; n < pred.size(); ++n) {
    LossReport rep;
    try {
      rep = total_loss(pred.instances[n], &truth.instances[n], cfg.weights, backend, form);
    } catch (const UndefinedMetric& e) {
      throw DataMismatch(std::string("instance ") + std::to_string(n) + ": " + e.what());
    }
    if (csv.is_open()) {
      const double vals[3] = {rep.components.data_c, rep.components.data_eta1, rep.components.data_eta2};
      const char* names[3] = {"c", "eta1", "eta2"};
      for (int ch = 0; ch < 3; ++ch) {
        csv << n << ',' << num(truth.meta[n].c0, true) << ',' << truth.meta[n].seed << ',' << names[ch] << ','
            << num(vals[ch], true) << '\n';
      }
    }
    if (cfg.plots) {
      const auto stem = fs::path(o.out.empty() ? "evaluate" : o.out).replace_extension().string();
      const auto& p = pred.instances[n].frames.back();
      const auto& t = truth.instances[n].frames.back();
      const char* names[3] = {"c", "eta1", "eta2"};
      for (int ch = 0; ch < 3; ++ch) {
        const Field2D& a = ch == 0 ? p.c : p.eta(ch);
        const Field2D& b = ch == 0 ? t.c : t.eta(ch);
        char suffix[64];
        std::snprintf(suffix, sizeof suffix, "_i%03zu_%s_diff.ppm", n, names[ch]);
        tools::write_ppm(stem + suffix, a - b);
      }
    }
    const double inv = 1.0 / static_cast<double>(pred.size());
    mean.data_c += inv * rep.components.data_c;
    mean.data_eta1 += inv * rep.components.data_eta1;
    mean.data_eta2 += inv * rep.components.data_eta2;
    mean.pde_ch += inv * rep.components.pde_ch;
    mean.pde_ac1 += inv * rep.components.pde_ac1;
    mean.pde_ac2 += inv * rep.components.pde_ac2;
    auto j = to_json(rep);
    j["instance"] = n;
    reports.push_back(j);
  }
  nlohmann::json out{{"instances", reports},
                     {"mean",
                      {{"data_c", mean.data_c},
                       {"data_eta1", mean.data_eta1},
                       {"data_eta2", mean.data_eta2},
                       {"pde_ch", mean.pde_ch},
                       {"pde_ac1", mean.pde_ac1},
                       {"pde_ac2", mean.pde_ac2},
                       {"total", weighted_total(mean, cfg.weights)}}}};
  std::cout << (o.machine ? out.dump() : out.dump(2)) << '\n';
  return kOk;
}

int cmd_backend_compare(const Options& o) {
  const RunConfig cfg = resolve_config(o);
  Trajectory pred;
  std::optional<Trajectory> truth;
  LossWeights weights = cfg.weights;
  if (o.manufactured || o.in.empty()) {
    // Single-mode exact Cahn-Hilliard solution with eta = 0; no data terms.
    SimParams p = cfg.params;
    p.mobility_poly.clear();
    pred = manufactured_ch(cfg.grid(), p, 20, 0.01, 8, 0.01, cfg.c0);
  } else {
    const auto d = load_any(o.in);
    pred = d.instances.at(0);
    if (!o.truth.empty()) {
      const auto t = load_any(o.truth);
      require_compatible(d, t);
      truth = t.instances.at(0);
    }
  }
  if (!truth) weights.data_c = weights.data_eta1 = weights.data_eta2 = 0.0;
  std::optional<SpatialForm> form;
  if (!o.spatial_form.empty()) form = parse_spatial_form(o.spatial_form);

  const DerivBackend backends[3] = {DerivBackend::fdm(), DerivBackend::pseudo_spectral(),
                                    DerivBackend::fourier_extension(cfg.fext_pad)};
  const char* labels[3] = {"FDM (central)", "Pseudo-spectral", "Fourier extension"};
  std::ofstream csv;
  if (!o.out.empty()) {
    csv.open(o.out);
    if (!csv) throw IoError("cannot open '" + o.out + "' for writing");
    csv << "backend,data_eta1,data_eta2,data_c,pde_ac1,pde_ac2,pde_ch,total\n";
  }
  if (!o.machine) {
    std::printf("%-18s %10s %10s %10s %10s %10s %10s %10s\n", "method", "data_eta1", "data_eta2", "data_c", "pde_ac1",
                "pde_ac2", "pde_ch", "total");
  } else {
    std::cout << "backend,data_eta1,data_eta2,data_c,pde_ac1,pde_ac2,pde_ch,total\n";
  }
  for (int b = 0; b < 3; ++b) {
    const auto rep = total_loss(pred, truth ? &*truth : nullptr, weights, backends[b], form);
    const auto& c = rep.components;
    const double row[7] = {c.data_eta1, c.data_eta2, c.data_c, c.pde_ac1, c.pde_ac2, c.pde_ch, rep.total};
    const std::string tag(to_string(backends[b].tag));
    if (csv.is_open()) {
      csv << tag;
      for (double v : row) csv << ',' << num(v, true);
      csv << '\n';
    }
    if (o.machine) {
      std::cout << tag;
      for (double v : row) std::cout << ',' << num(v, true);
      std::cout << '\n';
    } else {
      std::printf("%-18s", labels[b]);
      for (double v : row) std::printf(" %10s", num(v, false).c_str());
      std::printf("\n");
    }
  }
  return kOk;
}

int cmd_export(const Options& o) {
  const auto d = load_any(o.in);
  const std::string dir = o.out.empty() ? fs::path(o.in).replace_extension().string() + "_npy" : o.out;
  export_npy(d, dir);
  std::cout << "exported " << d.size() << " instance(s) to " << dir << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pfsim: phase-field precipitate simulation and PDE residual evaluation"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "JSON (comments allowed) run configuration")->check(CLI::ExistingFile);
  app.add_flag("--machine", o.machine, "Machine-readable output with full-precision numbers");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output path");
    sub->add_option("--spatial-form", o.spatial_form, "Cahn-Hilliard fourth-order form")
        ->check(CLI::IsMember({"paper", "biharmonic"}));
  };
  auto add_backend = [&](CLI::App* sub) {
    sub->add_option("--backend", o.backend, "Derivative backend")->check(CLI::IsMember({"fdm", "pseudo", "fext"}));
  };

  auto* sim = app.add_subcommand("simulate", "Simulate one initial condition");
  add_common(sim);
  sim->add_option("--frames", o.frames, "Saved frames");
  sim->add_option("--seed", o.seed, "Initial-condition seed");
  sim->add_option("--c0", o.c0, "Supersaturation");
  sim->add_flag("--plots", o.plots, "Write PPM snapshots");

  auto* sweep = app.add_subcommand("sweep", "Run the (c0 x seed) sweep into one dataset");
  add_common(sweep);
  sweep->add_option("--frames", o.frames, "Saved frames");
  sweep->add_flag("--plots", o.plots, "Write PPM snapshots");

  auto* spl = app.add_subcommand("split", "Split a dataset into train/test files");
  spl->add_option("--in", o.in, "Dataset file or export directory")->required();
  spl->add_option("--out", o.out, "Output prefix");
  spl->add_option("--n-train", o.n_train, "Training instances");
  spl->add_option("--seed,--selection-seed", o.selection_seed, "Selection seed");

  auto* res = app.add_subcommand("residual", "PDE residual losses of every instance");
  add_common(res);
  add_backend(res);
  res->add_option("--in", o.in, "Dataset file or export directory")->required();

  auto* ev = app.add_subcommand("evaluate", "Score a prediction against ground truth");
  add_common(ev);
  add_backend(ev);
  ev->add_option("pred", o.in, "Prediction (dataset file or export directory)")->required();
  ev->add_option("truth", o.truth, "Ground truth (dataset file or export directory)")->required();
  ev->add_flag("--plots", o.plots, "Write final-frame difference images");

  auto* cmp = app.add_subcommand("backend-compare", "Loss table for every derivative backend");
  add_common(cmp);
  cmp->add_option("--in", o.in, "Trajectory to score (first instance)");
  cmp->add_option("--truth", o.truth, "Ground truth for the data terms");
  cmp->add_flag("--manufactured", o.manufactured, "Use an exact Cahn-Hilliard solution");
  cmp->add_option("--c0", o.c0, "Mean composition of the manufactured solution");

  auto* exp = app.add_subcommand("export", "Write .npy arrays plus manifest.json");
  exp->add_option("--in", o.in, "Dataset file")->required();
  exp->add_option("--out", o.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*sim) return cmd_simulate(o);
    if (*sweep) return cmd_sweep(o);
    if (*spl) return cmd_split(o);
    if (*res) return cmd_residual(o);
    if (*ev) return cmd_evaluate(o);
    if (*cmp) return cmd_backend_compare(o);
    if (*exp) return cmd_export(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IntegrationBlowup& e) {
    std::cerr << "numerical blowup: " << e.what() << '\n';
    return kBlowup;
  } catch (const SweepError& e) {
    std::cerr << "numerical blowup: " << e.what() << '\n';
    return kBlowup;
  } catch (const DataMismatch& e) {
    std::cerr << "incompatible inputs: " << e.what() << '\n';
    return kData;
  } catch (const UndefinedMetric& e) {
    std::cerr << "incompatible inputs: " << e.what() << '\n';
    return kData;
  } catch (const DatasetError& e) {
    std::cerr << "file format error: " << e.what() << '\n';
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
