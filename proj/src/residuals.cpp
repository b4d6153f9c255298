#include "pfsim/residuals.hpp"

#include <cmath>

#include "pfsim/energetics.hpp"

namespace pfsim {
namespace {

void require_finite_inputs(const Trajectory& traj, const char* what) {
  if (traj.frames.empty()) throw std::invalid_argument(std::string(what) + ": empty trajectory");
  for (std::size_t f = 0; f < traj.frames.size(); ++f) {
    traj.frames[f].validate();
    require_same_grid(traj.frames[0].c, traj.frames[f].c, what);
    if (!traj.frames[f].all_finite()) {
      throw std::invalid_argument(std::string(what) + ": non-finite value in frame " + std::to_string(f));
    }
  }
}

void require_residual_inputs(const Trajectory& traj, const char* what) {
  require_finite_inputs(traj, what);
  if (traj.frames.size() < 3) throw std::invalid_argument(std::string(what) + ": need at least 3 frames");
  if (!(traj.dt > 0.0)) throw std::invalid_argument(std::string(what) + ": trajectory dt must be positive");
}

Field2D fourth_order_term(const Field2D& c, SpatialForm form, const DerivBackend& b) {
  Field2D k4 = deriv(c, Axis::X, 4, b) + deriv(c, Axis::Y, 4, b);
  if (form == SpatialForm::FullBiharmonic) k4 += 2.0 * deriv(deriv(c, Axis::Y, 2, b), Axis::X, 2, b);
  return k4;
}

}  // namespace

std::string_view to_string(Channel ch) {
  switch (ch) {
    case Channel::C: return "c";
    case Channel::Eta1: return "eta1";
    case Channel::Eta2: return "eta2";
  }
  return "?";
}

void LossWeights::validate() const {
  for (double w : {data_c, data_eta1, data_eta2, pde_ch, pde_ac1, pde_ac2}) {
    if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("loss weights must be finite and >= 0");
  }
}

double weighted_total(const LossComponents& c, const LossWeights& w) {
  double t = 0.0;
  t += w.data_c * c.data_c;
  t += w.data_eta1 * c.data_eta1;
  t += w.data_eta2 * c.data_eta2;
  t += w.pde_ch * c.pde_ch;
  t += w.pde_ac1 * c.pde_ac1;
  t += w.pde_ac2 * c.pde_ac2;
  return t;
}

std::vector<Field2D> ch_residual(const Trajectory& traj, const DerivBackend& backend,
                                 std::optional<SpatialForm> spatial_form) {
  require_residual_inputs(traj, "ch_residual");
  backend.validate();
  const auto& p = traj.params;
  const SpatialForm form = spatial_form.value_or(p.ch_spatial_form);
  if (!p.constant_mobility() && form != SpatialForm::FullBiharmonic) {
    throw std::invalid_argument("ch_residual: concentration-dependent mobility requires the biharmonic form");
  }
  const auto c = traj.channel(0);
  auto out = time_deriv(std::span<const Field2D>(c), traj.dt, backend);
  for (std::size_t f = 0; f < traj.frames.size(); ++f) {
    const auto& fr = traj.frames[f];
    const Field2D fc = df_dc(fr.c, fr.eta1, fr.eta2, p.bulk);
    Field2D& r = out[f];
    if (p.constant_mobility()) {
      r -= p.mobility_m * laplacian(fc, backend);
      r += 2.0 * p.kappa_c * p.mobility_m * fourth_order_term(fr.c, form, backend);
    } else {
      const Field2D mu = fc - 2.0 * p.kappa_c * laplacian(fr.c, backend);
      Field2D gx = deriv(mu, Axis::X, 1, backend);
      Field2D gy = deriv(mu, Axis::Y, 1, backend);
      for (std::size_t m = 0; m < gx.size(); ++m) {
        const double mob = p.mobility(fr.c[m]);
        gx[m] *= mob;
        gy[m] *= mob;
      }
      r -= deriv(gx, Axis::X, 1, backend) + deriv(gy, Axis::Y, 1, backend);
    }
  }
  return out;
}

std::vector<Field2D> ac_residual(const Trajectory& traj, int variant, const DerivBackend& backend) {
  if (variant != 1 && variant != 2) throw std::invalid_argument("ac_residual: variant must be 1 or 2");
  require_residual_inputs(traj, "ac_residual");
  backend.validate();
  const auto& p = traj.params;
  const ElasticKernelTable table(traj.frames[0].c.grid_ptr(), p.elastic);
  const auto eta = traj.channel(variant);
  auto out = time_deriv(std::span<const Field2D>(eta), traj.dt, backend);
  for (std::size_t f = 0; f < traj.frames.size(); ++f) {
    const auto& fr = traj.frames[f];
    Field2D drive = df_deta(fr.c, fr.eta1, fr.eta2, p.bulk, variant);
    drive -= 2.0 * p.kappa_eta * laplacian(fr.eta(variant), backend);
    const ElasticForce el = elastic_driving_force(fr.eta1, fr.eta2, table);
    drive += variant == 1 ? el.eta1 : el.eta2;
    out[f] += p.kinetic_l * drive;
  }
  return out;
}

double pde_loss(const std::vector<Field2D>& residual, const std::vector<Field2D>& time_derivative) {
  if (residual.size() != time_derivative.size()) throw std::invalid_argument("pde_loss: frame count mismatch");
  double rr = 0.0, tt = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < residual.size(); ++f) {
    require_same_grid(residual[f], time_derivative[f], "pde_loss");
    for (std::size_t m = 0; m < residual[f].size(); ++m) {
      rr += residual[f][m] * residual[f][m];
      tt += time_derivative[f][m] * time_derivative[f][m];
    }
    count += residual[f].size();
  }
  if (count == 0) throw std::invalid_argument("pde_loss: empty residual");
  const double n = static_cast<double>(count);
  return tt > 0.0 ? (rr / n) / (tt / n) : rr / n;
}

double data_loss(const Trajectory& pred, const Trajectory& truth, Channel channel) {
  if (pred.frames.size() != truth.frames.size()) {
    throw std::invalid_argument("data_loss: frame count mismatch (" + std::to_string(pred.frames.size()) + " vs " +
                                std::to_string(truth.frames.size()) + ")");
  }
  require_finite_inputs(pred, "data_loss");
  require_finite_inputs(truth, "data_loss");
  const int ch = static_cast<int>(channel);
  double diff = 0.0, ref = 0.0;
  for (std::size_t f = 0; f < pred.frames.size(); ++f) {
    const Field2D& a = ch == 0 ? pred.frames[f].c : pred.frames[f].eta(ch);
    const Field2D& b = ch == 0 ? truth.frames[f].c : truth.frames[f].eta(ch);
    require_same_grid(a, b, "data_loss");
    for (std::size_t m = 0; m < a.size(); ++m) {
      const double d = a[m] - b[m];
      diff += d * d;
      ref += b[m] * b[m];
    }
  }
  if (ref == 0.0) {
    throw UndefinedMetric("data_loss: truth channel '" + std::string(to_string(channel)) + "' has zero norm");
  }
  return std::sqrt(diff) / std::sqrt(ref);
}

LossReport total_loss(const Trajectory& pred, const Trajectory* truth, const LossWeights& weights,
                      const DerivBackend& backend, std::optional<SpatialForm> spatial_form) {
  weights.validate();
  backend.validate();
  if (weights.any_data() && truth == nullptr) {
    throw std::invalid_argument("total_loss: data weights are positive but no ground truth was given");
  }
  LossReport rep;
  rep.weights = weights;
  rep.backend = backend;
  rep.spatial_form = spatial_form.value_or(pred.params.ch_spatial_form);
  rep.spatial_form_mismatch = rep.spatial_form != pred.params.ch_spatial_form;
  rep.nx = pred.grid().nx();
  rep.ny = pred.grid().ny();
  rep.frames = pred.frames.size();
  rep.dt = pred.dt;

  auto& c = rep.components;
  if (truth != nullptr) {
    // A zero-weight channel with an all-zero truth is not an error.
    auto safe = [&](Channel ch, double w) {
      try {
        return data_loss(pred, *truth, ch);
      } catch (const UndefinedMetric&) {
        if (w > 0.0) throw;
        return 0.0;
      }
    };
    c.data_c = safe(Channel::C, weights.data_c);
    c.data_eta1 = safe(Channel::Eta1, weights.data_eta1);
    c.data_eta2 = safe(Channel::Eta2, weights.data_eta2);
  }
  const auto ct = time_deriv(std::span<const Field2D>(pred.channel(0)), pred.dt, backend);
  const auto e1t = time_deriv(std::span<const Field2D>(pred.channel(1)), pred.dt, backend);
  const auto e2t = time_deriv(std::span<const Field2D>(pred.channel(2)), pred.dt, backend);
  c.pde_ch = pde_loss(ch_residual(pred, backend, rep.spatial_form), ct);
  c.pde_ac1 = pde_loss(ac_residual(pred, 1, backend), e1t);
  c.pde_ac2 = pde_loss(ac_residual(pred, 2, backend), e2t);
  rep.total = weighted_total(c, weights);
  return rep;
}

}  // namespace pfsim
