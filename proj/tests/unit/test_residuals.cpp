#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "pfsim/energetics.hpp"
#include "pfsim/evolution.hpp"
#include "pfsim/fft.hpp"
#include "pfsim/manufactured.hpp"
#include "pfsim/residuals.hpp"

using namespace pfsim;
using namespace pfsim::test;

namespace {

// c = c0 + A g(t) sin(k x) with g quadratic, so every time stencil is exact.
double g_of(double t) { return 1.0 + 2.0 * t - 3.0 * t * t; }
double g_dot(double t) { return 2.0 - 6.0 * t; }

Trajectory quadratic_ch(const GridPtr& grid, const SimParams& p, int mode, double A, double c0, std::size_t frames,
                        double dt) {
  const double k = 2 * kPi * mode / grid->lx();
  Trajectory t;
  t.dt = dt;
  t.params = p;
  for (std::size_t f = 0; f < frames; ++f) {
    const double time = static_cast<double>(f) * dt;
    t.frames.push_back(FieldSet{sample(grid, [&](double x, double) { return c0 + A * g_of(time) * std::sin(k * x); }),
                                Field2D(grid), Field2D(grid), time});
  }
  return t;
}

Trajectory quadratic_ac(const GridPtr& grid, const SimParams& p, int mode, double A, double c0, std::size_t frames,
                        double dt) {
  const double k = 2 * kPi * mode / grid->lx();
  Trajectory t;
  t.dt = dt;
  t.params = p;
  for (std::size_t f = 0; f < frames; ++f) {
    const double time = static_cast<double>(f) * dt;
    t.frames.push_back(FieldSet{Field2D(grid, c0),
                                sample(grid, [&](double x, double) { return A * g_of(time) * std::sin(k * x); }),
                                Field2D(grid), time});
  }
  return t;
}

Trajectory scaled(const Trajectory& t, double s) {
  Trajectory out = t;
  for (auto& f : out.frames) {
    f.c *= s;
    f.eta1 *= s;
    f.eta2 *= s;
  }
  return out;
}

Trajectory random_traj(const GridPtr& g, std::mt19937_64& rng, std::size_t frames) {
  Trajectory t;
  t.dt = 0.1;
  for (std::size_t f = 0; f < frames; ++f)
    t.frames.push_back(FieldSet{random_field(g, rng, 0.1, 0.3), random_field(g, rng), random_field(g, rng),
                                0.1 * static_cast<double>(f)});
  return t;
}

}  // namespace

TEST_CASE("stationary uniform trajectory has zero residual and loss") {
  const auto g = Grid2D::unit(16, 16);
  Trajectory t;
  t.dt = 0.5;
  for (int f = 0; f < 4; ++f) t.frames.push_back(FieldSet{Field2D(g, 0.2), Field2D(g), Field2D(g), 0.5 * f});
  for (auto b : {DerivBackend::fdm(), DerivBackend::pseudo_spectral()}) {
    for (const auto& r : ch_residual(t, b)) CHECK(r.max_abs() < 1e-15);
    for (const auto& r : ac_residual(t, 1, b)) CHECK(r.max_abs() == 0.0);
    const auto rep = total_loss(t, nullptr, LossWeights{0, 0, 0, 0.1, 1, 1}, b);
    CHECK(rep.components.pde_ch < 1e-28);
    CHECK(rep.components.pde_ac1 == 0.0);
    CHECK(rep.total < 1e-28);
  }
}

TEST_CASE("CH residual of a single mode matches the analytic residual") {
  const auto g = Grid2D::unit(64, 64);
  SimParams p;
  p.mobility_m = 0.8;
  p.kappa_c = 1.7;
  const int mode = 3;
  const double A = 0.02, c0 = 0.2, dt = 0.1;
  const auto t = quadratic_ch(g, p, mode, A, c0, 8, dt);
  const double k = 2 * kPi * mode / 64.0;

  // Spectral symbols are k^2 and k^4; the 3- and 5-point stencils have
  // (2 - 2 cos k)/h^2 and its square.
  const double fd2 = 2.0 - 2.0 * std::cos(k);
  struct Case {
    DerivBackend b;
    double k2, k4;
  } cases[] = {{DerivBackend::pseudo_spectral(), k * k, std::pow(k, 4)}, {DerivBackend::fdm(), fd2, fd2 * fd2}};
  for (const auto& cs : cases) {
    const double rate = p.mobility_m * cs.k2 * 2 * p.bulk.a1 + 2 * p.kappa_c * p.mobility_m * cs.k4;
    for (auto form : {SpatialForm::FullBiharmonic, SpatialForm::PaperLiteral}) {
      const auto r = ch_residual(t, cs.b, form);
      for (std::size_t f = 0; f < t.size(); ++f) {
        const double time = static_cast<double>(f) * dt;
        const auto expect =
            sample(g, [&](double x, double) { return A * (g_dot(time) + rate * g_of(time)) * std::sin(k * x); });
        CHECK(max_abs_diff(r[f], expect) < 1e-12);
      }
    }
  }
}

TEST_CASE("AC residual of a single mode matches the analytic residual") {
  const auto g = Grid2D::unit(64, 64);
  SimParams p;
  p.kinetic_l = 1.3;
  p.kappa_eta = 0.6;
  const int mode = 2;
  const double A = 0.3, c0 = 0.21, dt = 0.05;
  const auto t = quadratic_ac(g, p, mode, A, c0, 6, dt);
  const double k = 2 * kPi * mode / 64.0;
  // eta^2 = a^2 (1 - cos 2kx)/2, whose only non-zero wavevector points along x.
  const double b11 = elastic_kernel({1.0, 0.0}, p.elastic)[0][0];
  const auto r = ac_residual(t, 1, DerivBackend::pseudo_spectral());
  const auto r2 = ac_residual(t, 2, DerivBackend::pseudo_spectral());
  for (std::size_t f = 0; f < t.size(); ++f) {
    const double time = static_cast<double>(f) * dt;
    const double a = A * g_of(time), adot = A * g_dot(time);
    const auto expect = sample(g, [&](double x, double) {
      const double s = std::sin(k * x);
      const double e = a * s;
      const double bulk = df_deta(c0, e, 0.0, p.bulk);
      const double grad = 2 * p.kappa_eta * k * k * e;
      const double el = 2 * e * b11 * (-a * a * std::cos(2 * k * x) / 2);
      return adot * s + p.kinetic_l * (bulk + grad + el);
    });
    CHECK(max_abs_diff(r[f], expect) < 1e-12);
    CHECK(r2[f].max_abs() == 0.0);
  }
}

TEST_CASE("manufactured CH solution leaves only the time discretisation error") {
  const auto g = Grid2D::unit(64, 64);
  const SimParams p;
  const double rate = manufactured_ch_rate(*g, p, 8);
  const double k = 2 * kPi * 8 / 64.0;
  CHECK(rate == doctest::Approx(k * k * 2 + 2 * std::pow(k, 4)).epsilon(1e-14));
  for (double dt : {0.02, 0.01}) {
    const auto t = manufactured_ch(g, p, 20, dt, 8, 0.01, 0.2);
    const auto r = ch_residual(t, DerivBackend::pseudo_spectral());
    // interior central difference error: A rate^3 dt^2 / 6 e^{-rate t}
    for (std::size_t f = 1; f + 1 < t.size(); ++f) {
      const double bound = 0.01 * std::pow(rate, 3) * dt * dt / 6.0 * std::exp(-rate * (static_cast<double>(f) - 1) * dt);
      CHECK(r[f].max_abs() <= 1.01 * bound);
    }
  }
}

TEST_CASE("semi-implicit trajectories have small AC residuals") {
  const auto g = Grid2D::unit(32, 32);
  SimParams p;
  p.dt = 1e-3;
  const auto t = simulate(make_initial(0.2, 494, g, 0.05), p, 8, 1);
  const auto b = DerivBackend::pseudo_spectral();
  const auto e1t = time_deriv(std::span<const Field2D>(t.channel(1)), t.dt, b);
  CHECK(pde_loss(ac_residual(t, 1, b), e1t) < 1e-3);
}

TEST_CASE("pde_loss normalises by the time derivative") {
  const auto g = Grid2D::unit(8, 8);
  const std::vector<Field2D> r{Field2D(g, 2.0), Field2D(g, 2.0)};
  const std::vector<Field2D> ut{Field2D(g, 4.0), Field2D(g, 4.0)};
  CHECK(pde_loss(r, ut) == doctest::Approx(0.25));
  CHECK(pde_loss(r, {Field2D(g), Field2D(g)}) == doctest::Approx(4.0));
  CHECK_THROWS_AS(pde_loss(r, {Field2D(g)}), std::invalid_argument);
}

TEST_CASE("data loss is a relative L2 over the whole tensor") {
  const auto g = Grid2D::unit(16, 16);
  std::mt19937_64 rng(31);
  const auto truth = random_traj(g, rng, 4);
  CHECK(data_loss(truth, truth, Channel::C) == 0.0);
  const auto pred = scaled(truth, 1.1);
  for (auto ch : {Channel::C, Channel::Eta1, Channel::Eta2})
    CHECK(data_loss(pred, truth, ch) == doctest::Approx(0.1).epsilon(1e-12));

  auto zero = truth;
  for (auto& f : zero.frames) f.eta2 = Field2D(g);
  CHECK_THROWS_AS(data_loss(pred, zero, Channel::Eta2), UndefinedMetric);

  auto shorter = truth;
  shorter.frames.pop_back();
  CHECK_THROWS_AS(data_loss(pred, shorter, Channel::C), std::invalid_argument);

  auto bad = pred;
  bad.frames[2].eta1[7] = NAN;
  CHECK_THROWS_AS(data_loss(bad, truth, Channel::Eta1), std::invalid_argument);
}

TEST_CASE("total loss requires truth for data terms") {
  const auto g = Grid2D::unit(16, 16);
  std::mt19937_64 rng(32);
  const auto t = random_traj(g, rng, 4);
  CHECK_THROWS_AS(total_loss(t, nullptr, LossWeights{}, DerivBackend::pseudo_spectral()), std::invalid_argument);
  LossWeights neg;
  neg.pde_ac1 = -1;
  CHECK_THROWS_AS(total_loss(t, &t, neg, DerivBackend::pseudo_spectral()), std::invalid_argument);

  const auto rep = total_loss(scaled(t, 1.1), &t, LossWeights{}, DerivBackend::pseudo_spectral());
  CHECK(rep.components.data_c == doctest::Approx(0.1));
  CHECK(rep.total == weighted_total(rep.components, rep.weights));
  CHECK(rep.frames == 4);
  CHECK(rep.nx == 16);

  // zero-weight channel with an all-zero truth is reported as 0
  auto zero = t;
  for (auto& f : zero.frames) f.eta2 = Field2D(g);
  LossWeights w;
  w.data_eta2 = 0.0;
  CHECK(total_loss(t, &zero, w, DerivBackend::fdm()).components.data_eta2 == 0.0);
  w.data_eta2 = 1.0;
  CHECK_THROWS_AS(total_loss(t, &zero, w, DerivBackend::fdm()), UndefinedMetric);
}

TEST_CASE("spatial form mismatch is flagged") {
  const auto g = Grid2D::unit(16, 16);
  std::mt19937_64 rng(33);
  auto t = random_traj(g, rng, 3);
  const auto w = LossWeights{0, 0, 0, 0.1, 1, 1};
  CHECK_FALSE(total_loss(t, nullptr, w, DerivBackend::pseudo_spectral()).spatial_form_mismatch);
  const auto rep = total_loss(t, nullptr, w, DerivBackend::pseudo_spectral(), SpatialForm::PaperLiteral);
  CHECK(rep.spatial_form_mismatch);
  CHECK(rep.spatial_form == SpatialForm::PaperLiteral);
}

TEST_CASE("biharmonic by composition equals the single k^4 multiplier") {
  const auto g = Grid2D::unit(64, 64);
  std::mt19937_64 rng(34);
  const auto c = random_field(g, rng);
  const auto b = DerivBackend::pseudo_spectral();
  const auto composed = laplacian(laplacian(c, b), b);
  auto s = fft::forward(c);
  for (std::size_t i = 0; i < g->nx(); ++i)
    for (std::size_t j = 0; j < g->ny(); ++j) {
      const double k2 = g->kx()[i] * g->kx()[i] + g->ky()[j] * g->ky()[j];
      s.coeffs[g->index(i, j)] *= k2 * k2;
    }
  const auto direct = fft::inverse_real(s);
  CHECK(max_abs_diff(composed, direct) < 1e-10);

  const auto split = deriv(c, Axis::X, 4, b) + deriv(c, Axis::Y, 4, b) +
                     2.0 * deriv(deriv(c, Axis::Y, 2, b), Axis::X, 2, b);
  CHECK(max_abs_diff(split, direct) < 1e-10);
}

TEST_CASE("weighted total accumulates in a fixed order") {
  const LossComponents c{1, 2, 3, 4, 5, 6};
  CHECK(weighted_total(c, LossWeights{}) == doctest::Approx(1 + 2 + 3 + 0.4 + 5 + 6));
  CHECK(weighted_total(c, LossWeights::zero()) == 0.0);
}

TEST_CASE("pseudo-spectral loss row from the derivative comparison table") {
  // Printed order: data eta1, data eta2, data c, AC eta1, AC eta2, CH.
  LossComponents c;
  c.data_eta1 = 5.33e-3;
  c.data_eta2 = 3.53e-3;
  c.data_c = 1.91e-2;
  c.pde_ac1 = 1.13e-3;
  c.pde_ac2 = 5.40e-4;
  c.pde_ch = 1.05e-1;
  const double total = weighted_total(c, LossWeights{});
  double expect = 0.0;
  expect += 1.91e-2;
  expect += 5.33e-3;
  expect += 3.53e-3;
  expect += 0.1 * 1.05e-1;
  expect += 1.13e-3;
  expect += 5.40e-4;
  CHECK(total == expect);
  CHECK(total == doctest::Approx(4.013e-2).epsilon(1e-12));
  MESSAGE("weighted sum " << total << " vs printed 4.03e-2, difference " << total - 4.03e-2);
}

TEST_CASE("residuals reject unusable trajectories") {
  const auto g = Grid2D::unit(16, 16);
  std::mt19937_64 rng(35);
  auto t = random_traj(g, rng, 2);
  CHECK_THROWS_AS(ch_residual(t, DerivBackend::fdm()), std::invalid_argument);
  t = random_traj(g, rng, 3);
  CHECK_THROWS_AS(ac_residual(t, 3, DerivBackend::fdm()), std::invalid_argument);
  t.frames[1].c[0] = INFINITY;
  CHECK_THROWS_AS(ch_residual(t, DerivBackend::pseudo_spectral()), std::invalid_argument);
}

TEST_CASE("zero trajectory with zero weights gives an all-zero row") {
  const auto g = Grid2D::unit(16, 16);
  Trajectory t;
  t.dt = 0.5;
  for (int f = 0; f < 5; ++f) t.frames.push_back(FieldSet{Field2D(g), Field2D(g), Field2D(g), 0.5 * f});
  for (auto b : {DerivBackend::fdm(), DerivBackend::pseudo_spectral(), DerivBackend::fourier_extension()}) {
    const auto rep = total_loss(t, nullptr, LossWeights::zero(), b);
    const auto& c = rep.components;
    CHECK(c.data_c == 0.0);
    CHECK(c.pde_ch == 0.0);
    CHECK(c.pde_ac1 == 0.0);
    CHECK(c.pde_ac2 == 0.0);
    CHECK(rep.total == 0.0);
  }
}

TEST_CASE("fourth-order term dominates the FDM row on rough fields") {
  const auto g = Grid2D::unit(32, 32);
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 3; ++trial) {
    auto pred = random_traj(g, rng, 10);
    const auto truth = random_traj(g, rng, 10);
    const auto rep = total_loss(pred, &truth, LossWeights{}, DerivBackend::fdm());
    const auto& c = rep.components;
    const double others = std::max({c.data_c, c.data_eta1, c.data_eta2, c.pde_ac1, c.pde_ac2});
    CHECK(c.pde_ch > 10.0 * others);
  }
}

TEST_CASE("doubling one predicted channel gives data loss 1 on that channel only") {
  const auto g = Grid2D::unit(16, 16);
  std::mt19937_64 rng(37);
  const auto truth = random_traj(g, rng, 4);
  auto pred = truth;
  for (auto& f : pred.frames) f.eta2 *= 2.0;
  CHECK(data_loss(pred, truth, Channel::Eta2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(data_loss(pred, truth, Channel::C) == 0.0);
  CHECK(data_loss(pred, truth, Channel::Eta1) == 0.0);
}
