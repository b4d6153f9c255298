#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "pfsim/energetics.hpp"
#include "pfsim/evolution.hpp"
#include "pfsim/fft.hpp"

using namespace pfsim;
using namespace pfsim::test;

namespace {

Field2D shift(const Field2D& f, std::size_t di, std::size_t dj) {
  const auto& g = f.grid();
  Field2D out(f.grid_ptr());
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j) out((i + di) % g.nx(), (j + dj) % g.ny()) = f(i, j);
  return out;
}

Field2D transpose(const Field2D& f) {
  Field2D out(f.grid_ptr());
  for (std::size_t i = 0; i < f.grid().nx(); ++i)
    for (std::size_t j = 0; j < f.grid().ny(); ++j) out(j, i) = f(i, j);
  return out;
}

FieldSet smooth_state(const GridPtr& g) {
  const double k = 2 * kPi / g->lx();
  return FieldSet{sample(g, [&](double x, double y) { return 0.3 + 0.05 * std::sin(k * x) * std::cos(2 * k * y); }),
                  sample(g, [&](double x, double y) { return 0.4 * std::cos(k * x + 0.3) + 0.1 * std::sin(k * y); }),
                  sample(g, [&](double x, double y) { return -0.3 * std::sin(2 * k * y) + 0.05 * std::cos(k * x); }),
                  0.0};
}

}  // namespace

TEST_CASE("make_initial is deterministic and bounded") {
  const auto g = Grid2D::unit(32, 32);
  const auto a = make_initial(0.22, 1482, g, 0.01);
  const auto b = make_initial(0.22, 1482, g, 0.01);
  const auto c = make_initial(0.22, 1483, g, 0.01);
  CHECK(bitwise_equal(a.c, b.c));
  CHECK(bitwise_equal(a.eta2, b.eta2));
  CHECK_FALSE(bitwise_equal(a.c, c.c));
  CHECK_FALSE(bitwise_equal(a.eta1, a.eta2));
  for (std::size_t m = 0; m < g->size(); ++m) {
    CHECK(std::abs(a.c[m] - 0.22) <= 0.01);
    CHECK(std::abs(a.eta1[m]) <= 0.01);
  }
  CHECK(a.c.mean() == doctest::Approx(0.22).epsilon(1e-3));
  CHECK(a.time == 0.0);

  const auto quiet = make_initial(0.5, 1, g, 0.0);
  CHECK(quiet.c.max_abs() == 0.5);
  CHECK(quiet.eta1.max_abs() == 0.0);

  CHECK_THROWS_AS(make_initial(0.0, 1, g, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(make_initial(1.0, 1, g, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(make_initial(0.2, 1, g, -1.0), std::invalid_argument);
}

TEST_CASE("uniform state without order is a fixed point") {
  const auto g = Grid2D::unit(16, 16);
  const FieldSet s{Field2D(g, 0.2), Field2D(g), Field2D(g), 0.0};
  const auto n = step(s, SimParams{});
  CHECK(max_abs_diff(n.c, s.c) < 1e-15);
  CHECK(n.eta1.max_abs() == 0.0);
  CHECK(n.eta2.max_abs() == 0.0);
  CHECK(n.time == doctest::Approx(0.05));
}

TEST_CASE("composition mean is conserved") {
  const auto g = Grid2D::unit(32, 32);
  std::mt19937_64 rng(12);
  for (auto form : {SpatialForm::FullBiharmonic, SpatialForm::PaperLiteral}) {
    SimParams p;
    p.ch_spatial_form = form;
    FieldSet s{random_field(g, rng, 0.1, 0.3), random_field(g, rng, -0.5, 0.5), random_field(g, rng, -0.5, 0.5), 0.0};
    const double m0 = s.c.mean();
    const SemiImplicitStepper st(g, p);
    for (int i = 0; i < 50; ++i) s = st.step(s);
    CHECK(std::abs(s.c.mean() - m0) < 1e-12);
  }
}

TEST_CASE("linear Cahn-Hilliard modes grow by the implicit-explicit factor") {
  // With eta = 0 the composition update is linear, so each Fourier mode is
  // multiplied by (1 - dt M k^2 2 a1) / (1 + dt 2 kappa_c M K4).
  const auto g = Grid2D::unit(64, 64);
  const double kx = 2 * kPi * 3 / 64.0, ky = 2 * kPi * 5 / 64.0;
  const double A = 1e-2;
  for (auto form : {SpatialForm::FullBiharmonic, SpatialForm::PaperLiteral}) {
    SimParams p;
    p.dt = 0.3;
    p.mobility_m = 0.7;
    p.kappa_c = 1.3;
    p.ch_spatial_form = form;
    const FieldSet s{sample(g, [&](double x, double y) { return 0.2 + A * std::cos(kx * x) * std::cos(ky * y); }),
                     Field2D(g), Field2D(g), 0.0};
    const double k2 = kx * kx + ky * ky;
    const double k4 = form == SpatialForm::FullBiharmonic ? k2 * k2 : std::pow(kx, 4) + std::pow(ky, 4);
    const double gain = (1 - p.dt * p.mobility_m * k2 * 2 * p.bulk.a1) / (1 + p.dt * 2 * p.kappa_c * p.mobility_m * k4);
    const auto n = step(s, p);
    const auto expect =
        sample(g, [&](double x, double y) { return 0.2 + gain * A * std::cos(kx * x) * std::cos(ky * y); });
    CAPTURE(to_string(form));
    CHECK(max_abs_diff(n.c, expect) < 1e-14);
  }
}

TEST_CASE("linear Allen-Cahn modes decay by the implicit-explicit factor") {
  const auto g = Grid2D::unit(64, 64);
  const double k = 2 * kPi * 4 / 64.0;
  const double A = 1e-8, c0 = 0.2;
  SimParams p;
  p.dt = 0.2;
  p.kinetic_l = 1.5;
  p.kappa_eta = 0.8;
  const FieldSet s{Field2D(g, c0), sample(g, [&](double x, double) { return A * std::sin(k * x); }), Field2D(g), 0.0};
  const double gain = (1 - p.dt * p.kinetic_l * 2 * p.bulk.a2 * (1 - c0)) / (1 + p.dt * 2 * p.kappa_eta * p.kinetic_l * k * k);
  const auto n = step(s, p);
  const auto expect = sample(g, [&](double x, double) { return gain * A * std::sin(k * x); });
  CHECK(max_abs_diff(n.eta1, expect) < 1e-12 * A);
  CHECK(n.eta2.max_abs() == 0.0);
}

TEST_CASE("stepping commutes with periodic shifts") {
  const auto g = Grid2D::unit(32, 32);
  std::mt19937_64 rng(21);
  const FieldSet s{random_field(g, rng, 0.1, 0.3), random_field(g, rng, -0.5, 0.5), random_field(g, rng, -0.5, 0.5),
                   0.0};
  const SimParams p;
  const auto a = step(s, p);
  const auto b = step(FieldSet{shift(s.c, 5, 11), shift(s.eta1, 5, 11), shift(s.eta2, 5, 11), 0.0}, p);
  CHECK(max_abs_diff(b.c, shift(a.c, 5, 11)) < 1e-13);
  CHECK(max_abs_diff(b.eta1, shift(a.eta1, 5, 11)) < 1e-13);
  CHECK(max_abs_diff(b.eta2, shift(a.eta2, 5, 11)) < 1e-13);
}

TEST_CASE("swapping variants and axes commutes with stepping") {
  const auto g = Grid2D::unit(32, 32);
  std::mt19937_64 rng(22);
  const FieldSet s{random_field(g, rng, 0.1, 0.3), random_field(g, rng, -0.5, 0.5), random_field(g, rng, -0.5, 0.5),
                   0.0};
  for (auto form : {SpatialForm::FullBiharmonic, SpatialForm::PaperLiteral}) {
    SimParams p;
    p.ch_spatial_form = form;
    const auto a = step(s, p);
    const auto b = step(FieldSet{transpose(s.c), transpose(s.eta2), transpose(s.eta1), 0.0}, p);
    CHECK(max_abs_diff(b.c, transpose(a.c)) < 1e-13);
    CHECK(max_abs_diff(b.eta1, transpose(a.eta2)) < 1e-13);
    CHECK(max_abs_diff(b.eta2, transpose(a.eta1)) < 1e-13);
  }
}

TEST_CASE("unit polynomial mobility matches the constant-mobility update") {
  const auto g = Grid2D::unit(32, 32);
  const auto s = smooth_state(g);
  SimParams p;
  const auto a = step(s, p);
  p.mobility_poly = {1.0};
  const auto b = step(s, p);
  CHECK(max_abs_diff(a.c, b.c) < 1e-13);
  CHECK(bitwise_equal(a.eta1, b.eta1));

  p.mobility_poly = {0.5, 1.0, -0.5};
  CHECK(p.mobility(0.4) == doctest::Approx(0.5 + 0.4 - 0.08));
  const auto c = step(s, p);
  CHECK(std::abs(c.c.mean() - s.c.mean()) < 1e-14);

  p.ch_spatial_form = SpatialForm::PaperLiteral;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("simulate returns frames at the saved spacing") {
  const auto g = Grid2D::unit(16, 16);
  const auto init = make_initial(0.2, 494, g, 0.01);
  SimParams p;
  const auto t = simulate(init, p, 2, 3);
  REQUIRE(t.size() == 2);
  CHECK(t.dt == doctest::Approx(0.15));
  CHECK(t.frames[1].time == doctest::Approx(0.15));
  CHECK(bitwise_equal(t.frames[0].c, init.c));

  FieldSet manual = init;
  for (int i = 0; i < 3; ++i) manual = step(manual, p);
  CHECK(bitwise_equal(t.frames[1].c, manual.c));
  CHECK(bitwise_equal(t.frames[1].eta1, manual.eta1));

  const auto t5 = simulate(init, p, 5, 2);
  for (std::size_t f = 0; f < t5.size(); ++f) CHECK(t5.frames[f].time == static_cast<double>(f) * t5.dt);

  CHECK_THROWS_AS(simulate(init, p, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate(init, p, 3, 0), std::invalid_argument);
}

TEST_CASE("simulate is bitwise reproducible") {
  const auto g = Grid2D::unit(32, 32);
  const auto init = make_initial(0.23, 4446, g, 0.01);
  const auto a = simulate(init, SimParams{}, 6, 4);
  const auto b = simulate(init, SimParams{}, 6, 4);
  for (std::size_t f = 0; f < a.size(); ++f) {
    CHECK(bitwise_equal(a.frames[f].c, b.frames[f].c));
    CHECK(bitwise_equal(a.frames[f].eta1, b.frames[f].eta1));
    CHECK(bitwise_equal(a.frames[f].eta2, b.frames[f].eta2));
  }
}

TEST_CASE("free energy does not increase over a short run") {
  const auto g = Grid2D::unit(32, 32);
  const auto init = make_initial(0.21, 7410, g, 0.01);
  const SimParams p;
  const auto t = simulate(init, p, 20, 10);
  const ElasticKernelTable kt(g, p.elastic);
  double prev = total_energy(t.frames[0], p, kt);
  for (std::size_t f = 1; f < t.size(); ++f) {
    const double e = total_energy(t.frames[f], p, kt);
    CHECK(e <= prev + 1e-8 * std::abs(prev));
    prev = e;
  }
}

TEST_CASE("runaway integration reports the frame") {
  const auto g = Grid2D::unit(16, 16);
  SimParams p;
  p.dt = 50.0;
  FieldSet s{Field2D(g, 0.2), Field2D(g, 3.0), Field2D(g, 0.0), 0.0};
  s.eta1(3, 3) = 4.0;
  try {
    simulate(s, p, 10, 5);
    FAIL("expected IntegrationBlowup");
  } catch (const IntegrationBlowup& e) {
    CHECK(e.frame >= 1);
    CHECK(e.frame < 10);
    CHECK(std::string(e.what()).find("frame") != std::string::npos);
  }
}
