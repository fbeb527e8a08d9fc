#include <doctest.h>

#include <cmath>

#include "vsheet/error.hpp"
#include "vsheet/fixed_point.hpp"
#include "vsheet/spectral.hpp"
#include "vsheet/time_evolution.hpp"

using namespace vsheet;

namespace {

SolverConfig small_config(double a, double amplitude = 0.01) {
  SolverConfig c;
  c.params.atwood = a;
  c.params.alpha = 0.05;
  c.n_modes = 32;
  c.period_scale = 4.0;
  c.t_max = 20.0;
  c.steps = 400;
  c.grading_rate = 0.6;
  c.profile.name = "band_limited_random";
  c.profile.band = 6;
  c.profile.amplitude = amplitude;
  c.mode = a > 0 ? SolveMode::GlobalApos : (a == 0 ? SolveMode::KhAzero : SolveMode::LocalAneg);
  return c;
}

SolverConfig aneg_config() {
  SolverConfig c;
  c.params.atwood = -0.5;
  c.params.alpha = 0.1;
  c.n_modes = 64;
  c.period_scale = 4.0;
  c.t_max = 1.0;
  c.steps = 100;
  c.profile.name = "band_limited_random";
  c.profile.band = 6;
  c.profile.amplitude = 1e-3;
  c.mode = SolveMode::LocalAneg;
  c.horizon = 0.5;
  return c;
}

double max_b0_gap(const SpaceTimeField& a, const SpaceTimeField& b, int count) {
  double e = 0.0;
  for (int n = 0; n < count; ++n) e = std::max(e, b0_norm(a[n] - b[n]));
  return e;
}

TimeGrid leading_nodes(const TimeGrid& t, double upto) {
  std::vector<double> nodes;
  for (double s : t.nodes())
    if (s <= upto + 1e-12) nodes.push_back(s);
  return TimeGrid(nodes);
}

}  // namespace

TEST_CASE("profiles") {
  const auto grid = make_grid(32, 1.0);
  InitialProfile p;
  p.amplitude = 0.02;
  CHECK(b0_norm(make_profile(grid, p)) == doctest::Approx(0.02).epsilon(1e-14));
  p.name = "two_mode";
  CHECK(b0_norm(make_profile(grid, p)) == doctest::Approx(0.02).epsilon(1e-14));
  p.name = "band_limited_random";
  p.band = 5;
  p.seed = 7;
  const auto r1 = make_profile(grid, p), r2 = make_profile(grid, p);
  CHECK(b0_norm(r1) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(b0_norm(r1 - r2) == 0.0);
  CHECK(effective_band(r1) == 5);
  CHECK(std::abs(r1[0]) == 0.0);
  p.seed = 8;
  CHECK(b0_norm(make_profile(grid, p) - r1) > 0.0);
  p.name = "explicit";
  CHECK_THROWS_AS(make_profile(grid, p), Error);
  p.coefficients = r1;
  CHECK(b0_norm(make_profile(grid, p) - r1) == 0.0);
  p.name = "spiral";
  CHECK_THROWS_AS(make_profile(grid, p), Error);
}

TEST_CASE("config violations") {
  auto c = small_config(0.3);
  CHECK(c.violations().empty());
  c.mode = SolveMode::LocalAneg;
  CHECK_FALSE(c.violations().empty());
  c = small_config(0.3, 0.6);
  CHECK_FALSE(c.violations().empty());
  CHECK_THROWS_AS(picard_solve(c), Error);
  c = small_config(0.9);
  c.params.alpha = 0.5;
  CHECK_FALSE(c.violations().empty());
  auto l = aneg_config();
  CHECK(l.violations().empty());
  l.t_max = 0.8;
  CHECK_FALSE(l.violations().empty());
  c = small_config(0.0);
  c.mode = SolveMode::GlobalApos;
  CHECK_FALSE(c.violations().empty());
  try {
    c.validate();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Configuration);
  }
}

TEST_CASE("linear solution") {
  const auto grid = make_grid(32, 1.0);
  const auto times = TimeGrid::uniform(2.0, 20);
  PhysParams p;
  p.atwood = 0.0;
  const auto y0 = SpectralField::cosine(grid, 1, 0.01);
  const auto [y, w] = linear_solution(y0, p, times);
  for (int n = 0; n < times.size(); ++n) {
    CHECK(b0_norm(w[n] + y[n]) < 1e-17);
    CHECK(std::abs(y[n][1] - 0.005 * std::exp(-times[n])) < 1e-16);
  }
  p.atwood = 0.5;
  const auto [y5, w5] = linear_solution(y0, p, times);
  CHECK(std::abs(std::abs(y5[20][1]) - 0.005 * std::exp(-std::sqrt(1.25) * 2.0)) < 1e-16);
  CHECK(std::abs(w5[20][0]) == 0.0);
  const auto [yz, wz] = linear_solution(SpectralField(grid), p, times);
  CHECK(b0_norm(yz[5]) == 0.0);
  CHECK_THROWS_AS(linear_solution(SpectralField::constant(grid, 1.0), p, times), Error);
}

TEST_CASE("residual of the linear solution is second order") {
  const auto grid = make_grid(32, 1.0);
  PhysParams p;
  p.atwood = 0.3;
  const auto y0 = SpectralField::cosine(grid, 1, 0.01) + SpectralField::sine(grid, 3, 0.01);
  auto res = [&](int steps) {
    const auto [y, w] = linear_solution(y0, p, TimeGrid::uniform(4.0, steps));
    return linear_system_residual(y, w, p, false, ResidualMode::Raw, 4.0);
  };
  const double r1 = res(100), r2 = res(200);
  CHECK(std::log2(r1 / r2) > 1.9);
  const auto [y, w] = linear_solution(y0, p, TimeGrid::uniform(4.0, 100));
  CHECK(linear_system_residual(y, w, p, false, ResidualMode::Subtracted, 4.0) < 1e-15);
}

TEST_CASE("zero data converges at once") {
  auto c = small_config(0.3, 0.0);
  const auto b = picard_solve(c);
  CHECK(b.converged);
  CHECK(b.iterations == 1);
  CHECK(b.balpha_norms.first == 0.0);
  CHECK(b.balpha_norms.second == 0.0);
  CHECK(b.residual_norm == 0.0);
  const auto env = balpha_envelope_check(b, c);
  CHECK(env.mass == 0.0);
  CHECK(env.holds);
}

TEST_CASE("a = 0 small data") {
  const auto c = small_config(0.0);
  const auto b = picard_solve(c);
  CHECK(b.converged);
  CHECK(b.contraction_ratios.back() < 0.5);
  CHECK(b.residual_norm < 1e-8);
  CHECK(b.sup_y.back() < 0.1 * b.sup_y.front());
  CHECK(b.sup_omega.back() < 0.1 * b.sup_omega.front());
  CHECK(std::abs(b.omega[7][0] - eval_nonlinear(b.y_x[7], b.omega[7], c.params, NonlinearBackend::ClosedForm, {}).G1[0]) < 1e-15);
}

TEST_CASE("a = 0.3 small data") {
  const auto c = small_config(0.3);
  const auto b = picard_solve(c);
  REQUIRE(b.converged);
  CHECK(b.contraction_ratios.back() < 0.5);
  CHECK(b.residual_norm < 1e-8);
  CHECK(b.tail_estimate <= c.tail_tol);
  CHECK(extra_sweep_change(b, c) < 10 * c.picard_tol);

  const auto env = balpha_envelope_check(b, c);
  CHECK(env.dominated);
  CHECK(env.holds);
  CHECK(env.mass <= 2.0 * env.linear_mass);

  for (int n = 1; n < b.y_x.size(); ++n) CHECK(b.sup_y[n] <= b.sup_y[n - 1] * (1 + 1e-12));

  SUBCASE("backends agree") {
    auto s = c;
    s.backend = NonlinearBackend::Series;
    const auto bs = picard_solve(s);
    CHECK(max_b0_gap(b.y_x, bs.y_x, b.y_x.size()) < 1e-7);
    CHECK(max_b0_gap(b.omega, bs.omega, b.y_x.size()) < 1e-7);
  }
  SUBCASE("residual is second order") {
    auto coarse = c;
    coarse.steps = 200;
    const double r = picard_solve(coarse).residual_norm;
    CHECK(std::log2(r / b.residual_norm) > 1.6);
  }
  SUBCASE("matches RK4 on [0, 0.5]") {
    const auto out = leading_nodes(b.y_x.times(), 0.5);
    const auto [y, w] = oracle_rk4_vortex(b.y_x[0], b.omega[0], c.params, out, 1e-3);
    CHECK(max_b0_gap(y, b.y_x, out.size()) < 1e-5);
    CHECK(max_b0_gap(w, b.omega, out.size()) < 1e-5);
  }
  SUBCASE("serial and parallel agree") {
    auto s = c;
    s.exec = Exec::Serial;
    const auto bs = picard_solve(s);
    CHECK(max_b0_gap(b.y_x, bs.y_x, b.y_x.size()) == 0.0);
    CHECK(max_b0_gap(b.omega, bs.omega, b.y_x.size()) == 0.0);
  }
}

TEST_CASE("non-contraction is reported") {
  auto c = small_config(0.3, 0.5);
  c.period_scale = 0.25;
  c.tail_tol = 1.0;
  try {
    picard_solve(c);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Divergence);
    CHECK(std::string(e.what()).find("ratios") != std::string::npos);
  }
}

TEST_CASE("local a < 0 run") {
  const auto c = aneg_config();
  const auto b = picard_solve(c);
  REQUIRE(b.converged);
  CHECK(b.valid_until == doctest::Approx(0.5));
  CHECK(b.residual_norm < 1e-8);
  const auto out = leading_nodes(b.y_x.times(), c.horizon);
  const auto [y, w] = oracle_rk4_vortex(b.y_x[0], b.omega[0], c.params, out, 1e-3);
  CHECK(max_b0_gap(y, b.y_x, out.size()) < 1e-4);
  CHECK(max_b0_gap(w, b.omega, out.size()) < 1e-4);
  const auto g = low_mode_growth(b, c.params, c.horizon);
  CHECK(g.low_modes > 0);
  CHECK(g.rate > 0.0);
  CHECK(g.worst_ratio <= 1.05);
}

TEST_CASE("RK4 oracle") {
  const auto grid = make_grid(32, 1.0);
  PhysParams p;
  p.atwood = 0.3;
  const auto out = TimeGrid::uniform(0.2, 4);
  const auto [y, w] = oracle_rk4_vortex(SpectralField(grid), SpectralField(grid), p, out, 1e-2);
  CHECK(b0_norm(y[4]) == 0.0);
  CHECK(b0_norm(w[4]) < 1e-15);
  const auto y0 = SpectralField::cosine(grid, 1, 0.01);
  const auto [yl, wl] = linear_solution(y0, p, out);
  const auto [yr, wr] = oracle_rk4_vortex(y0, wl[0], p, out, 1e-3);
  // nonlinear correction is O(amplitude^2)
  CHECK(b0_norm(yr[4] - yl[4]) < 1e-3 * b0_norm(y0));
  CHECK_THROWS_AS(oracle_rk4_vortex(y0, wl[0], p, out, 0.0), Error);
}
