#include <doctest.h>

#include <cmath>
#include <random>

#include "random_fields.hpp"
#include "vsheet/error.hpp"
#include "vsheet/kernels.hpp"
#include "vsheet/singular_ops.hpp"
#include "vsheet/spectral.hpp"

using namespace vsheet;
using vsheet::testing::random_field;

TEST_CASE("periodized kernel") {
  const double L = 3.0;
  for (int j = 0; j <= 6; ++j) {
    PeriodizedKernel k(j, L);
    // parity: K_{j+1} odd for even j
    const double z = 0.37;
    const double s = (j % 2 == 0) ? -1.0 : 1.0;
    CHECK(k(-z) == doctest::Approx(s * k(z)).epsilon(1e-12));
    // local behaviour 1/z^{j+1}
    const double zz = 1e-3;
    CHECK(k(zz) * std::pow(zz, j + 1) == doctest::Approx(1.0).epsilon(1e-6));
    // derivative relation K_{j+2} = -K_{j+1}' / (j+1), by central differences
    PeriodizedKernel next(j + 1, L);
    const double h = 1e-5;
    const double fd = -(k(z + h) - k(z - h)) / (2 * h) / (j + 1);
    CHECK(next(z) == doctest::Approx(fd).epsilon(1e-6));
  }
  // K_2 = K_1^2 + 1/(4 L^2)
  PeriodizedKernel k1(0, L), k2(1, L);
  CHECK(k2(0.9) == doctest::Approx(k1(0.9) * k1(0.9) + 1 / (4 * L * L)).epsilon(1e-14));
  CHECK(binomial(6, 2) == 15.0);
}

TEST_CASE("T_j examples") {
  auto g = make_grid(64, 1.0);
  for (auto backend : {Backend::Quadrature, Backend::Spectral}) {
    for (int k : {1, 3, 7}) {
      auto c = SpectralField::cosine(g, k);
      CHECK(b0_norm(tj_apply(SpectralField(g), c, 0, backend) - SpectralField::sine(g, k)) < 1e-13);
    }
    auto u = SpectralField::cosine(g, 2);
    for (int j = 1; j <= 4; ++j) CHECK(b0_norm(tj_apply(SpectralField(g), u, j, backend)) < 1e-15);
  }
  auto g256 = make_grid(256, 1.0);
  auto yx = SpectralField::cosine(g256, 1, 0.05);
  auto u = SpectralField::cosine(g256, 1);
  for (int j = 1; j <= 3; ++j) {
    auto q = tj_apply(yx, u, j, Backend::Quadrature);
    auto s = tj_apply(yx, u, j, Backend::Spectral);
    CHECK(b0_norm(q - s) < 1e-8);
  }
}

TEST_CASE("T_j errors") {
  auto g = make_grid(32, 1.0);
  auto yx = SpectralField::cosine(g, 1, 0.05);
  auto u = SpectralField::cosine(g, 1);
  CHECK_THROWS_AS(tj_apply(yx, u, 11, Backend::Quadrature), Error);
  CHECK_THROWS_AS(tj_apply(yx, SpectralField(make_grid(64, 1.0)), 1, Backend::Quadrature), Error);
  // band limit: 8 * 2 + 1 > 15
  auto wide = SpectralField::cosine(g, 2, 0.05);
  try {
    tj_apply(wide, u, 8, Backend::Spectral);
    FAIL("expected band limit error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BandLimit);
  }
  auto with_mean = yx + SpectralField::constant(g, 0.1);
  CHECK_THROWS_AS(tj_apply(with_mean, u, 1, Backend::Quadrature), Error);
  try {
    tj_apply(yx, u, 11, Backend::Spectral);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BackendCapacity);
  }
}

TEST_CASE("T_1 applied to 1 is Lambda y") {
  auto g = make_grid(128, 1.0);
  std::mt19937_64 rng(4);
  auto yx = random_field(g, 10, 0.1, rng);
  auto one = SpectralField::constant(g, 1.0);
  auto ly = apply_multiplier(antiderivative(yx), Symbol::Lambda);
  CHECK(b0_norm(tj_apply(yx, one, 1, Backend::Quadrature) - ly) < 1e-8);
  CHECK(b0_norm(apply_multiplier(yx, Symbol::Hilbert) - ly) < 1e-14);
}

TEST_CASE("backend equivalence on random band-limited inputs") {
  auto g = make_grid(256, 1.0);
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 6; ++trial) {
    auto yx = random_field(g, 12, 0.1, rng);
    auto u = random_field(g, 12, 1.0, rng, true);
    for (int j = 0; j <= 6; ++j) {
      CHECK(b0_norm(tj_apply(yx, u, j, Backend::Quadrature) - tj_apply(yx, u, j, Backend::Spectral)) <= 1e-7);
      if (j >= 1)
        CHECK(b0_norm(tilde_tj_apply(yx, u, j, Backend::Quadrature) -
                      tilde_tj_apply(yx, u, j, Backend::Spectral)) <= 1e-7);
    }
  }
}

TEST_CASE("serial reference matches the parallel kernels") {
  auto g = make_grid(64, 2.0);
  std::mt19937_64 rng(17);
  auto yx = random_field(g, 6, 0.1, rng);
  auto u = random_field(g, 6, 1.0, rng, true);
  OperatorConfig serial;
  serial.exec = Exec::Serial;
  OperatorConfig par;
  for (int j = 0; j <= 3; ++j) {
    CHECK(b0_norm(tj_apply(yx, u, j, Backend::Quadrature, serial) - tj_apply(yx, u, j, Backend::Quadrature, par)) ==
          0.0);
  }
  auto vs = biot_savart(yx, u, serial);
  auto vp = biot_savart(yx, u, par);
  CHECK(b0_norm(vs.v1 - vp.v1) == 0.0);
  CHECK(b0_norm(vs.v2 - vp.v2) == 0.0);
  SpectralField list[] = {yx, yx};
  CHECK(b0_norm(rk_apply(list, u, serial) - rk_apply(list, u, par)) == 0.0);
}

TEST_CASE("tilde T_j examples") {
  auto g = make_grid(128, 1.0);
  auto fx = SpectralField::cosine(g, 1, 0.05);
  auto u = SpectralField::cosine(g, 3);
  for (auto b : {Backend::Quadrature, Backend::Spectral}) {
    CHECK(b0_norm(tilde_tj_apply(SpectralField(g), u, 2, b)) < 1e-15);
    CHECK(b0_norm(tilde_tj_apply(fx, SpectralField::constant(g, 2.0), 2, b)) < 1e-14);
  }
  auto g256 = make_grid(256, 1.0);
  auto f256 = SpectralField::cosine(g256, 1, 0.05);
  CHECK(b0_norm(tilde_tj_apply(f256, f256, 2, Backend::Quadrature) - tilde_tj_apply(f256, f256, 2, Backend::Spectral)) <
        1e-8);
  CHECK_THROWS_AS(tilde_tj_apply(fx, u, 0, Backend::Quadrature), Error);
}

TEST_CASE("T_j norm bound with constant 1+2j") {
  auto g = make_grid(128, 1.0);
  std::mt19937_64 rng(31);
  CHECK(tj_norm_bound_check(SpectralField(g), SpectralField::cosine(g, 1), 1, 0.0).lhs == 0.0);
  auto h = tj_norm_bound_check(SpectralField(g), SpectralField::cosine(g, 4), 0, 0.0);
  CHECK(h.lhs <= h.rhs * (1 + 1e-12));
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto yx = random_field(g, 8, 0.02 + 0.3 * trial / 100.0, rng);
    auto u = random_field(g, 8, 1.0, rng, trial % 2 == 0);
    const int j = trial % 5;
    const double rho = (trial / 5) % 2 == 0 ? 0.0 : 0.1;
    if (!tj_norm_bound_check(yx, u, j, rho).holds) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("T_j difference bound with c(j) = 2j^2+3j+1") {
  CHECK(difference_constant(1) == 6.0);
  auto g = make_grid(128, 1.0);
  std::mt19937_64 rng(37);
  auto yx = random_field(g, 6, 0.1, rng);
  auto u = random_field(g, 6, 0.1, rng);
  CHECK(tj_difference_bound_check(yx, yx, u, u, 2, 0.0).lhs == 0.0);
  auto red = tj_difference_bound_check(yx, SpectralField(g), u, SpectralField(g), 1, 0.0);
  CHECK(red.holds);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto y1 = random_field(g, 6, 0.2, rng);
    auto y2 = y1 + random_field(g, 6, 0.01, rng);
    auto u1 = random_field(g, 6, 0.2, rng, true);
    auto u2 = u1 + random_field(g, 6, 0.01, rng);
    const int j = 1 + trial % 3;
    const double rho = trial % 2 == 0 ? 0.0 : 0.1;
    if (!tj_difference_bound_check(y1, y2, u1, u2, j, rho).holds) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("R_k") {
  auto g = make_grid(128, 1.0);
  std::mt19937_64 rng(41);
  auto w = random_field(g, 5, 1.0, rng, true);
  {
    SpectralField list[] = {random_field(g, 4, 0.1, rng), SpectralField(g)};
    CHECK(b0_norm(rk_apply(list, w)) < 1e-15);
  }
  SUBCASE("k = 1 against finite differences of the smooth integral") {
    const double eps = 0.05;
    auto yx = SpectralField::cosine(g, 1, eps);
    auto one = SpectralField::constant(g, 1.0);
    SpectralField list[] = {yx};
    const auto r1 = synthesize(rk_apply(list, one));
    // Q(x) = (1/pi) int (y(x)-y(x')) K_1(x-x') dx', y = eps sin x; R_1 1 = Q'(x)
    PeriodizedKernel k1(0, 1.0);
    auto q = [&](double x) {
      double acc = 0.0;
      for (int l = 0; l < g.n_modes(); ++l) {
        const double xl = g.point(l);
        acc += (eps * std::sin(x) - eps * std::sin(xl)) * k1(x - xl);
      }
      return acc * g.spacing() / 3.141592653589793;
    };
    const double d = 1e-4;
    for (int i : {3, 17, 40, 77}) {
      const double x = g.point(i) + 0.5 * g.spacing();
      const double fd = (q(x + d) - q(x - d)) / (2 * d);
      const auto at = synthesize(rk_apply(list, one), std::vector<double>{x});
      CHECK(std::abs(at[0] - fd) < 1e-7);
    }
    CHECK(r1.size() == 128u);
  }
  SUBCASE("bound with constant 2") {
    int violations = 0;
    for (int trial = 0; trial < 60; ++trial) {
      const int k = 1 + trial % 3;
      std::vector<SpectralField> ys;
      for (int i = 0; i < k; ++i) ys.push_back(random_field(g, 5, 0.1 + 0.2 * (trial % 4), rng));
      auto omega = random_field(g, 8, 1.0, rng, true);
      const double rho = trial % 2 == 0 ? 0.0 : 0.1;
      if (!rk_bound_check(ys, omega, rho).holds) ++violations;
    }
    CHECK(violations == 0);
  }
  CHECK_THROWS_AS(rk_apply(std::span<const SpectralField>{}, w), Error);
}

TEST_CASE("Biot-Savart velocities") {
  auto g = make_grid(128, 1.0);
  auto flat = biot_savart(SpectralField(g), SpectralField(g));
  CHECK(b0_norm(flat.v1) < 1e-14);
  CHECK(b0_norm(flat.v2) < 1e-14);

  std::mt19937_64 rng(43);
  auto om = random_field(g, 10, 0.5, rng, true);
  auto v = biot_savart(SpectralField(g), om);
  CHECK(b0_norm(v.v1) < 1e-13);
  CHECK(b0_norm(v.v2 - apply_multiplier(om, Symbol::Hilbert)) < 1e-10);

  SUBCASE("leading term of v1 + H y_x is -T_1(y_x) omega") {
    auto Y = random_field(g, 4, 1.0, rng);
    auto W = random_field(g, 4, 1.0, rng, true);
    double resid[2];
    double lin[2];
    const double eps[2] = {1e-1, 1e-2};
    for (int i = 0; i < 2; ++i) {
      auto yx = eps[i] * Y;
      auto w = eps[i] * W;
      auto vv = biot_savart(yx, w);
      auto lhs = vv.v1 + apply_multiplier(yx, Symbol::Hilbert);
      lin[i] = b0_norm(lhs);
      resid[i] = b0_norm(lhs + tj_apply(yx, w, 1, Backend::Quadrature));
    }
    // lhs is quadratic, the remainder after the leading term is cubic
    CHECK(std::log10(lin[0] / lin[1]) > 1.9);
    CHECK(std::log10(resid[0] / resid[1]) > 2.9);
  }
}
