#include <cmath>
#include <vector>

#include "vsheet/error.hpp"
#include "vsheet/fixed_point.hpp"
#include "vsheet/singular_ops.hpp"
#include "vsheet/spectral.hpp"

namespace vsheet {
namespace {

struct State {
  SpectralField y;
  SpectralField q;
};

State axpy(const State& s, double h, const State& d) { return {s.y + h * d.y, s.q + h * d.q}; }

class VortexRhs {
public:
  VortexRhs(const PhysParams& params, SpectralField omega_guess) : p_(params), omega_(std::move(omega_guess)) {}

  // omega solves Q = 1 + omega - a (v1 + v2 y_x)[omega]; a contraction for small data
  SpectralField recover_omega(const SpectralField& y_x, const SpectralField& q) {
    SpectralField w = omega_;
    for (int it = 0; it < 200; ++it) {
      const Velocity v = biot_savart(y_x, w);
      SpectralField next = q - SpectralField::constant(y_x.grid(), 1.0) +
                           p_.atwood * (v.v1 + pointwise_product(v.v2, y_x));
      const double change = b0_norm(next - w);
      w = std::move(next);
      if (change <= 1e-15 * (1.0 + b0_norm(w))) {
        omega_ = w;
        return w;
      }
    }
    throw Error(ErrorKind::Stability, "omega recovery from Q did not converge");
  }

  State operator()(const State& s) {
    const FrequencyGrid& grid = s.y.grid();
    const SpectralField y_x = derivative(s.y);
    const SpectralField w = recover_omega(y_x, s.q);
    const Velocity v = biot_savart(y_x, w);
    const auto yx = synthesize(y_x), om = synthesize(w), v1 = synthesize(v.v1), v2 = synthesize(v.v2);
    const auto qv = synthesize(s.q), yv = synthesize(s.y);
    const double a = p_.atwood, g = p_.gravity;
    const int n = grid.n_modes();
    std::vector<double> yt(n), flux(n);
    for (int j = 0; j < n; ++j) {
      yt[j] = v2[j] - v1[j] * yx[j];
      const double b = 1.0 + om[j];
      flux[j] = -v1[j] * qv[j] +
                a * (b * b / (2.0 * (1.0 + yx[j] * yx[j])) - 0.5 * (v1[j] * v1[j] + v2[j] * v2[j]) - g * yv[j]);
    }
    return {analyze(grid, yt), derivative(analyze(grid, flux))};
  }

  const SpectralField& omega() const { return omega_; }

private:
  PhysParams p_;
  SpectralField omega_;
};

void guard(const State& s, double t) {
  const double m = std::max(b0_norm(s.y), b0_norm(s.q));
  if (!std::isfinite(m) || m > 1e6) throw Error(ErrorKind::Stability, "RK4 oracle blew up near t = " + std::to_string(t));
}

}  // namespace

std::pair<SpaceTimeField, SpaceTimeField> oracle_rk4_vortex(const SpectralField& y0x, const SpectralField& omega0,
                                                            const PhysParams& params, const TimeGrid& output,
                                                            double max_dt) {
  require_same_grid(y0x, omega0);
  require(max_dt > 0.0, ErrorKind::InvalidArgument, "max_dt must be positive");
  require(output[0] == 0.0, ErrorKind::InvalidArgument, "output grid must start at 0");
  const FrequencyGrid& grid = y0x.grid();

  VortexRhs rhs(params, omega0);
  const Velocity v0 = biot_savart(y0x, omega0);
  State s{antiderivative(y0x), SpectralField::constant(grid, 1.0) + omega0 -
                                   params.atwood * (v0.v1 + pointwise_product(v0.v2, y0x))};

  SpaceTimeField ys(grid, output), ws(grid, output);
  ys[0] = y0x;
  ws[0] = omega0;
  for (int n = 1; n < output.size(); ++n) {
    const double span = output[n] - output[n - 1];
    const int sub = std::max(1, static_cast<int>(std::ceil(span / max_dt - 1e-12)));
    const double h = span / sub;
    for (int i = 0; i < sub; ++i) {
      const State k1 = rhs(s);
      const State k2 = rhs(axpy(s, h / 2, k1));
      const State k3 = rhs(axpy(s, h / 2, k2));
      const State k4 = rhs(axpy(s, h, k3));
      s.y += (h / 6) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
      s.q += (h / 6) * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
      guard(s, output[n - 1] + (i + 1) * h);
    }
    ys[n] = derivative(s.y);
    ws[n] = rhs.recover_omega(ys[n], s.q);
  }
  return {ys, ws};
}

}  // namespace vsheet
