#include <algorithm>
#include <cmath>
#include <limits>

#include "vsheet/cli_io.hpp"
#include "vsheet/nonlinear.hpp"
#include "vsheet/random.hpp"
#include "vsheet/singular_ops.hpp"
#include "vsheet/spectral.hpp"

namespace vsheet {
namespace {

using nlohmann::json;

// Running tally of one property over its cases.
struct Tally {
  int cases = 0;
  int violations = 0;
  double worst_ratio = 0.0;  // max lhs / rhs
  double min_margin = std::numeric_limits<double>::infinity();
  std::vector<std::string> errors;

  void add(double lhs, double rhs, bool holds) {
    ++cases;
    if (!holds) ++violations;
    if (rhs > 0.0) worst_ratio = std::max(worst_ratio, lhs / rhs);
    min_margin = std::min(min_margin, rhs - lhs);
  }

  json to_json(const std::string& name, std::optional<double> rho) const {
    json j = {{"name", name},       {"cases", cases},
              {"violations", violations}, {"worst_ratio", worst_ratio},
              {"min_margin", std::isfinite(min_margin) ? json(min_margin) : json(nullptr)},
              {"pass", violations == 0 && errors.empty()}};
    if (rho) j["rho"] = *rho;
    if (!errors.empty()) j["errors"] = errors;
    return j;
  }
};

template <class Fn>
void guarded(Tally& t, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    ++t.cases;
    t.errors.push_back(e.what());
  }
}

double max_gap(const SpaceTimeField& a, const SpaceTimeField& b, int count) {
  double e = 0.0;
  for (int n = 0; n < count; ++n) e = std::max(e, b0_norm(a[n] - b[n]));
  return e;
}

TimeGrid leading(const TimeGrid& t, double upto) {
  std::vector<double> nodes;
  for (double s : t.nodes())
    if (s <= upto * (1 + 1e-12)) nodes.push_back(s);
  return TimeGrid(nodes);
}

}  // namespace

Report validate_operators(const RunConfig& config) {
  const auto& s = config.operators;
  const FrequencyGrid grid = make_grid(s.n_modes, 1.0);
  const int band = std::max(2, s.n_modes / 16);
  const double eps = s.amplitude;
  json props = json::array();
  bool pass = true;
  auto push = [&](const json& j) {
    pass = pass && j["pass"].get<bool>();
    props.push_back(j);
  };

  // backend equivalence
  {
    std::mt19937_64 rng(s.seed);
    Tally plain, tilde;
    double worst_plain = 0.0, worst_tilde = 0.0;
    for (int c = 0; c < s.cases; ++c) {
      const auto yx = random_band_field(grid, band, std::min(eps, 0.1), rng);
      const auto u = random_band_field(grid, band, 1.0, rng, true);
      const int j = c % 7;
      guarded(plain, [&] {
        const double gap = b0_norm(tj_apply(yx, u, j, Backend::Quadrature) - tj_apply(yx, u, j, Backend::Spectral));
        worst_plain = std::max(worst_plain, gap);
        plain.add(gap, 1e-7, gap <= 1e-7);
      });
      if (j >= 1)
        guarded(tilde, [&] {
          const double gap =
              b0_norm(tilde_tj_apply(yx, u, j, Backend::Quadrature) - tilde_tj_apply(yx, u, j, Backend::Spectral));
          worst_tilde = std::max(worst_tilde, gap);
          tilde.add(gap, 1e-7, gap <= 1e-7);
        });
    }
    auto jp = plain.to_json("backend_equivalence_T", std::nullopt);
    jp["max_gap"] = worst_plain;
    push(jp);
    auto jt = tilde.to_json("backend_equivalence_T_tilde", std::nullopt);
    jt["max_gap"] = worst_tilde;
    push(jt);
  }

  for (std::size_t ri = 0; ri < s.rho.size(); ++ri) {
    const double rho = s.rho[ri];
    std::mt19937_64 rng(s.seed + 1000 * (ri + 1));
    Tally b1, b2, rk, dr;
    for (int c = 0; c < s.cases; ++c) {
      const double scale = eps * (0.2 + 0.8 * (c % 5) / 4.0);
      guarded(b1, [&] {
        const auto yx = random_band_field(grid, band, scale, rng);
        const auto u = random_band_field(grid, band, 1.0, rng, c % 2 == 0);
        const auto r = tj_norm_bound_check(yx, u, c % 6, rho);
        b1.add(r.lhs, r.rhs, r.holds);
      });
      guarded(b2, [&] {
        const auto y1 = random_band_field(grid, band, scale, rng);
        const auto y2 = y1 + random_band_field(grid, band, 0.1 * scale, rng);
        const auto u1 = random_band_field(grid, band, 1.0, rng, true);
        const auto u2 = u1 + random_band_field(grid, band, 0.1, rng);
        const auto r = tj_difference_bound_check(y1, y2, u1, u2, 1 + c % 4, rho);
        b2.add(r.lhs, r.rhs, r.holds);
      });
      guarded(rk, [&] {
        std::vector<SpectralField> ys;
        for (int i = 0; i <= c % 3; ++i) ys.push_back(random_band_field(grid, band, scale, rng));
        const auto w = random_band_field(grid, band, 1.0, rng, true);
        const auto r = rk_bound_check(ys, w, rho);
        rk.add(r.lhs, r.rhs, r.holds);
      });
      guarded(dr, [&] {
        PhysParams p = config.vortex.params;
        if (config.problem == Problem::Muskat) p = PhysParams{0.3, -1.0, 0.1, std::nullopt};
        const double sm = std::min(scale, 0.09);
        const auto y1 = random_band_field(grid, band, sm, rng);
        const auto w1 = random_band_field(grid, band, sm, rng, c % 2 == 0);
        const auto y2 = y1 + random_band_field(grid, band, 0.1 * sm, rng);
        const auto w2 = w1 + random_band_field(grid, band, 0.1 * sm, rng);
        const auto r = dr_difference_check({y1, w1}, {y2, w2}, p, rho);
        dr.add(r.lhs_F + r.lhs_G, r.rhs_F + r.rhs_G, r.holds);
      });
    }
    push(b1.to_json("Tj_norm_bound", rho));
    push(b2.to_json("Tj_difference_bound", rho));
    push(rk.to_json("Rk_bound", rho));
    push(dr.to_json("F_G_difference_majorant", rho));
  }

  if (s.probe_j > 0) {
    std::mt19937_64 rng(s.seed + 7);
    const auto yx = random_band_field(grid, band, std::min(eps, 0.1), rng);
    const auto u = random_band_field(grid, band, 1.0, rng, true);
    json probe = {{"name", "capacity_probe"}, {"j", s.probe_j}};
    try {
      tj_apply(yx, u, s.probe_j, Backend::Quadrature);
      probe["pass"] = true;
    } catch (const std::exception& e) {
      probe["pass"] = false;
      probe["error"] = e.what();
    }
    push(probe);
  }

  Report r;
  r.pass = pass;
  r.body = {{"seed", s.seed}, {"cases", s.cases}, {"n_modes", s.n_modes}, {"properties", props}, {"all_pass", pass}};
  return r;
}

Report compare_oracle(const RunConfig& config) {
  Report r;
  if (config.problem == Problem::VortexSheet) {
    const SolverConfig& c = config.vortex;
    const bool local = c.mode == SolveMode::LocalAneg;
    const double horizon = config.oracle.horizon.value_or(local ? std::min(1.0, c.horizon) : 0.5);
    const double threshold = config.oracle.threshold.value_or(local ? 1e-4 : 1e-5);
    const SolutionBundle b = picard_solve(c);
    const TimeGrid out = leading(b.y_x.times(), std::min(horizon, b.valid_until));
    const auto [y, w] = oracle_rk4_vortex(b.y_x[0], b.omega[0], c.params, out, config.oracle.dt);
    const double gy = max_gap(y, b.y_x, out.size()), gw = max_gap(w, b.omega, out.size());
    r.pass = b.converged && gy <= threshold && gw <= threshold;
    r.body = {{"problem", "vortex_sheet"},
              {"mode", to_string(c.mode)},
              {"horizon", out.t_max()},
              {"nodes", out.size()},
              {"threshold", threshold},
              {"converged", b.converged},
              {"discrepancy", {{"y_x", gy}, {"omega", gw}}},
              {"pass", r.pass}};
    return r;
  }
  const MuskatConfig& c = config.muskat;
  const double horizon = config.oracle.horizon.value_or(std::min(1.0, c.t_max));
  const double threshold = config.oracle.threshold.value_or(1e-6);
  const MuskatSolution s = muskat_picard_solve(c);
  const TimeGrid out = leading(s.f_x.times(), horizon);
  const auto f = oracle_rk4_muskat(s.f_x[0], c.density_gap, out, config.oracle.dt);
  const double gap = max_gap(f, s.f_x, out.size());
  const double final_gap = b0_norm(f[out.size() - 1] - s.f_x[out.size() - 1]);
  r.pass = s.converged && gap <= threshold;
  r.body = {{"problem", "muskat"},
            {"horizon", out.t_max()},
            {"nodes", out.size()},
            {"threshold", threshold},
            {"converged", s.converged},
            {"discrepancy", {{"f_x", gap}, {"f_x_at_horizon", final_gap}}},
            {"pass", r.pass}};
  return r;
}

}  // namespace vsheet
