#include "vsheet/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "vsheet/error.hpp"

namespace vsheet {

std::vector<cplx> analyze_complex(const FrequencyGrid& grid, std::span<const cplx> samples) {
  const int n = grid.n_modes();
  require(static_cast<int>(samples.size()) == n, ErrorKind::InvalidArgument,
          "sample count " + std::to_string(samples.size()) + " does not match grid size " + std::to_string(n));
  std::vector<cplx> spectrum(n);
  detail::fft_forward(samples, spectrum);
  std::vector<cplx> coeffs(n);
  for (int k = grid.k_min(); k <= grid.k_max(); ++k) coeffs[grid.index(k)] = spectrum[(k + n) % n] / double(n);
  coeffs[grid.index(grid.k_min())] = 0.0;
  return coeffs;
}

SpectralField analyze(const FrequencyGrid& grid, std::span<const double> samples) {
  std::vector<cplx> z(samples.begin(), samples.end());
  SpectralField f(grid, analyze_complex(grid, z));
  f.make_real();
  return f;
}

std::vector<cplx> synthesize_complex(const FrequencyGrid& grid, std::span<const cplx> coeffs) {
  const int n = grid.n_modes();
  std::vector<cplx> spectrum(n);
  for (int k = grid.k_min(); k <= grid.k_max(); ++k) spectrum[(k + n) % n] = coeffs[grid.index(k)];
  std::vector<cplx> values(n);
  detail::fft_backward(spectrum, values);
  return values;
}

std::vector<double> synthesize(const SpectralField& field) {
  const auto z = synthesize_complex(field.grid(), field.coeffs());
  std::vector<double> out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [](cplx v) { return v.real(); });
  return out;
}

std::vector<double> synthesize(const SpectralField& field, std::span<const double> points) {
  const auto& grid = field.grid();
  std::vector<double> out(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    cplx sum = 0.0;
    for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k)
      sum += field[k] * std::exp(cplx(0.0, grid.frequency(k) * points[p]));
    out[p] = sum.real();
  }
  return out;
}

cplx symbol_m(double xi, const PhysParams& params) {
  require(xi != 0.0, ErrorKind::InvalidArgument, "m(xi) is undefined at xi = 0");
  const double a = params.atwood;
  const double radicand = 1.0 - a * a - a * params.gravity / std::abs(xi);
  if (radicand >= 0.0) return {std::sqrt(radicand), 0.0};
  return {0.0, std::sqrt(-radicand)};
}

cplx symbol_value(Symbol symbol, double xi, const PhysParams* params) {
  const double axi = std::abs(xi);
  switch (symbol) {
    case Symbol::Lambda: return axi;
    case Symbol::Hilbert: return xi == 0.0 ? cplx(0.0) : cplx(0.0, xi > 0.0 ? -1.0 : 1.0);
    case Symbol::Dx: return {0.0, xi};
    case Symbol::M:
    case Symbol::MInv:
    case Symbol::LambdaM: {
      require(params != nullptr, ErrorKind::InvalidArgument, "multiplier m requires physical parameters");
      if (xi == 0.0) return 0.0;
      const cplx m = symbol_m(xi, *params);
      if (symbol == Symbol::M) return m;
      if (symbol == Symbol::LambdaM) return axi * m;
      require(m != cplx(0.0), ErrorKind::DegenerateFrequency,
              "m(xi) = 0 at xi = " + std::to_string(xi) + "; inverse multiplier undefined");
      return 1.0 / m;
    }
  }
  return 0.0;
}

SpectralField apply_multiplier(const SpectralField& field, Symbol symbol, const PhysParams* params) {
  const auto& grid = field.grid();
  SpectralField out(grid);
  for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k)
    out[k] = field[k] * symbol_value(symbol, grid.frequency(k), params);
  return out;
}

SpectralField antiderivative(const SpectralField& field) {
  const auto& grid = field.grid();
  SpectralField out(grid);
  for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k)
    if (k != 0) out[k] = field[k] / cplx(0.0, grid.frequency(k));
  return out;
}

SpectralField derivative(const SpectralField& field, int order) {
  const auto& grid = field.grid();
  SpectralField out(grid);
  for (int k = grid.k_min() + 1; k <= grid.k_max(); ++k)
    out[k] = field[k] * std::pow(cplx(0.0, grid.frequency(k)), order);
  if (order == 0) out[0] = field[0];
  return out;
}

SpectralField pointwise_product(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u, v);
  const auto& grid = u.grid();
  auto a = synthesize_complex(grid, u.coeffs());
  const auto b = synthesize_complex(grid, v.coeffs());
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = a[j].real() * b[j].real();
  SpectralField out(grid, analyze_complex(grid, a));
  out.make_real();
  return out;
}

double weighted_norm(const SpectralField& u, double weight) {
  const auto& grid = u.grid();
  double s = 0.0;
  for (int k = grid.k_min(); k <= grid.k_max(); ++k)
    s += std::exp(weight * std::abs(grid.frequency(k))) * std::abs(u[k]);
  return s;
}

double b0_norm(const SpectralField& u) {
  double s = 0.0;
  for (const auto& c : u.coeffs()) s += std::abs(c);
  return s;
}

double brho_norm(const SpectralField& u, double rho) {
  require(rho >= 0.0, ErrorKind::InvalidArgument, "rho must be nonnegative");
  return weighted_norm(u, rho);
}

double sup_norm(const SpectralField& u) {
  double m = 0.0;
  for (double v : synthesize(u)) m = std::max(m, std::abs(v));
  return m;
}

DominatingMeasure dominating_measure(std::span<const SpaceTimeField* const> components, double alpha) {
  require(!components.empty(), ErrorKind::InvalidArgument, "no components");
  const auto& grid = components[0]->grid();
  DominatingMeasure mu{grid, std::vector<double>(grid.n_modes(), 0.0)};
  for (int k = grid.k_min(); k <= grid.k_max(); ++k) {
    const double axi = std::abs(grid.frequency(k));
    double w = 0.0;
    for (const auto* comp : components) {
      require(comp->grid() == grid, ErrorKind::GridMismatch, "components on different grids");
      double wk = 0.0;
      for (int i = 0; i < comp->size(); ++i)
        wk = std::max(wk, std::exp(alpha * comp->times()[i] * axi) * std::abs((*comp)[i][k]));
      w += wk;
    }
    mu.weights[grid.index(k)] = w;
  }
  return mu;
}

DominatingMeasure dominating_measure(const SpaceTimeField& u, double alpha) {
  const SpaceTimeField* one[] = {&u};
  return dominating_measure(one, alpha);
}

double balpha_norm(const SpaceTimeField& u, double alpha) { return dominating_measure(u, alpha).mass(); }

int effective_band(const SpectralField& u, double rel_tol) {
  const double cut = rel_tol * u.max_abs();
  int band = 0;
  const auto& grid = u.grid();
  for (int k = grid.k_min(); k <= grid.k_max(); ++k)
    if (std::abs(u[k]) > cut && u.max_abs() > 0.0) band = std::max(band, std::abs(k));
  return band;
}

double analyticity_fit(const SpectralField& u, const AnalyticityFitOptions& options) {
  const auto& grid = u.grid();
  const int hi = std::min(options.k_high.value_or(grid.k_max()), grid.k_max());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int k = std::max(options.k_low, 1); k <= hi; ++k) {
    const double amp = std::abs(u[k]);
    if (amp <= options.floor) continue;
    const double x = grid.frequency(k);
    const double y = std::log(amp);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  require(count >= 4, ErrorKind::InvalidArgument,
          "analyticity fit needs at least 4 modes above the amplitude floor, found " + std::to_string(count));
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return std::max(0.0, -slope);
}

}  // namespace vsheet
