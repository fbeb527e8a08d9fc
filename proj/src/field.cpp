#include "vsheet/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vsheet/error.hpp"

namespace vsheet {

SpectralField::SpectralField(const FrequencyGrid& grid) : grid_(grid), coeffs_(grid.n_modes()) {}

SpectralField::SpectralField(const FrequencyGrid& grid, std::vector<cplx> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  require(static_cast<int>(coeffs_.size()) == grid.n_modes(), ErrorKind::InvalidArgument,
          "coefficient count does not match grid");
}

void SpectralField::make_real() {
  auto& c = *this;
  c[grid_.k_min()] = 0.0;
  c[0] = c[0].real();
  for (int k = 1; k <= grid_.k_max(); ++k) {
    const cplx avg = 0.5 * (c[k] + std::conj(c[-k]));
    c[k] = avg;
    c[-k] = std::conj(avg);
  }
}

bool SpectralField::is_hermitian(double tol) const {
  const auto& c = *this;
  if (std::abs(c[grid_.k_min()]) > tol) return false;
  if (std::abs(c[0].imag()) > tol) return false;
  for (int k = 1; k <= grid_.k_max(); ++k)
    if (std::abs(c[k] - std::conj(c[-k])) > tol) return false;
  return true;
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& v : coeffs_) m = std::max(m, std::abs(v));
  return m;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : coeffs_) v *= s;
  return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
  for (auto& v : coeffs_) v *= s;
  return *this;
}

SpectralField SpectralField::constant(const FrequencyGrid& grid, double value) {
  SpectralField f(grid);
  f[0] = value;
  return f;
}

SpectralField SpectralField::cosine(const FrequencyGrid& grid, int k, double amplitude) {
  require(k >= 0 && k <= grid.k_max(), ErrorKind::InvalidArgument, "mode out of range");
  SpectralField f(grid);
  if (k == 0) {
    f[0] = amplitude;
  } else {
    f[k] = 0.5 * amplitude;
    f[-k] = 0.5 * amplitude;
  }
  return f;
}

SpectralField SpectralField::sine(const FrequencyGrid& grid, int k, double amplitude) {
  require(k >= 1 && k <= grid.k_max(), ErrorKind::InvalidArgument, "mode out of range");
  SpectralField f(grid);
  f[k] = cplx(0.0, -0.5 * amplitude);
  f[-k] = cplx(0.0, 0.5 * amplitude);
  return f;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }
SpectralField operator-(SpectralField a) { return a *= -1.0; }

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  require(a.grid() == b.grid(), ErrorKind::GridMismatch, "fields live on different grids");
}

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  require(nodes_.size() >= 3, ErrorKind::InvalidArgument, "time grid needs at least 2 steps");
  require(nodes_.front() == 0.0, ErrorKind::InvalidArgument, "time grid must start at 0");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    require(nodes_[i] > nodes_[i - 1], ErrorKind::InvalidArgument, "time nodes must increase strictly");
}

TimeGrid TimeGrid::uniform(double t_max, int steps) { return graded(t_max, steps, 0.0); }

TimeGrid TimeGrid::graded(double t_max, int steps, double rate) {
  require(t_max > 0.0 && steps >= 2, ErrorKind::InvalidArgument, "need t_max > 0 and steps >= 2");
  require(rate >= 0.0, ErrorKind::InvalidArgument, "grading rate must be nonnegative");
  std::vector<double> t(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    const double s = static_cast<double>(i) / steps;
    if (rate == 0.0) {
      t[i] = s * t_max;
    } else {
      // t(s) = -log(1 - s (1 - exp(-rate T))) / rate
      t[i] = -std::log1p(-s * (-std::expm1(-rate * t_max))) / rate;
    }
  }
  t.front() = 0.0;
  t.back() = t_max;
  return TimeGrid(std::move(t));
}

SpaceTimeField::SpaceTimeField(const FrequencyGrid& grid, TimeGrid times)
    : grid_(grid), times_(std::move(times)), slices_(times_.size(), SpectralField(grid)) {}

SpaceTimeField::SpaceTimeField(TimeGrid times, std::vector<SpectralField> slices)
    : grid_(slices.at(0).grid()), times_(std::move(times)), slices_(std::move(slices)) {
  require(static_cast<int>(slices_.size()) == times_.size(), ErrorKind::InvalidArgument,
          "slice count does not match time grid");
  for (const auto& s : slices_)
    require(s.grid() == grid_, ErrorKind::GridMismatch, "slices must share one grid");
}

SpaceTimeField& SpaceTimeField::operator-=(const SpaceTimeField& other) {
  require(times_ == other.times_, ErrorKind::GridMismatch, "time grids differ");
  for (int i = 0; i < size(); ++i) slices_[i] -= other.slices_[i];
  return *this;
}

SpaceTimeField& SpaceTimeField::operator+=(const SpaceTimeField& other) {
  require(times_ == other.times_, ErrorKind::GridMismatch, "time grids differ");
  for (int i = 0; i < size(); ++i) slices_[i] += other.slices_[i];
  return *this;
}

SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) { return a -= b; }
SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) { return a += b; }

double DominatingMeasure::mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

}  // namespace vsheet
