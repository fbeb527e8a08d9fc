#pragma once

#include <complex>
#include <span>
#include <vector>

#include "vsheet/grid.hpp"

namespace vsheet {

using cplx = std::complex<double>;

// One time slice of a real periodic function, stored as Fourier coefficients
// c_k with u(x) = sum_k c_k exp(i xi_k x).
class SpectralField {
public:
  explicit SpectralField(const FrequencyGrid& grid);
  SpectralField(const FrequencyGrid& grid, std::vector<cplx> coeffs);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  int size() const noexcept { return grid_.n_modes(); }

  cplx& operator[](int k) { return coeffs_[grid_.index(k)]; }
  const cplx& operator[](int k) const { return coeffs_[grid_.index(k)]; }

  std::span<cplx> coeffs() noexcept { return coeffs_; }
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }

  // Sets c_{-N/2} = 0 and replaces (c_k, c_{-k}) by their Hermitian part.
  void make_real();
  bool is_hermitian(double tol = 0.0) const;
  double max_abs() const;
  double mean() const { return (*this)[0].real(); }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  SpectralField& operator*=(cplx s);

  static SpectralField constant(const FrequencyGrid& grid, double value);
  static SpectralField cosine(const FrequencyGrid& grid, int k, double amplitude = 1.0);
  static SpectralField sine(const FrequencyGrid& grid, int k, double amplitude = 1.0);

private:
  FrequencyGrid grid_;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);
SpectralField operator*(cplx s, SpectralField a);
SpectralField operator-(SpectralField a);

void require_same_grid(const SpectralField& a, const SpectralField& b);

// Strictly increasing time nodes t_0 = 0 < ... < t_M.
class TimeGrid {
public:
  explicit TimeGrid(std::vector<double> nodes);

  // M equal steps on [0, t_max].
  static TimeGrid uniform(double t_max, int steps);
  // M steps on [0, t_max] whose length grows like exp(rate * t); rate = 0
  // reduces to the uniform grid. Resolves the early transient at fixed M.
  static TimeGrid graded(double t_max, int steps, double rate);

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  int steps() const noexcept { return size() - 1; }
  double operator[](int i) const { return nodes_[i]; }
  double t_max() const { return nodes_.back(); }

  bool operator==(const TimeGrid& other) const { return nodes_ == other.nodes_; }

private:
  std::vector<double> nodes_;
};

// A SpectralField per time node; all slices share one grid.
class SpaceTimeField {
public:
  SpaceTimeField(const FrequencyGrid& grid, TimeGrid times);
  SpaceTimeField(TimeGrid times, std::vector<SpectralField> slices);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  const TimeGrid& times() const noexcept { return times_; }
  int size() const noexcept { return times_.size(); }

  SpectralField& operator[](int i) { return slices_[i]; }
  const SpectralField& operator[](int i) const { return slices_[i]; }
  std::vector<SpectralField>& slices() noexcept { return slices_; }
  const std::vector<SpectralField>& slices() const noexcept { return slices_; }

  SpaceTimeField& operator-=(const SpaceTimeField& other);
  SpaceTimeField& operator+=(const SpaceTimeField& other);

private:
  FrequencyGrid grid_;
  TimeGrid times_;
  std::vector<SpectralField> slices_;
};

SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b);
SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b);

// Per-frequency envelope with weights(k) >= exp(alpha t |xi_k|) |c_k(t)| at
// every node; total mass is the space-time norm.
struct DominatingMeasure {
  FrequencyGrid grid;
  std::vector<double> weights;  // indexed like SpectralField storage

  double mass() const;
  double weight(int k) const { return weights[grid.index(k)]; }
};

}  // namespace vsheet
