#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vsheet/error.hpp"
#include "vsheet/field.hpp"
#include "vsheet/grid.hpp"
#include "vsheet/nonlinear.hpp"
#include "vsheet/parallel.hpp"

namespace vsheet {

enum class SolveMode { GlobalApos, LocalAneg, KhAzero };

const char* to_string(SolveMode mode);
std::optional<SolveMode> parse_solve_mode(const std::string& name);

// Initial y_x. `amplitude` is the B0 norm of the profile.
struct InitialProfile {
  std::string name = "single_mode";  // single_mode | two_mode | band_limited_random | explicit
  double amplitude = 0.01;
  int k = 1;
  int k2 = 2;
  int band = 4;
  std::uint64_t seed = 1;
  std::optional<SpectralField> coefficients;  // for "explicit"
};

SpectralField make_profile(const FrequencyGrid& grid, const InitialProfile& profile);

struct SolverConfig {
  PhysParams params;
  int n_modes = 64;
  double period_scale = 1.0;
  double t_max = 20.0;
  int steps = 400;
  double grading_rate = 0.0;
  InitialProfile profile;
  NonlinearBackend backend = NonlinearBackend::ClosedForm;
  double picard_tol = 1e-10;
  double series_tol = 1e-12;
  double tail_tol = 1e-10;
  int max_iterations = 50;
  int j_max = 10;  // series backend operator cap
  SolveMode mode = SolveMode::GlobalApos;
  double horizon = 0.5;                 // local mode only
  std::optional<SpectralField> omega0;  // local mode: low-frequency omega(0), default 0
  double envelope_factor = 2.0;
  Exec exec = Exec::Parallel;

  FrequencyGrid grid() const;
  TimeGrid time_grid() const;
  std::vector<std::string> violations() const;
  void validate() const;
};

struct IterationRecord {
  int n = 0;
  double contraction_ratio = 0.0;  // 0 for the first sweep
  double difference = 0.0;         // B_alpha norm of the update
  double balpha_norm = 0.0;
  double tail_estimate = 0.0;
  double wall_time = 0.0;
};

// Thrown when the Picard update grows for three consecutive sweeps; carries
// the sweep history for the divergence report.
class DivergenceError : public Error {
public:
  DivergenceError(const std::string& what, std::vector<IterationRecord> history)
      : Error(ErrorKind::Divergence, what), history_(std::move(history)) {}
  const std::vector<IterationRecord>& history() const noexcept { return history_; }

private:
  std::vector<IterationRecord> history_;
};

struct SolutionBundle {
  SolutionBundle(SpaceTimeField y, SpaceTimeField w, SpectralField w0)
      : y_x(std::move(y)), omega(std::move(w)), omega0(std::move(w0)) {}

  SpaceTimeField y_x;
  SpaceTimeField omega;
  SpectralField omega0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> contraction_ratios;
  std::vector<IterationRecord> history;
  double residual_norm = 0.0;
  double tail_estimate = 0.0;
  double valid_until = 0.0;
  // B_alpha norms of y_x and omega.
  std::pair<double, double> balpha_norms;
  // sup_x |y_x|, sup_x |omega| per node.
  std::vector<double> sup_y;
  std::vector<double> sup_omega;
};

// y = S_-(t) y0x, omega = -S_-(t) (aH + M) y0x; a >= 0.
std::pair<SpaceTimeField, SpaceTimeField> linear_solution(const SpectralField& y0x, const PhysParams& params,
                                                          const TimeGrid& times);

// Full-trajectory Picard iteration around the linear solution. Throws
// Divergence (with the ratio history in the message) when the update norm
// grows for three consecutive sweeps.
SolutionBundle picard_solve(const SolverConfig& config);

// One more sweep from the bundle's trajectory; returns the B_alpha size of the change.
double extra_sweep_change(const SolutionBundle& bundle, const SolverConfig& config);

enum class ResidualMode {
  // finite differences act on the solution minus its exact decaying linear part
  Subtracted,
  Raw,
};

// Max over interior nodes (t <= valid_until) of the B0 norms of both
// linearized-equation residuals, with N1, N2 recomputed from the solution and
// time derivatives by three-point differences.
double residual_check(const SolutionBundle& bundle, const SolverConfig& config,
                      ResidualMode mode = ResidualMode::Subtracted);

// Residual of an arbitrary trajectory with given nonlinear terms switched on/off.
double linear_system_residual(const SpaceTimeField& y_x, const SpaceTimeField& omega, const PhysParams& params,
                              bool with_nonlinearity, ResidualMode mode, double t_end, Exec exec = Exec::Parallel);

struct EnvelopeReport {
  double mass = 0.0;
  double linear_mass = 0.0;
  bool dominated = false;
  bool holds = false;
};

// Dominating measure of (y_x, omega) in B_alpha against the linear solution's.
EnvelopeReport balpha_envelope_check(const SolutionBundle& bundle, const SolverConfig& config);

struct GrowthEnvelope {
  double rate = 0.0;        // C = max over low modes, 0 < t <= T of log|exp(tA)|_2 / t
  double worst_ratio = 0.0; // max_t sum_k |V_k(t)| / (exp(Ct) sum_k |V_k(0)|)
  int low_modes = 0;
};

// a < 0: growth of the modes |xi| <= split_frequency on [0, T] against the
// rate measured from the free propagator.
GrowthEnvelope low_mode_growth(const SolutionBundle& bundle, const PhysParams& params, double T);

// Method-of-lines RK4 for the sheet equations in the variables (y, Q),
// Q = 1 + omega - a (v1 + v2 y_x); omega is recovered from Q by fixed-point
// iteration. Returns (y_x, omega) at the requested nodes.
std::pair<SpaceTimeField, SpaceTimeField> oracle_rk4_vortex(const SpectralField& y0x, const SpectralField& omega0,
                                                            const PhysParams& params, const TimeGrid& output,
                                                            double max_dt);

// Nonlinear terms at every slice.
struct ForcingFields {
  SpaceTimeField F;
  SpaceTimeField G1;
  SpaceTimeField G2;
};
ForcingFields evaluate_forcing(const SpaceTimeField& y_x, const SpaceTimeField& omega, const PhysParams& params,
                               NonlinearBackend backend, const SeriesOptions& options, Exec exec);

}  // namespace vsheet
