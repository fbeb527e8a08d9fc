#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include "vsheet/cli_io.hpp"
#include "vsheet/csv.hpp"
#include "vsheet/spectral.hpp"

namespace vsheet {
namespace {

using nlohmann::json;
using Files = std::map<std::string, std::string>;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string diagnostics(const std::vector<IterationRecord>& history, double residual, bool final_residual) {
  std::string out;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& h = history[i];
    json rec = {{"n", h.n},
                {"contraction_ratio", finite_or_null(h.contraction_ratio)},
                {"balpha_norm", finite_or_null(h.balpha_norm)},
                {"update_norm", finite_or_null(h.difference)},
                {"tail_estimate", finite_or_null(h.tail_estimate)},
                {"wall_time", h.wall_time}};
    // the residual is evaluated once, on the accepted iterate
    if (final_residual && i + 1 == history.size()) rec["residual"] = finite_or_null(residual);
    out += rec.dump() + "\n";
  }
  return out;
}

// empty when too few modes sit above the fit floor
std::string rho_hat(const SpectralField& u) {
  try {
    return format_double(analyticity_fit(u));
  } catch (const Error&) {
    return "";
  }
}

std::string norms_vortex(const SolutionBundle& b) {
  std::ostringstream os;
  os << "t,b0_y,b0_w,sup_y,sup_w,rho_hat\n";
  for (int n = 0; n < b.y_x.size(); ++n)
    os << format_double(b.y_x.times()[n]) << ',' << format_double(b0_norm(b.y_x[n])) << ','
       << format_double(b0_norm(b.omega[n])) << ',' << format_double(b.sup_y[n]) << ','
       << format_double(b.sup_omega[n]) << ',' << rho_hat(b.y_x[n]) << '\n';
  return os.str();
}

std::string norms_muskat(const MuskatSolution& s) {
  std::ostringstream os;
  os << "t,b0_fx,sup_fx,rho_hat\n";
  for (int n = 0; n < s.f_x.size(); ++n)
    os << format_double(s.f_x.times()[n]) << ',' << format_double(s.b0_profile[n]) << ','
       << format_double(s.sup_profile[n]) << ',' << rho_hat(s.f_x[n]) << '\n';
  return os.str();
}

std::string plotdata(const SpaceTimeField& a, const SpaceTimeField& b, const char* header) {
  std::ostringstream os;
  os << header << '\n';
  const auto x = a.grid().points();
  for (int n = 0; n < a.size(); ++n) {
    const auto va = synthesize(a[n]), vb = synthesize(b[n]);
    const std::string t = format_double(a.times()[n]);
    for (std::size_t j = 0; j < x.size(); ++j)
      os << t << ',' << format_double(x[j]) << ',' << format_double(va[j]) << ',' << format_double(vb[j]) << '\n';
  }
  return os.str();
}

std::string csv_of(const SpaceTimeField& f) {
  std::ostringstream os;
  write_csv(os, f);
  return os.str();
}

json profile_json(const InitialProfile& p) {
  return {{"profile", p.name}, {"amplitude", p.amplitude}, {"seed", p.seed}, {"k", p.k}, {"k2", p.k2},
          {"band", p.band}};
}

std::vector<double> ratios_of(const std::vector<IterationRecord>& h) {
  std::vector<double> r;
  for (std::size_t i = 1; i < h.size(); ++i) r.push_back(h[i].contraction_ratio);
  return r;
}

double total_sweep_time(const std::vector<IterationRecord>& h) {
  double s = 0.0;
  for (const auto& r : h) s += r.wall_time;
  return s;
}

void write_all(const std::filesystem::path& dir, const Files& files, RunOutcome& outcome) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files) {
    const auto target = dir / name;
    const auto tmp = dir / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << content;
      if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
    outcome.written.push_back(target);
  }
}

}  // namespace

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

RunOutcome run(const RunConfig& config, const std::filesystem::path& out_dir) {
  RunOutcome outcome;
  Files files;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  const bool emit_diag = config.emit.count("diagnostics_json") > 0;
  json summary;
  summary["problem"] = config.problem == Problem::Muskat ? "muskat" : "vortex_sheet";
  summary["threads"] = max_threads();

  try {
    if (config.problem == Problem::VortexSheet) {
      const SolverConfig& c = config.vortex;
      summary["mode"] = to_string(c.mode);
      summary["initial"] = profile_json(c.profile);
      summary["physics"] = {{"a", c.params.atwood}, {"g", c.params.gravity}, {"alpha", c.params.alpha}};
      try {
        const SolutionBundle b = picard_solve(c);
        const EnvelopeReport env = balpha_envelope_check(b, c);
        summary["converged"] = b.converged;
        summary["iterations"] = b.iterations;
        summary["contraction_ratios"] = b.contraction_ratios;
        summary["residual"] = finite_or_null(b.residual_norm);
        summary["tail_estimate"] = b.tail_estimate;
        summary["valid_until"] = b.valid_until;
        summary["balpha_norms"] = {{"y_x", b.balpha_norms.first}, {"omega", b.balpha_norms.second}};
        summary["envelope"] = {{"mass", env.mass}, {"linear_mass", env.linear_mass}, {"holds", env.holds}};
        summary["decay"] = {{"sup_y_initial", b.sup_y.front()}, {"sup_y_final", b.sup_y.back()},
                            {"sup_w_initial", b.sup_omega.front()}, {"sup_w_final", b.sup_omega.back()}};
        summary["timings"] = {{"sweeps_s", total_sweep_time(b.history)}, {"total_s", elapsed()}};
        if (emit_diag) files["diagnostics.jsonl"] = diagnostics(b.history, b.residual_norm, b.converged);
        if (b.converged) {
          if (config.emit.count("solution_csv")) {
            files["solution_y_x.csv"] = csv_of(b.y_x);
            files["solution_omega.csv"] = csv_of(b.omega);
          }
          if (config.emit.count("norms_csv")) files["norms.csv"] = norms_vortex(b);
          if (config.emit.count("plotdata_csv")) files["plotdata.csv"] = plotdata(b.y_x, b.omega, "t,x,y_x,omega");
        } else {
          outcome.exit_code = kExitDivergence;
          outcome.message = "no convergence within max_iterations";
        }
      } catch (const DivergenceError& e) {
        summary["converged"] = false;
        summary["iterations"] = e.history().size();
        summary["contraction_ratios"] = ratios_of(e.history());
        summary["divergence"] = e.what();
        if (emit_diag) files["diagnostics.jsonl"] = diagnostics(e.history(), 0.0, false);
        outcome.exit_code = kExitDivergence;
        outcome.message = e.what();
      }
    } else {
      const MuskatConfig& c = config.muskat;
      summary["mode"] = "muskat";
      summary["initial"] = profile_json(c.profile);
      summary["physics"] = {{"density_gap", c.density_gap}, {"alpha", c.alpha}};
      try {
        const MuskatSolution s = muskat_picard_solve(c);
        summary["converged"] = s.converged;
        summary["iterations"] = s.iterations;
        summary["contraction_ratios"] = s.contraction_ratios;
        summary["residual"] = finite_or_null(s.residual_norm);
        summary["balpha_norm"] = s.balpha_norm;
        summary["nonlinear"] = c.nonlinear;
        summary["decay"] = {{"b0_initial", s.b0_profile.front()}, {"b0_final", s.b0_profile.back()}};
        summary["timings"] = {{"sweeps_s", total_sweep_time(s.history)}, {"total_s", elapsed()}};
        if (emit_diag) files["diagnostics.jsonl"] = diagnostics(s.history, s.residual_norm, s.converged);
        if (s.converged) {
          if (config.emit.count("solution_csv")) files["solution_f_x.csv"] = csv_of(s.f_x);
          if (config.emit.count("norms_csv")) files["norms.csv"] = norms_muskat(s);
          if (config.emit.count("plotdata_csv")) {
            SpaceTimeField f(s.f_x.grid(), s.f_x.times());
            for (int n = 0; n < f.size(); ++n) f[n] = antiderivative(s.f_x[n]);
            files["plotdata.csv"] = plotdata(f, s.f_x, "t,x,f,f_x");
          }
        } else {
          outcome.exit_code = kExitDivergence;
          outcome.message = "no convergence within max_iterations";
        }
      } catch (const DivergenceError& e) {
        summary["converged"] = false;
        summary["iterations"] = e.history().size();
        summary["contraction_ratios"] = ratios_of(e.history());
        summary["divergence"] = e.what();
        if (emit_diag) files["diagnostics.jsonl"] = diagnostics(e.history(), 0.0, false);
        outcome.exit_code = kExitDivergence;
        outcome.message = e.what();
      }
    }
    files["summary.json"] = dump(summary);
  } catch (const std::exception& e) {
    outcome.exit_code = kExitError;
    outcome.message = e.what();
    return outcome;
  }

  try {
    write_all(out_dir, files, outcome);
  } catch (const std::exception& e) {
    for (const auto& p : outcome.written) std::filesystem::remove(p);
    outcome.written.clear();
    outcome.exit_code = kExitError;
    outcome.message = e.what();
  }
  if (outcome.exit_code == kExitOk) outcome.message = "converged";
  return outcome;
}

}  // namespace vsheet
