#include <fstream>
#include <sstream>

#include "vsheet/cli_io.hpp"
#include "vsheet/spectral.hpp"

namespace vsheet {
namespace {

using nlohmann::json;

class Reader {
public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& msg) { errors_.push_back(msg); }

  // Object at obj[key]; empty object when absent.
  const json& section(const json& obj, const std::string& key, const std::string& where, bool required = false) {
    static const json empty = json::object();
    if (!obj.contains(key)) {
      if (required) error("missing required section '" + where + "'");
      return empty;
    }
    if (!obj[key].is_object()) {
      error("'" + where + "' must be an object");
      return empty;
    }
    return obj[key];
  }

  void only(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) error("unknown key '" + it.key() + "' in " + where);
    }
  }

  bool number(const json& obj, const char* key, const std::string& where, double& out, bool required = false) {
    if (!obj.contains(key)) {
      if (required) error("missing required value " + where + "." + key);
      return false;
    }
    if (!obj[key].is_number()) {
      error(where + "." + key + " must be a number");
      return false;
    }
    out = obj[key].get<double>();
    return true;
  }

  template <class Int>
  bool integer(const json& obj, const char* key, const std::string& where, Int& out) {
    if (!obj.contains(key)) return false;
    if (!obj[key].is_number_integer()) {
      error(where + "." + key + " must be an integer");
      return false;
    }
    out = obj[key].get<Int>();
    return true;
  }

  bool string(const json& obj, const char* key, const std::string& where, std::string& out, bool required = false) {
    if (!obj.contains(key)) {
      if (required) error("missing required value " + where + "." + key);
      return false;
    }
    if (!obj[key].is_string()) {
      error(where + "." + key + " must be a string");
      return false;
    }
    out = obj[key].get<std::string>();
    return true;
  }

  bool boolean(const json& obj, const char* key, const std::string& where, bool& out) {
    if (!obj.contains(key)) return false;
    if (!obj[key].is_boolean()) {
      error(where + "." + key + " must be true or false");
      return false;
    }
    out = obj[key].get<bool>();
    return true;
  }

  // [[k, re, im], ...] with k >= 0; negative modes follow by symmetry.
  std::optional<SpectralField> coefficients(const json& obj, const char* key, const std::string& where,
                                            const FrequencyGrid& grid) {
    if (!obj.contains(key)) return std::nullopt;
    const json& list = obj[key];
    const std::string name = where + "." + key;
    if (!list.is_array()) {
      error(name + " must be an array of [k, re, im]");
      return std::nullopt;
    }
    SpectralField f(grid);
    for (const auto& row : list) {
      if (!row.is_array() || row.size() != 3 || !row[0].is_number_integer() || !row[1].is_number() ||
          !row[2].is_number()) {
        error(name + " entries must be [k, re, im] with integer k");
        return std::nullopt;
      }
      const int k = row[0].get<int>();
      if (k < 0 || k > grid.k_max()) {
        error(name + ": mode " + std::to_string(k) + " outside [0, " + std::to_string(grid.k_max()) + "]");
        return std::nullopt;
      }
      const cplx c(row[1].get<double>(), row[2].get<double>());
      if (k == 0) {
        f[0] = c.real();
        if (c.imag() != 0.0) error(name + ": mode 0 must be real");
      } else {
        f[k] = c;
        f[-k] = std::conj(c);
      }
    }
    return f;
  }

private:
  std::vector<std::string>& errors_;
};

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

NonlinearBackend parse_backend(Reader& r, const std::string& name) {
  if (name == "closed_form") return NonlinearBackend::ClosedForm;
  if (name == "series") return NonlinearBackend::Series;
  r.error("numerics.backend must be 'closed_form' or 'series', got '" + name + "'");
  return NonlinearBackend::ClosedForm;
}

}  // namespace

ConfigParse parse_config(const std::string& text) {
  ConfigParse result;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    result.errors.push_back("syntax error at " + line_column(text, e.byte) + ": " +
                            (pos == std::string::npos ? what : what.substr(pos)));
    return result;
  }
  std::vector<std::string>& errors = result.errors;
  Reader r(errors);
  if (!doc.is_object()) {
    errors.push_back("configuration must be a JSON object");
    return result;
  }
  r.only(doc, "the top level", {"problem", "mode", "physics", "grid", "time", "initial", "numerics", "oracle",
                                "operators", "output"});

  RunConfig cfg;
  std::string problem;
  if (r.string(doc, "problem", "config", problem, true)) {
    if (problem == "vortex_sheet") cfg.problem = Problem::VortexSheet;
    else if (problem == "muskat") cfg.problem = Problem::Muskat;
    else r.error("problem must be 'vortex_sheet' or 'muskat', got '" + problem + "'");
  }
  const bool muskat = cfg.problem == Problem::Muskat;
  SolverConfig& v = cfg.vortex;
  MuskatConfig& m = cfg.muskat;

  // physics
  const json& phys = r.section(doc, "physics", "physics", true);
  if (muskat) {
    r.only(phys, "physics", {"density_gap"});
    r.number(phys, "density_gap", "physics", m.density_gap, true);
  } else {
    r.only(phys, "physics", {"a", "g"});
    r.number(phys, "a", "physics", v.params.atwood, true);
    r.number(phys, "g", "physics", v.params.gravity, true);
  }

  std::string mode;
  if (r.string(doc, "mode", "config", mode)) {
    if (muskat) {
      if (mode != "muskat") r.error("mode must be 'muskat' for problem muskat");
    } else if (auto sm = parse_solve_mode(mode)) {
      v.mode = *sm;
    } else {
      r.error("mode must be one of global_apos, local_aneg, kh_azero; got '" + mode + "'");
    }
  } else if (!muskat) {
    const double a = v.params.atwood;
    v.mode = a > 0 ? SolveMode::GlobalApos : (a == 0 ? SolveMode::KhAzero : SolveMode::LocalAneg);
  }

  // grid
  const json& grid = r.section(doc, "grid", "grid");
  r.only(grid, "grid", {"n_modes", "period_scale"});
  int n_modes = muskat ? m.n_modes : v.n_modes;
  double scale = 1.0;
  r.integer(grid, "n_modes", "grid", n_modes);
  r.number(grid, "period_scale", "grid", scale);
  v.n_modes = m.n_modes = n_modes;
  v.period_scale = m.period_scale = scale;

  // time
  const json& time = r.section(doc, "time", "time");
  r.only(time, "time", {"t_max", "steps", "horizon_T", "grading_rate"});
  double t_max = muskat ? m.t_max : v.t_max, grading = 0.0;
  int steps = muskat ? m.steps : v.steps;
  r.number(time, "t_max", "time", t_max);
  r.integer(time, "steps", "time", steps);
  r.number(time, "grading_rate", "time", grading);
  r.number(time, "horizon_T", "time", v.horizon);
  if (muskat && time.contains("horizon_T")) r.error("time.horizon_T applies to local_aneg runs only");
  v.t_max = m.t_max = t_max;
  v.steps = m.steps = steps;
  v.grading_rate = m.grading_rate = grading;

  // numerics
  const json& num = r.section(doc, "numerics", "numerics");
  r.only(num, "numerics", {"alpha", "backend", "tolerances", "j_max", "max_iterations", "envelope_factor",
                           "nonlinear"});
  double alpha = muskat ? m.alpha : v.params.alpha;
  r.number(num, "alpha", "numerics", alpha);
  v.params.alpha = m.alpha = alpha;
  std::string backend;
  if (r.string(num, "backend", "numerics", backend)) v.backend = m.backend = parse_backend(r, backend);
  r.integer(num, "j_max", "numerics", v.j_max);
  int max_it = v.max_iterations;
  r.integer(num, "max_iterations", "numerics", max_it);
  v.max_iterations = m.max_iterations = max_it;
  double env = v.envelope_factor;
  r.number(num, "envelope_factor", "numerics", env);
  v.envelope_factor = m.envelope_factor = env;
  r.boolean(num, "nonlinear", "numerics", m.nonlinear);
  if (!muskat && num.contains("nonlinear")) r.error("numerics.nonlinear applies to muskat runs only");
  const json& tol = r.section(num, "tolerances", "numerics.tolerances");
  r.only(tol, "numerics.tolerances", {"picard", "series", "tail"});
  double picard = v.picard_tol, series = v.series_tol;
  r.number(tol, "picard", "numerics.tolerances", picard);
  r.number(tol, "series", "numerics.tolerances", series);
  r.number(tol, "tail", "numerics.tolerances", v.tail_tol);
  v.picard_tol = m.picard_tol = picard;
  v.series_tol = m.series_tol = series;

  // initial data
  const json& init = r.section(doc, "initial", "initial");
  r.only(init, "initial", {"profile", "amplitude", "seed", "k", "k2", "band", "coefficients", "omega0"});
  InitialProfile p;
  r.string(init, "profile", "initial", p.name);
  r.number(init, "amplitude", "initial", p.amplitude);
  r.integer(init, "seed", "initial", p.seed);
  r.integer(init, "k", "initial", p.k);
  r.integer(init, "k2", "initial", p.k2);
  r.integer(init, "band", "initial", p.band);
  const bool grid_ok = n_modes >= 8 && n_modes % 2 == 0 && scale > 0.0;
  if (grid_ok) {
    const FrequencyGrid fg = make_grid(n_modes, scale);
    p.coefficients = r.coefficients(init, "coefficients", "initial", fg);
    if (p.coefficients && p.name != "explicit") r.error("initial.coefficients requires profile 'explicit'");
    if (auto w0 = r.coefficients(init, "omega0", "initial", fg)) {
      if (muskat || v.mode != SolveMode::LocalAneg) r.error("initial.omega0 applies to local_aneg runs only");
      v.omega0 = std::move(w0);
    }
    if (p.coefficients) {
      if ((*p.coefficients)[0] != 0.0) r.error("initial.coefficients must have zero mean (k = 0 entry)");
      p.amplitude = b0_norm(*p.coefficients);
    }
  }
  if (p.name != "single_mode" && p.name != "two_mode" && p.name != "band_limited_random" && p.name != "explicit")
    r.error("initial.profile must be single_mode, two_mode, band_limited_random or explicit; got '" + p.name + "'");
  if (p.name == "explicit" && !p.coefficients) r.error("profile 'explicit' needs initial.coefficients");
  if (p.name != "explicit" && grid_ok) {
    const int kmax = n_modes / 2 - 1;
    auto in_range = [&](int k, const char* what) {
      if (k < 1 || k > kmax)
        r.error(std::string("initial.") + what + " = " + std::to_string(k) + " outside [1, " + std::to_string(kmax) +
                "]");
    };
    if (p.name == "single_mode" || p.name == "two_mode") in_range(p.k, "k");
    if (p.name == "two_mode") in_range(p.k2, "k2");
    if (p.name == "band_limited_random") in_range(p.band, "band");
  }
  v.profile = m.profile = p;

  // oracle
  const json& orc = r.section(doc, "oracle", "oracle");
  r.only(orc, "oracle", {"dt", "horizon", "threshold"});
  r.number(orc, "dt", "oracle", cfg.oracle.dt);
  double x = 0.0;
  if (r.number(orc, "horizon", "oracle", x)) cfg.oracle.horizon = x;
  if (r.number(orc, "threshold", "oracle", x)) cfg.oracle.threshold = x;
  if (!(cfg.oracle.dt > 0.0)) r.error("oracle.dt must be positive");
  if (cfg.oracle.horizon && !(*cfg.oracle.horizon > 0.0)) r.error("oracle.horizon must be positive");

  // operator suites
  const json& ops = r.section(doc, "operators", "operators");
  r.only(ops, "operators", {"cases", "seed", "rho", "n_modes", "amplitude", "probe_j"});
  auto& os = cfg.operators;
  r.integer(ops, "cases", "operators", os.cases);
  r.integer(ops, "seed", "operators", os.seed);
  r.integer(ops, "n_modes", "operators", os.n_modes);
  r.integer(ops, "probe_j", "operators", os.probe_j);
  r.number(ops, "amplitude", "operators", os.amplitude);
  if (ops.contains("rho")) {
    os.rho.clear();
    if (!ops["rho"].is_array()) r.error("operators.rho must be an array of numbers");
    else
      for (const auto& e : ops["rho"]) {
        if (!e.is_number() || e.get<double>() < 0.0) r.error("operators.rho entries must be numbers >= 0");
        else os.rho.push_back(e.get<double>());
      }
  }
  if (os.cases < 1) r.error("operators.cases must be >= 1");
  if (os.n_modes < 16 || os.n_modes % 2 != 0) r.error("operators.n_modes must be even and >= 16");
  if (!(os.amplitude > 0.0 && os.amplitude < 0.5)) r.error("operators.amplitude must be in (0, 0.5)");

  // output
  const json& out = r.section(doc, "output", "output");
  r.only(out, "output", {"dir", "emit"});
  r.string(out, "dir", "output", cfg.output_dir);
  if (out.contains("emit")) {
    cfg.emit.clear();
    if (!out["emit"].is_array()) {
      r.error("output.emit must be an array");
    } else {
      for (const auto& e : out["emit"]) {
        const std::string s = e.is_string() ? e.get<std::string>() : "";
        if (s != "solution_csv" && s != "diagnostics_json" && s != "norms_csv" && s != "plotdata_csv")
          r.error("output.emit entries must be solution_csv, diagnostics_json, norms_csv or plotdata_csv");
        else cfg.emit.insert(s);
      }
    }
  }

  // physical and numerical constraints
  for (const auto& s : muskat ? m.violations() : v.violations()) errors.push_back(s);
  if (!errors.empty()) return result;
  result.config = std::move(cfg);
  return result;
}

ConfigParse load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ConfigParse r;
    r.errors.push_back("cannot read configuration file '" + path.string() + "'");
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace vsheet
