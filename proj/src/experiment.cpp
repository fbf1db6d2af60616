#include "solar/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "solar/closed_form.hpp"
#include "solar/diagnostics.hpp"
#include "solar/errors.hpp"
#include "solar/osw.hpp"

namespace solar {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "solar-flow/1";
constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw SpecError("spec: " + key + " = '" + v + "' is not a finite number");
  }
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size() || d < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(d);
  } catch (const std::exception&) {
    throw SpecError("spec: " + key + " = '" + v + "' is not a non-negative integer");
  }
}

// json has no representation for non-finite numbers.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  CsvWriter& cell(double v) {
    sep();
    out_ << format_double(v);
    return *this;
  }
  CsvWriter& empty() {
    sep();
    return *this;
  }
  void end() {
    out_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ofstream out_;
  bool first_ = true;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_svg(const fs::path& path, const std::string& title, const std::vector<double>& xs,
               const std::vector<double>& ys) {
  constexpr double W = 640, H = 400, L = 60, R = 20, T = 40, B = 40;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
    x0 = std::min(x0, xs[i]);
    x1 = std::max(x1, xs[i]);
    y0 = std::min(y0, ys[i]);
    y1 = std::max(y1, ys[i]);
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
      << H - T - B << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  out << "<text x=\"" << L << "\" y=\"" << H - 16 << "\" font-size=\"11\">" << svg_number(x0)
      << "</text>\n";
  out << "<text x=\"" << W - R << "\" y=\"" << H - 16 << "\" text-anchor=\"end\" font-size=\"11\">"
      << svg_number(x1) << "</text>\n";
  out << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" text-anchor=\"end\" font-size=\"11\">"
      << svg_number(y0) << "</text>\n";
  out << "<text x=\"" << L - 4 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\" font-size=\"11\">"
      << svg_number(y1) << "</text>\n";
  out << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  bool first = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
    if (!first) out << ' ';
    out << svg_number(px(xs[i])) << ',' << svg_number(py(ys[i]));
    first = false;
  }
  out << "\"/>\n</svg>\n";
}

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snap_%.6f.csv", t);
  return buf;
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::StoppedAtBreakdown: return "stopped_at_breakdown";
    case RunStatus::ManifoldExit: return "manifold_exit";
  }
  return "completed";
}

json run_json(const ExperimentSpec& spec) {
  return {{"n", spec.run.n},
          {"dt", spec.run.dt},
          {"t_end", spec.run.t_end},
          {"sample_every", spec.run.sample_every},
          {"continuation", spec.run.continuation},
          {"stop_at_breakdown", spec.stop_at_breakdown},
          {"event_refine_tol", spec.run.event_refine_tol}};
}

json initial_json(const InitialCondition& ic) {
  json modes = json::array();
  for (const auto& m : ic.modes) modes.push_back({m.k, m.sin_coeff, m.cos_coeff});
  return {{"preset", ic.preset}, {"constant", ic.constant}, {"modes", modes}, {"reflect", ic.reflect}};
}

json breakdown_json(const BreakdownReport& b) {
  return {{"occurred", b.occurred},
          {"T", b.occurred ? number(b.T) : json(nullptr)},
          {"theta_star", b.occurred ? number(b.theta_star) : json(nullptr)},
          {"index", b.index},
          {"sign_transition", to_string(b.sign_transition)},
          {"bracket_width", number(b.bracket_width)},
          {"bisection_steps", b.bisection_steps},
          {"manifold_exit", b.manifold_exit}};
}

json mckean_json(const McKeanVerdict& v) {
  return {{"verdict", to_string(v.kind)},
          {"theta_star_candidates", v.theta_star_candidates},
          {"reflected", v.reflected},
          {"advisory", v.advisory},
          {"note", v.note}};
}

json lemma_json(const LemmaMonitorReport& r) {
  json j = {{"applicable", r.applicable}, {"note", r.note}};
  if (!r.applicable) return j;
  j["interval"] = {r.a, r.b, r.c, r.d};
  j["M"] = number(r.M);
  j["N"] = number(r.N);
  j["monotone_margin"] = number(r.monotone_margin);
  j["upper_bound_margin"] = number(r.upper_bound_margin);
  j["decay_margin"] = number(r.decay_margin);
  j["integral_bound_margin"] = number(r.integral_bound_margin);
  j["monotone_ok"] = r.monotone_ok;
  j["upper_bound_ok"] = r.upper_bound_ok;
  j["decay_ok"] = r.decay_ok;
  j["integral_ok"] = r.integral_ok;
  j["samples_checked"] = r.samples_checked;
  j["integral_samples_checked"] = r.integral_samples_checked;
  return j;
}

json conservation_json(const RunOutput& out) {
  double ang = 0, c1 = 0, c2 = 0, c3 = 0, ds = 0, dE = 0, dL = 0;
  const SeriesRow& r0 = out.series.front();
  for (const auto& r : out.series) {
    if (!(r.min_x > 0.0)) continue;
    ang = std::max(ang, r.angmom_err_max);
    c1 = std::max(c1, r.c1);
    c2 = std::max(c2, r.c2);
    c3 = std::max(c3, r.c3);
    ds = std::max(ds, std::abs(r.sigma - r0.sigma));
    dE = std::max(dE, std::abs(r.E - r0.E));
    dL = std::max(dL, std::abs(r.L2 - r0.L2));
  }
  return {{"angmom_err_max", number(ang)}, {"c1_max", number(c1)},   {"c2_max", number(c2)},
          {"c3_max", number(c3)},          {"sigma_drift", number(ds)}, {"E_drift", number(dE)},
          {"L2_drift", number(dL)}};
}

void write_series_plots(const fs::path& dir, const std::vector<double>& t,
                        const std::vector<std::pair<std::string, std::vector<double>>>& cols) {
  for (const auto& [name, ys] : cols) write_svg(dir / (name + ".svg"), name + " vs t", t, ys);
}

int run_mu_lambda(const ExperimentSpec& spec, std::ostream& err) {
  const fs::path& dir = spec.output_dir;
  const PeriodicGrid grid(spec.run.n);
  const Field u0 = spec.initial.sample(grid);
  const ModelParams params(spec.lambda, mean(u0));

  json report = {{"schema", kSchema},
                 {"family", to_string(Family::MuLambda)},
                 {"model", {{"lambda", spec.lambda}, {"sigma", params.sigma()}, {"gamma", params.gamma()}}},
                 {"initial", initial_json(spec.initial)},
                 {"run", run_json(spec)}};
  if (spec.monitor_mckean) report["mckean"] = mckean_json(mckean_classify(u0, spec.lambda, spec.run.sign_band));

  RunConfig cfg = spec.run;
  cfg.keep_states = true;
  cfg.continuation = spec.run.continuation || !spec.stop_at_breakdown;
  std::optional<RunOutput> result;
  try {
    result = integrate(u0, params, cfg);
  } catch (const std::exception& e) {
    report["status"] = "error";
    report["error"] = e.what();
    write_json(dir / "report.json", report);
    err << "solar-flow: " << e.what() << '\n';
    return kFailed;
  }
  const RunOutput& out = *result;

  {
    CsvWriter csv(dir / "series.csv", "t,min_x,E,L2,sigma,angmom_err_max,c1,c2,c3");
    for (const auto& r : out.series) {
      csv.cell(r.t).cell(r.min_x).cell(r.E).cell(r.L2).cell(r.sigma).cell(r.angmom_err_max);
      csv.cell(r.c1).cell(r.c2).cell(r.c3).end();
    }
  }

  json snaps = json::array();
  const Field m0 = out.m0;
  double vort = -1.0;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const bool last = i + 1 == out.samples.size();
    const bool pick = i == 0 || last || (spec.snapshot_every > 0 && i % spec.snapshot_every == 0);
    if (!pick) continue;
    const SolarState& s = out.samples[i];
    std::optional<EulerianSnapshot> e;
    if (spec.monitor_reconstruction && s.x.min() > 0.0) {
      try {
        e = reconstruct(s, params);
        if (last) vort = vorticity_transport_check(s, *e, params, m0);
      } catch (const ReconstructionError&) {
        e.reset();
      }
    }
    const std::string name = snapshot_name(s.t);
    CsvWriter csv(dir / name, "theta,x,v,y,w,u,m");
    for (std::size_t j = 0; j < grid.size(); ++j) {
      csv.cell(grid.theta(j)).cell(s.x[j]).cell(s.v[j]).cell(s.y[j]).cell(s.w[j]);
      if (e) {
        csv.cell(e->u[j]).cell(e->m[j]);
      } else {
        csv.empty().empty();
      }
      csv.end();
    }
    snaps.push_back({{"t", s.t}, {"file", name}, {"reconstructed", e.has_value()}});
  }

  json monitors = {{"conservation", conservation_json(out)},
                   {"vorticity_transport_final", vort >= 0.0 ? json(vort) : json(nullptr)}};
  if (spec.monitor_lemmas) {
    try {
      monitors["lemmas"] = lemma_json(lemma_monitors(out));
    } catch (const std::invalid_argument& e) {
      monitors["lemmas"] = {{"applicable", false}, {"note", e.what()}};
    }
  }
  const bool stopped = out.status != RunStatus::Completed;
  report["status"] = to_string(out.status);
  report["breakdown"] = breakdown_json(out.breakdown);
  report["monitors"] = monitors;
  report["snapshots"] = snaps;
  write_json(dir / "report.json", report);

  if (spec.plots) {
    std::vector<double> t, mx, E, ang;
    for (const auto& r : out.series) {
      t.push_back(r.t);
      mx.push_back(r.min_x);
      E.push_back(r.E);
      ang.push_back(r.angmom_err_max);
    }
    write_series_plots(dir, t, {{"min_x", mx}, {"E", E}, {"angmom_err_max", ang}});
  }
  return stopped && spec.stop_at_breakdown ? kBreakdown : kCompleted;
}

int run_osw(const ExperimentSpec& spec, std::ostream& err) {
  const fs::path& dir = spec.output_dir;
  const PeriodicGrid grid(spec.run.n);
  const Field u0 = spec.initial.sample(grid);
  OswConfig cfg;
  cfg.n = spec.run.n;
  cfg.dt = spec.run.dt;
  cfg.t_end = spec.run.t_end;
  cfg.sample_every = spec.run.sample_every;
  cfg.stop_eta_theta = spec.stop_eta_theta;
  cfg.ermakov_stride = spec.ermakov_stride;
  cfg.keep_states = true;

  json report = {{"schema", kSchema},
                 {"family", to_string(Family::Osw)},
                 {"model", {{"lambda_osw", spec.lambda}}},
                 {"initial", initial_json(spec.initial)},
                 {"run", run_json(spec)}};
  std::optional<OswRunOutput> result;
  try {
    result = integrate_osw(u0, spec.lambda, cfg);
  } catch (const std::exception& e) {
    report["status"] = "error";
    report["error"] = e.what();
    write_json(dir / "report.json", report);
    err << "solar-flow: " << e.what() << '\n';
    return kFailed;
  }
  const OswRunOutput& out = *result;
  {
    CsvWriter csv(dir / "series.csv", "t,min_eta_theta,max_eta_theta,mean_m,min_force,vorticity_err");
    for (const auto& r : out.series) {
      csv.cell(r.t).cell(r.min_eta_theta).cell(r.max_eta_theta).cell(r.mean_m).cell(r.min_force);
      csv.cell(r.vorticity_err).end();
    }
  }
  json snaps = json::array();
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const bool last = i + 1 == out.samples.size();
    if (!(i == 0 || last || (spec.snapshot_every > 0 && i % spec.snapshot_every == 0))) continue;
    const OswState& s = out.samples[i];
    const std::string name = snapshot_name(s.t);
    CsvWriter csv(dir / name, "theta,m,eta,eta_theta,psi");
    for (std::size_t j = 0; j < grid.size(); ++j) {
      csv.cell(grid.theta(j)).cell(s.m[j]).cell(s.eta[j]).cell(s.eta_theta[j]).cell(s.psi[j]).end();
    }
    snaps.push_back({{"t", s.t}, {"file", name}});
  }
  const auto& e = out.ermakov;
  report["status"] = out.reached_stop ? "stopped_at_breakdown" : "completed";
  report["breakdown"] = {{"reached_stop", out.reached_stop},
                         {"stop_eta_theta", cfg.stop_eta_theta},
                         {"stop_time", out.reached_stop ? json(out.stop_time) : json(nullptr)},
                         {"min_eta_theta_monotone", out.min_eta_theta_monotone}};
  report["monitors"] = {
      {"min_force", number(out.min_force)},
      {"force_positive", out.force_positive},
      {"max_vorticity_err", number(out.max_vorticity_err)},
      {"mean_m_drift", number(out.mean_m_drift)},
      {"ermakov",
       {{"windows", out.ermakov_windows},
        {"rho_residual", number(e.rho_residual)},
        {"rho_relative", number(e.rho_relative)},
        {"linear_residual", number(e.linear_residual)},
        {"linear_relative", number(e.linear_relative)},
        {"angular_momentum_error", number(e.angular_momentum_error)}}},
      {"degregorio_margin", out.degregorio_checked ? number(out.degregorio_margin) : json(nullptr)}};
  report["snapshots"] = snaps;
  write_json(dir / "report.json", report);
  if (spec.plots) {
    std::vector<double> t, mn, F;
    for (const auto& r : out.series) {
      t.push_back(r.t);
      mn.push_back(r.min_eta_theta);
      F.push_back(r.min_force);
    }
    write_series_plots(dir, t, {{"min_eta_theta", mn}, {"min_force", F}});
  }
  return out.reached_stop && spec.stop_at_breakdown ? kBreakdown : kCompleted;
}

ForceLaw particle_force(const ParticleSpec& p) {
  if (p.force == "free") return [](double) { return 0.0; };
  if (p.force == "harmonic") return [](double) { return -1.0; };
  if (p.force == "spiral") return [](double t) { return -1.0 / ((1.0 - t) * (1.0 - t)); };
  const double c = p.force_value;
  return [c](double) { return c; };
}

int run_particle(const ExperimentSpec& spec, std::ostream&) {
  const fs::path& dir = spec.output_dir;
  const auto traj =
      particle_integrate(particle_force(spec.particle), spec.particle.p0, spec.run.t_end, spec.run.dt);
  {
    CsvWriter csv(dir / "trajectory.csv", "t,x,vx,y,vy,r,angular_momentum");
    for (std::size_t i = 0; i < traj.samples.size(); i += spec.run.sample_every) {
      const auto& s = traj.samples[i];
      csv.cell(s.t).cell(s.p.x).cell(s.p.vx).cell(s.p.y).cell(s.p.vy).cell(s.p.radius());
      csv.cell(s.p.angular_momentum()).end();
    }
  }
  const auto& last = traj.samples.back();
  json report = {{"schema", kSchema},
                 {"family", to_string(Family::Particle)},
                 {"force", spec.particle.force},
                 {"p0", {spec.particle.p0.x, spec.particle.p0.vx, spec.particle.p0.y, spec.particle.p0.vy}},
                 {"run", run_json(spec)},
                 {"status", traj.reached_end ? "completed" : "truncated_at_singular_force"},
                 {"t_final", last.t},
                 {"x_zero_crossings", traj.x_zero_crossings},
                 {"r_minima", traj.r_minima},
                 {"min_r", traj.min_r},
                 {"r_final", last.p.radius()}};
  write_json(dir / "report.json", report);
  if (spec.plots) {
    std::vector<double> xs, ys;
    for (const auto& s : traj.samples) {
      xs.push_back(s.p.x);
      ys.push_back(s.p.y);
    }
    write_svg(dir / "orbit.svg", "orbit (x, y)", xs, ys);
  }
  return kCompleted;
}

int run_single(const ExperimentSpec& spec, std::ostream& err) {
  fs::create_directories(spec.output_dir);
  switch (spec.family) {
    case Family::MuLambda: return run_mu_lambda(spec, err);
    case Family::Osw: return run_osw(spec, err);
    case Family::Particle: return run_particle(spec, err);
  }
  return kFailed;
}

void apply_sweep_value(ExperimentSpec& s, const std::string& param, const std::string& v) {
  const std::string key = "sweep.values";
  if (param == "lambda") {
    s.lambda = parse_double(key, v);
  } else if (param == "n") {
    s.run.n = parse_size(key, v);
  } else if (param == "dt") {
    s.run.dt = parse_double(key, v);
  } else if (param == "t_end") {
    s.run.t_end = parse_double(key, v);
  } else {
    throw SpecError("spec: sweep.parameter must be one of lambda, n, dt, t_end");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

KeyValueFile KeyValueFile::parse(const std::string& text) {
  KeyValueFile f;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw SpecError("spec line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw SpecError("spec line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw SpecError("spec line " + std::to_string(lineno) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (f.values_.count(full)) throw SpecError("spec line " + std::to_string(lineno) + ": duplicate key " + full);
    f.values_[full] = trim(line.substr(eq + 1));
  }
  return f;
}

KeyValueFile KeyValueFile::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read spec file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueFile::get(const std::string& key, const std::string& fallback) const {
  used_[key] = true;
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_double(key, get(key, "")) : (used_[key] = true, fallback);
}

std::size_t KeyValueFile::get_size(const std::string& key, std::size_t fallback) const {
  return has(key) ? parse_size(key, get(key, "")) : (used_[key] = true, fallback);
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key, "");
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw SpecError("spec: " + key + " = '" + v + "' is not a boolean");
}

std::vector<std::string> KeyValueFile::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

std::string to_string(Family f) {
  switch (f) {
    case Family::MuLambda: return "mu-lambda";
    case Family::Osw: return "osw";
    case Family::Particle: return "particle";
  }
  return "mu-lambda";
}

std::vector<std::string> initial_presets() {
  return {"fourier", "constant", "sine", "burgers", "hunter-saxton", "mckean-global",
          "mckean-breakdown"};
}

Field InitialCondition::sample(PeriodicGrid grid) const {
  auto fourier = [](double c, std::vector<FourierMode> modes) {
    return [c, modes](double th) {
      double s = c;
      for (const auto& m : modes) {
        const double w = 2.0 * kPi * m.k * th;
        s += m.sin_coeff * std::sin(w) + m.cos_coeff * std::cos(w);
      }
      return s;
    };
  };
  std::function<double(double)> fn;
  if (preset == "fourier") {
    fn = fourier(constant, modes);
  } else if (preset == "constant") {
    fn = fourier(constant, {});
  } else if (preset == "sine") {
    fn = fourier(0.0, {{1, 1.0, 0.0}});
  } else if (preset == "burgers") {
    fn = fourier(0.0, {{1, 1.0 / (2.0 * kPi), 0.0}});
  } else if (preset == "hunter-saxton") {
    fn = fourier(0.0, {{1, 2.0 / kPi * std::atan(1.0 / std::sqrt(2.0)), 0.0}});
  } else if (preset == "mckean-global") {
    fn = fourier(1.0, {{1, 0.01, 0.0}});
  } else if (preset == "mckean-breakdown") {
    fn = fourier(1.0, {{1, 0.1, 0.0}});
  } else {
    throw SpecError("spec: unknown initial preset '" + preset + "'");
  }
  Field u0 = Field::sample(grid, fn);
  if (!u0.all_finite()) throw SpecError("spec: initial condition is not finite");
  return reflect ? -solar::reflect(u0) : u0;
}

ExperimentSpec parse_experiment(const KeyValueFile& f) {
  ExperimentSpec s;
  const std::string family = f.get("model.family", "mu-lambda");
  if (family == "mu-lambda") {
    s.family = Family::MuLambda;
  } else if (family == "osw") {
    s.family = Family::Osw;
  } else if (family == "particle") {
    s.family = Family::Particle;
  } else {
    throw SpecError("spec: model.family must be mu-lambda, osw or particle");
  }
  if (s.family != Family::Particle && !f.has("model.lambda")) {
    throw SpecError("spec: model.lambda is required");
  }
  s.lambda = f.get_double("model.lambda", s.lambda);
  if (s.family == Family::MuLambda && s.lambda == 1.0) {
    throw SpecError("spec: lambda = 1 makes gamma = 2/(lambda - 1) singular");
  }

  s.initial.preset = f.get("initial.preset", "fourier");
  s.initial.constant = f.get_double("initial.constant", 0.0);
  s.initial.reflect = f.get_bool("initial.reflect", false);
  for (const auto& item : split(f.get("initial.modes", ""), ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw SpecError("spec: initial.modes entries are k:sin:cos, got '" + item + "'");
    FourierMode m;
    m.k = static_cast<int>(parse_size("initial.modes", parts[0]));
    m.sin_coeff = parse_double("initial.modes", parts[1]);
    m.cos_coeff = parse_double("initial.modes", parts[2]);
    s.initial.modes.push_back(m);
  }
  const auto presets = initial_presets();
  if (std::find(presets.begin(), presets.end(), s.initial.preset) == presets.end()) {
    throw SpecError("spec: unknown initial preset '" + s.initial.preset + "'");
  }

  s.run.n = f.get_size("run.n", s.run.n);
  s.run.dt = f.get_double("run.dt", s.run.dt);
  s.run.t_end = f.get_double("run.t_end", s.run.t_end);
  s.run.sample_every = f.get_size("run.sample_every", s.run.sample_every);
  s.run.event_refine_tol = f.get_double("run.event_refine_tol", s.run.event_refine_tol);
  s.run.continuation = f.get_bool("run.continuation", false);
  s.run.sign_band = f.get_double("run.sign_band", s.run.sign_band);
  s.stop_at_breakdown = f.get_bool("run.stop_at_breakdown", true);
  s.snapshot_every = f.get_size("run.snapshot_every", 0);
  s.stop_eta_theta = f.get_double("run.stop_eta_theta", s.stop_eta_theta);
  s.ermakov_stride = f.get_size("run.ermakov_stride", s.ermakov_stride);

  s.monitor_lemmas = f.get_bool("monitors.lemmas", true);
  s.monitor_mckean = f.get_bool("monitors.mckean", true);
  s.monitor_reconstruction = f.get_bool("monitors.reconstruction", true);

  s.particle.force = f.get("particle.force", "free");
  if (s.particle.force != "free" && s.particle.force != "harmonic" && s.particle.force != "spiral" &&
      s.particle.force != "constant") {
    throw SpecError("spec: particle.force must be free, harmonic, spiral or constant");
  }
  s.particle.force_value = f.get_double("particle.value", 0.0);
  s.particle.p0.x = f.get_double("particle.x", s.particle.p0.x);
  s.particle.p0.vx = f.get_double("particle.vx", s.particle.p0.vx);
  s.particle.p0.y = f.get_double("particle.y", s.particle.p0.y);
  s.particle.p0.vy = f.get_double("particle.vy", s.particle.p0.vy);

  s.output_dir = f.get("output.dir", "out");
  s.plots = f.get_bool("output.plots", true);

  if (f.has("sweep.parameter")) {
    SweepSpec sw;
    sw.parameter = f.get("sweep.parameter", "");
    sw.values = split(f.get("sweep.values", ""), ',');
    if (sw.values.empty()) throw SpecError("spec: sweep.values is empty");
    ExperimentSpec probe = s;
    for (const auto& v : sw.values) apply_sweep_value(probe, sw.parameter, v);
    s.sweep = sw;
  }

  const auto extra = f.unused();
  if (!extra.empty()) throw SpecError("spec: unknown key " + extra.front());
  try {
    PeriodicGrid check(s.run.n);
    (void)check;
    s.run.validate();
  } catch (const std::invalid_argument& e) {
    throw SpecError(std::string("spec: ") + e.what());
  }
  if (s.family != Family::Particle) (void)s.initial.sample(PeriodicGrid(s.run.n));
  return s;
}

ExperimentSpec load_experiment(const fs::path& path) { return parse_experiment(KeyValueFile::load(path)); }

void apply_overrides(ExperimentSpec& spec, const Overrides& o) {
  if (o.n) spec.run.n = *o.n;
  if (o.dt) spec.run.dt = *o.dt;
  if (o.t_end) spec.run.t_end = *o.t_end;
  if (o.out) spec.output_dir = *o.out;
  try {
    PeriodicGrid check(spec.run.n);
    (void)check;
    spec.run.validate();
  } catch (const std::invalid_argument& e) {
    throw SpecError(std::string("override: ") + e.what());
  }
}

std::size_t sweep_workers() {
  const char* env = std::getenv("SOLAR_FLOW_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    const long v = std::stol(env);
    return v >= 1 ? static_cast<std::size_t>(v) : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

int run_experiment(const ExperimentSpec& spec, std::ostream& err) {
  try {
    if (!spec.sweep) return run_single(spec, err);

    const SweepSpec& sw = *spec.sweep;
    const std::size_t count = sw.values.size();
    std::vector<int> codes(count, kFailed);
    std::vector<std::string> messages(count);
    std::vector<fs::path> dirs(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < count; i = next++) {
        ExperimentSpec child = spec;
        child.sweep.reset();
        std::ostringstream child_err;
        try {
          apply_sweep_value(child, sw.parameter, sw.values[i]);
          child.output_dir = spec.output_dir / (sw.parameter + "_" + sw.values[i]);
          dirs[i] = child.output_dir;
          codes[i] = run_single(child, child_err);
        } catch (const std::exception& e) {
          child_err << "solar-flow: " << e.what() << '\n';
          codes[i] = kFailed;
        }
        messages[i] = child_err.str();
      }
    };
    const std::size_t workers = std::min(sweep_workers(), count);
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    json runs = json::array();
    int code = kCompleted;
    for (std::size_t i = 0; i < count; ++i) {
      err << messages[i];
      runs.push_back({{"value", sw.values[i]},
                      {"dir", dirs[i].filename().string()},
                      {"exit_code", codes[i]}});
      if (codes[i] == kFailed) code = kFailed;
      if (codes[i] == kBreakdown && code == kCompleted) code = kBreakdown;
    }
    fs::create_directories(spec.output_dir);
    write_json(spec.output_dir / "sweep.json",
               {{"schema", kSchema}, {"parameter", sw.parameter}, {"runs", runs}});
    return code;
  } catch (const std::exception& e) {
    err << "solar-flow: " << e.what() << '\n';
    return kFailed;
  }
}

}  // namespace solar
