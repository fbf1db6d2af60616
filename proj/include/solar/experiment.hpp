#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "solar/calculus.hpp"
#include "solar/integrator.hpp"
#include "solar/particle.hpp"

namespace solar {

/// Thrown for unreadable or malformed experiment specs.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat "[section]" + "key = value" text. Keys are stored as "section.key".
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text);
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  /// Keys that no accessor has asked for.
  std::vector<std::string> unused() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

enum class Family { MuLambda, Osw, Particle };

std::string to_string(Family f);

struct FourierMode {
  int k = 1;
  double sin_coeff = 0.0;
  double cos_coeff = 0.0;
};

/// Initial velocity as a named preset or as c + sum (a_k sin + b_k cos)(2 pi k theta).
struct InitialCondition {
  std::string preset = "fourier";
  double constant = 0.0;
  std::vector<FourierMode> modes;
  bool reflect = false;  // replace u0 by -u0(1 - theta)

  Field sample(PeriodicGrid grid) const;
};

/// Known preset names.
std::vector<std::string> initial_presets();

struct ParticleSpec {
  std::string force = "free";  // free | harmonic | spiral | constant
  double force_value = 0.0;    // for "constant"
  ParticleState p0{1.0, -1.0, 0.0, 0.0};
};

struct SweepSpec {
  std::string parameter;  // lambda | n | dt | t_end
  std::vector<std::string> values;
};

struct ExperimentSpec {
  Family family = Family::MuLambda;
  double lambda = 2.0;
  InitialCondition initial;
  RunConfig run;
  bool stop_at_breakdown = true;
  std::size_t snapshot_every = 0;  // in samples; 0 keeps only the first and last
  double stop_eta_theta = 0.01;
  std::size_t ermakov_stride = 2;
  bool monitor_lemmas = true;
  bool monitor_mckean = true;
  bool monitor_reconstruction = true;
  ParticleSpec particle;
  std::filesystem::path output_dir = "out";
  bool plots = true;
  std::optional<SweepSpec> sweep;
};

/// Builds a spec from parsed text; throws SpecError on unknown keys or bad values.
ExperimentSpec parse_experiment(const KeyValueFile& file);
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Command-line overrides applied after parsing.
struct Overrides {
  std::optional<std::size_t> n;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::filesystem::path> out;
};

void apply_overrides(ExperimentSpec& spec, const Overrides& o);

enum ExitCode : int { kCompleted = 0, kFailed = 1, kBreakdown = 2 };

/// Runs one experiment (or its sweep) and writes every artifact to
/// spec.output_dir. Returns the process exit code; errors are reported on
/// `err` and partial artifacts are kept.
int run_experiment(const ExperimentSpec& spec, std::ostream& err);

/// Worker count for sweeps, from SOLAR_FLOW_WORKERS (default 1).
std::size_t sweep_workers();

/// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace solar
