#ifndef GLHARM_SCENARIOS_HPP
#define GLHARM_SCENARIOS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glharm/flows.hpp"
#include "glharm/gl_metric.hpp"
#include "glharm/parallel.hpp"
#include "glharm/variational.hpp"

namespace glharm::scenarios {

/// Catalog entry for a field: a type name plus constant-array parameters.
struct FieldSpec {
  std::string type;
  std::map<std::string, std::vector<double>> vectors;
  std::map<std::string, std::vector<std::vector<double>>> matrices;
  std::map<std::string, double> scalars;
  std::vector<std::pair<std::string, FieldSpec>> children;
  int line = 0;

  const FieldSpec* child(const std::string& key) const;
};

struct Box {
  Vector lo, hi;
};

struct OrbitParams {
  FieldSpec xi;
  FieldSpec psi;
  Vector x0;
  int perturbations = 50;
  double amplitude = 0.3;
  std::uint64_t seed = 1;
};

struct PfaffParams {
  FieldSpec form;
  FieldSpec phi;
  std::vector<FieldSpec> candidates;
  /// "solution": the first candidate solves df = A; "scaled-solution": df = k A for some positive k,
  /// so only the bound is attained; "no-solution": every candidate stays above the bound.
  std::string expect;
  double gap = 1e-6;
};

struct PseudolinearParams {
  std::string family;   // exponential | quotient
  std::string ordering;  // pl: T = xi(a) A(x); e3: T = xi(x) A(a)
  Vector v, vp;
  double w = 0, wp = 0;
  std::uint64_t seed = 1;
};

struct GridAxis {
  Vector lo, hi;
  int n = 3;
};

struct FieldEquationParams {
  FieldSpec gamma;
  FieldSpec sigma;
  double kappa = 1;
  GridAxis x, y;
  double margin = 1e-3;
  /// "riemannian": every sigma-generated quantity must vanish; empty: report only.
  std::string expect;
};

struct ScenarioConfig {
  std::string name;
  std::string kind;  // orbit | pfaff | pseudolinear | custom-gl-field-eqs
  Box domain;
  int grid = 0;
  std::map<std::string, double> tolerances;
  std::optional<OrbitParams> orbit;
  std::optional<PfaffParams> pfaff;
  std::optional<PseudolinearParams> pseudolinear;
  std::optional<FieldEquationParams> field_equations;
  bool flow = false;
  int flow_steps = 1000;
  int line = 0;
  std::string echo;                        // normalized YAML of this scenario
  std::vector<std::string> defaults_used;  // calibration defaults filled in by the loader
};

struct Overrides {
  std::optional<int> grid;
  std::optional<double> tol;
};

/// Parses and validates a config file (a single scenario or a `scenarios:` list). Throws ConfigError.
std::vector<ScenarioConfig> load_config(const std::filesystem::path& path, const Overrides& overrides = {});
std::vector<ScenarioConfig> parse_config(const std::string& text, const Overrides& overrides = {});

/// Catalog lookups. Throw ConfigError anchored at the field entry's line.
VectorField make_vector_field(const FieldSpec& spec, int dim);
MetricField make_metric(const FieldSpec& spec, int dim);
ScalarField make_scalar_field(const FieldSpec& spec, int dim);
/// sigma catalog on the 2n coordinates (x, y); also returns the singular locus.
GLMetric make_gl_metric(const FieldSpec& gamma, const FieldSpec& sigma, int dim, double margin);

struct OrbitScenario {
  GLMetric h;
  DirectionSection t;
  MetricField psi;
  VectorField xi;
  std::optional<SmoothMap> analytic;  // closed form when xi is the rotation field and psi the identity
};

struct PfaffScenario {
  MetricField g;         // phi / |A|^2_phi
  GLMetric h;            // 1 / y^2
  VectorField a_form;    // A
  VectorField a_sharp;   // phi^{ab} A_b
  MetricField phi;
  DirectionSection t;
};

struct PseudolinearScenario {
  SmoothMap f;
  ScalarField f_scalar;
  DirectionSection t;
  MetricField g;  // delta / |A|^2
};

OrbitScenario build_orbit_scenario(const ScenarioConfig& cfg);
PfaffScenario build_pfaff_scenario(const ScenarioConfig& cfg);
PseudolinearScenario build_pseudolinear_scenario(const ScenarioConfig& cfg);

struct Verdict {
  std::string name;
  double value = 0;
  double tolerance = 0;
  std::string tolerance_name;  // config tolerance key the bound comes from, e.g. "residual" or "-bound"
  std::string comparison;      // "<=", ">=", ">"
  bool pass = false;
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ScenarioReport {
  std::string name;
  std::string kind;
  std::string echo;
  std::vector<std::pair<std::string, double>> values;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  std::string disclosure;
  std::vector<Table> tables;
  std::vector<Table> plots;

  bool passed() const;
};

struct Report {
  std::vector<ScenarioReport> scenarios;
  bool passed() const;
};

ScenarioReport run_scenario(const ScenarioConfig& cfg, Parallelism par = {});
Report run(const std::vector<ScenarioConfig>& configs, Parallelism par = {});

std::string report_text(const Report& report);
std::string report_json(const Report& report);
std::string table_csv(const Table& table);
/// Writes report.txt, report.json, per-scenario CSV tables and, when asked, plot CSVs.
void write_report(const Report& report, const std::filesystem::path& out_dir, bool emit_plots);

enum ExitCode { kPass = 0, kVerdictFailed = 1, kConfigError = 2, kNumericalError = 3 };

}  // namespace glharm::scenarios

#endif  // GLHARM_SCENARIOS_HPP
