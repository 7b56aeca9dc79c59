#include <algorithm>
#include <cmath>

#include "glharm/errors.hpp"
#include "glharm/riemannian.hpp"
#include "glharm/scenarios.hpp"

namespace glharm::scenarios {

namespace {

constexpr double kProbe = 1e-4;  // first-variation step
constexpr int kVariationProbes = 10;

class Builder {
 public:
  Builder(const ScenarioConfig& cfg) : cfg_(cfg) {
    report_.name = cfg.name;
    report_.kind = cfg.kind;
    report_.echo = cfg.echo;
    if (!cfg.defaults_used.empty()) {
      std::string s = "calibration defaults applied:";
      for (const auto& d : cfg.defaults_used) s += " " + d;
      report_.notes.push_back(s);
    }
  }

  void value(const std::string& name, double v) { report_.values.emplace_back(name, v); }

  // Verdict against the named tolerance of the config.
  void at_most(const std::string& name, double v, const std::string& tol) {
    add(name, v, cfg_.tolerances.at(tol), tol, "<=");
  }
  // v >= -tolerance
  void at_least_minus(const std::string& name, double v, const std::string& tol) {
    add(name, v, -cfg_.tolerances.at(tol), "-" + tol, ">=");
  }
  void above(const std::string& name, double v, const std::string& tol) { add(name, v, cfg_.tolerances.at(tol), tol, ">"); }
  // structural requirement that is not a tolerance, e.g. a sample count
  void at_least_count(const std::string& name, double v, double count) { add(name, v, count, "count", ">="); }

  ScenarioReport& report() { return report_; }

 private:
  void add(const std::string& name, double v, double t, const std::string& tol, const std::string& cmp) {
    bool pass = false;
    if (cmp == "<=") pass = v <= t;
    if (cmp == ">=") pass = v >= t;
    if (cmp == ">") pass = v > t;
    report_.verdicts.push_back(Verdict{name, v, t, tol, cmp, pass});
  }

  const ScenarioConfig& cfg_;
  ScenarioReport report_;
};

MapSamples perturb(const MapSamples& base, const MapSamples& eta, double eps) {
  MapSamples out = base;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] += eps * eta.values[k];
    out.jacobians[k] += eps * eta.jacobians[k];
  }
  return out;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

std::string indexed(const std::string& base, std::size_t i, const std::string& what) {
  return base + "[" + std::to_string(i) + "]." + what;
}

Table node_table(const MeshQuadrature& mesh, const MapSamples& f, const SystemResidual& r,
                 const std::vector<double>& integrand, const std::vector<std::vector<double>>& extra = {},
                 const std::vector<std::string>& extra_names = {}) {
  Table t;
  t.name = "nodes";
  const int m = mesh.dim();
  const Eigen::Index n = f.values.empty() ? 0 : f.values[0].size();
  for (int a = 0; a < m; ++a) t.header.push_back("a" + std::to_string(a + 1));
  for (Eigen::Index i = 0; i < n; ++i) t.header.push_back("f" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) t.header.push_back("residual_" + std::to_string(i + 1) + "_" + std::to_string(a + 1));
  t.header.push_back("integrand");
  for (const auto& name : extra_names) t.header.push_back(name);
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    std::vector<double> row;
    for (int a = 0; a < m; ++a) row.push_back(mesh.node(k)(a));
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(f.values[k](i));
    for (Eigen::Index i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a) row.push_back(r.components[k](i, a));
    row.push_back(integrand[k]);
    for (const auto& column : extra) row.push_back(column[k]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table trajectory_table(const std::string& name, const Trajectory& tr, const std::vector<double>* el) {
  Table t;
  t.name = name;
  const Eigen::Index n = tr.size() ? tr.positions[0].size() : 0;
  t.header.push_back("t");
  for (Eigen::Index i = 0; i < n; ++i) t.header.push_back("x" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < n; ++i) t.header.push_back("v" + std::to_string(i + 1));
  if (el) t.header.push_back("el_residual");
  for (std::size_t k = 0; k < tr.size(); ++k) {
    std::vector<double> row{tr.times[k]};
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(tr.positions[k](i));
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(tr.velocities[k](i));
    if (el) row.push_back(k == 0 || k + 1 == tr.size() ? NAN : (*el)[k - 1]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

ScenarioReport run_orbit(const ScenarioConfig& cfg, Parallelism par) {
  Builder b(cfg);
  const OrbitParams& p = *cfg.orbit;
  const OrbitScenario s = build_orbit_scenario(cfg);
  const double t0 = cfg.domain.lo(0), t1 = cfg.domain.hi(0);
  const int n = static_cast<int>(p.x0.size());
  const MeshQuadrature mesh = MeshQuadrature::box(cfg.domain.lo, cfg.domain.hi, cfg.grid);
  const MetricField phi = fields::identity_metric(1);

  const Trajectory orbit = s.analytic ? sample_curve(s.analytic->field(), t0, t1, cfg.grid - 1)
                                      : integrate_orbit(s.xi, p.x0, t0, t1, cfg.grid - 1);
  const MapSamples solution = s.analytic ? sample(*s.analytic, mesh, par) : sample(orbit);
  b.report().notes.push_back(s.analytic ? "solution: closed-form rotation orbit"
                                        : "solution: RK4 orbit; delta f is the field at the computed states");
  for (std::size_t k = 0; k < solution.values.size(); ++k) {
    const Vector xi = s.xi.value(solution.values[k]);
    if (!(std::sqrt(xi.dot(s.psi.value(solution.values[k]) * xi)) > 1e-12))
      throw ConfigError("orbit: xi vanishes along the orbit at t=" + std::to_string(mesh.node(k)(0)), p.xi.line);
  }

  const LagrangianEvaluation l = lagrangian_lt_detail(phi, s.psi, s.t, solution, mesh, par);
  const SystemResidual r = system_e_residual(s.t, solution, mesh, par);
  const double e = energy(phi, fields::constant_vector(1, Vector::Ones(1)), s.h, solution, mesh, par);
  b.value("volume", mesh.volume());
  b.value("half_volume", l.half_volume);
  b.value("L_xi(solution)", l.value);
  b.value("L_xi(solution) - half_volume", l.value - l.half_volume);
  b.value("system_residual_max", r.max_residual);
  b.value("energy_induced_h(solution)", e);

  double min_gap = INFINITY, max_variation = 0;
  for (int k = 0; k < p.perturbations; ++k) {
    const SmoothMap eta = bump_perturbation(cfg.domain.lo, cfg.domain.hi, n, p.seed * 100003 + k, p.amplitude);
    const MapSamples eta_s = sample(eta, mesh, par);
    const double lk = lagrangian_lt(phi, s.psi, s.t, perturb(solution, eta_s, 1.0), mesh, par);
    min_gap = std::min(min_gap, lk - l.half_volume);
    if (k < kVariationProbes) {
      const double plus = lagrangian_lt(phi, s.psi, s.t, perturb(solution, eta_s, kProbe), mesh, par);
      const double minus = lagrangian_lt(phi, s.psi, s.t, perturb(solution, eta_s, -kProbe), mesh, par);
      max_variation = std::max(max_variation, std::abs((plus - minus) / (2 * kProbe)));
    }
  }
  b.value("perturbed_candidates", p.perturbations);
  b.value("min L_xi(perturbed) - half_volume", min_gap);
  b.value("max |first variation|", max_variation);

  const std::vector<double> el = el_residual(s.h, orbit);
  b.value("max EL residual (induced h)", max_of(el));

  b.at_most("|L_xi(solution) - half_volume|", std::abs(l.value - l.half_volume), "functional");
  b.at_most("system_residual_max", r.max_residual, "residual");
  b.at_least_minus("min L_xi(perturbed) - half_volume (lower bound)", min_gap, "bound");
  b.above("min L_xi(perturbed) - half_volume (non-solutions strictly above)", min_gap, "gap");
  b.at_most("|energy - L_xi| / max(1, L_xi)", std::abs(e - l.value) / std::max(1.0, std::abs(l.value)), "agreement");
  b.at_most("max |first variation| at the solution", max_variation, "variation");
  b.at_most("max EL residual along the orbit", max_of(el), "el");

  if (cfg.flow) {
    const Trajectory flow = integrate_orbit(s.xi, p.x0, t0, t1, cfg.flow_steps);
    if (s.analytic) {
      const Vector exact = s.analytic->operator()(Vector::Constant(1, t1));
      const double err = (flow.positions.back() - exact).norm();
      b.value("flow endpoint error", err);
      b.at_most("flow endpoint error vs closed form", err, "flow");
    } else {
      b.value("flow endpoint distance from start", (flow.positions.back() - p.x0).norm());
    }
    b.report().plots.push_back(trajectory_table("flow", flow, nullptr));
  }

  b.report().tables.push_back(node_table(mesh, solution, r, l.ratio));
  b.report().plots.push_back(trajectory_table("orbit", orbit, &el));
  return b.report();
}

ScenarioReport run_pfaff(const ScenarioConfig& cfg, Parallelism par) {
  Builder b(cfg);
  const PfaffParams& p = *cfg.pfaff;
  const PfaffScenario s = build_pfaff_scenario(cfg);
  const int m = static_cast<int>(cfg.domain.lo.size());
  const MeshQuadrature mesh = MeshQuadrature::box(cfg.domain.lo, cfg.domain.hi, cfg.grid, s.phi);
  const MetricField psi = fields::identity_metric(1);

  double min_norm = INFINITY;
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    const double n2 = s.a_sharp.value(mesh.node(k)).dot(s.a_form.value(mesh.node(k)));
    min_norm = std::min(min_norm, std::sqrt(std::max(n2, 0.0)));
  }
  if (!(min_norm > 1e-12)) throw ConfigError("pfaff: the form A vanishes in the domain", p.form.line);

  const Vector center = (cfg.domain.lo + cfg.domain.hi) / 2;
  const Vector sharp = s.a_sharp.value(center);
  const Matrix g = s.g.value(center);
  b.value("volume", mesh.volume());
  b.value("half_volume", 0.5 * mesh.volume());
  b.value("min |A|_phi", min_norm);
  for (int a = 0; a < m; ++a) b.value("A_sharp(center)[" + std::to_string(a) + "]", sharp(a));
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) b.value("g(center)[" + std::to_string(a) + "][" + std::to_string(c) + "]", g(a, c));

  for (std::size_t i = 0; i < p.candidates.size(); ++i) {
    const SmoothMap f(fields::stack(m, {make_scalar_field(p.candidates[i], m)}));
    const MapSamples fs = sample(f, mesh, par);
    const LagrangianEvaluation l = lagrangian_lt_detail(s.phi, psi, s.t, fs, mesh, par);
    const SystemResidual r = system_e_residual(s.t, fs, mesh, par);
    const double e = energy(s.g, s.a_sharp, s.h, fs, mesh, par);
    const std::string c = "candidate";
    b.value(indexed(c, i, "L_A"), l.value);
    b.value(indexed(c, i, "L_A - half_volume"), l.value - l.half_volume);
    b.value(indexed(c, i, "system_residual_max"), r.max_residual);
    b.value(indexed(c, i, "energy_(g,A#,h)"), e);

    b.at_least_minus(indexed(c, i, "L_A - half_volume (lower bound)"), l.value - l.half_volume, "bound");
    b.at_most(indexed(c, i, "|energy - L_A| / max(1, L_A)"), std::abs(e - l.value) / std::max(1.0, std::abs(l.value)),
              "agreement");
    if (p.expect != "no-solution" && i == 0)
      b.at_most(indexed(c, i, "|L_A - half_volume| (solution attains the bound)"), std::abs(l.value - l.half_volume),
                "functional");
    if (p.expect == "solution" && i == 0) b.at_most(indexed(c, i, "system_residual_max"), r.max_residual, "residual");
    if (p.expect == "no-solution")
      b.above(indexed(c, i, "L_A - half_volume (no solution: strictly above)"), l.value - l.half_volume, "gap");
    if (i == 0) b.report().tables.push_back(node_table(mesh, fs, r, l.ratio));
  }
  return b.report();
}

ScenarioReport run_pseudolinear(const ScenarioConfig& cfg, Parallelism par) {
  Builder b(cfg);
  const PseudolinearParams& p = *cfg.pseudolinear;
  const PseudolinearScenario s = build_pseudolinear_scenario(cfg);
  const int m = static_cast<int>(p.v.size());
  const MeshQuadrature mesh = MeshQuadrature::box(cfg.domain.lo, cfg.domain.hi, cfg.grid);
  const MetricField phi = fields::identity_metric(m), psi = fields::identity_metric(1);

  const MapSamples fs = sample(s.f, mesh, par);
  for (std::size_t k = 0; k < mesh.size(); ++k)
    if (!(fs.jacobians[k].norm() > 1e-12))
      throw ConfigError("pseudolinear: grad f vanishes at node " + std::to_string(k));

  const SystemResidual r = system_e_residual(s.t, fs, mesh, par);
  const LagrangianEvaluation l = lagrangian_lt_detail(phi, psi, s.t, fs, mesh, par);
  b.value("volume", mesh.volume());
  b.value("half_volume", l.half_volume);
  b.value("L_T(f)", l.value);
  b.value("L_T(f) - half_volume", l.value - l.half_volume);
  b.value("system_residual_max", r.max_residual);
  b.at_most("system_residual_max", r.max_residual, "residual");
  b.at_most("|L_T(f) - half_volume|", std::abs(l.value - l.half_volume), "functional");

  std::vector<double> sff(mesh.size(), 0.0);
  if (m >= 2) {
    const MetricField delta = fields::identity_metric(m);
    sff = parallel_map<double>(mesh.size(), par, [&](std::size_t k) {
      return second_fundamental_form_residual(s.f_scalar, delta, mesh.node(k));
    });
    b.value("level_set_sff_residual_max", max_of(sff));
    b.at_most("level_set_sff_residual_max", max_of(sff), "sff");
  } else {
    b.report().notes.push_back("level sets are points for m = 1; second fundamental form check skipped");
  }

  double max_variation = 0, min_gap = INFINITY;
  for (int k = 0; k < kVariationProbes; ++k) {
    const MapSamples eta = sample(bump_perturbation(cfg.domain.lo, cfg.domain.hi, 1, p.seed * 100003 + k), mesh, par);
    const double plus = lagrangian_lt(phi, psi, s.t, perturb(fs, eta, kProbe), mesh, par);
    const double minus = lagrangian_lt(phi, psi, s.t, perturb(fs, eta, -kProbe), mesh, par);
    max_variation = std::max(max_variation, std::abs((plus - minus) / (2 * kProbe)));
    min_gap = std::min({min_gap, plus - l.half_volume, minus - l.half_volume});
  }
  b.value("max |first variation|", max_variation);
  b.value("min L_T(f +- eps eta) - half_volume", min_gap);
  b.at_most("max |first variation| at the solution", max_variation, "variation");
  b.at_least_minus("min L_T(f +- eps eta) - half_volume (lower bound)", min_gap, "bound");

  b.report().tables.push_back(node_table(mesh, fs, r, l.ratio, {sff}, {"sff_residual"}));
  return b.report();
}

std::vector<Vector> axis_points(const GridAxis& axis) {
  const int d = static_cast<int>(axis.lo.size());
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(axis.n);
  std::vector<Vector> out;
  std::vector<int> idx(d, 0);
  for (std::size_t c = 0; c < total; ++c) {
    Vector p(d);
    for (int k = 0; k < d; ++k)
      p(k) = axis.n == 1 ? axis.lo(k) : axis.lo(k) + (axis.hi(k) - axis.lo(k)) * idx[k] / (axis.n - 1);
    out.push_back(p);
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[k] < axis.n) break;
      idx[k] = 0;
    }
  }
  return out;
}

double skew_defect(const Matrix& a) { return max_abs(Matrix(a + a.transpose())); }

ScenarioReport run_field_equations(const ScenarioConfig& cfg, Parallelism par) {
  Builder b(cfg);
  const FieldEquationParams& p = *cfg.field_equations;
  const int n = static_cast<int>(p.x.lo.size());
  const GLMetric h = make_gl_metric(p.gamma, p.sigma, n, p.margin);
  const DistinguishedConnection& conn = default_connection();
  b.report().disclosure = connection_disclosure(conn);
  b.report().notes.push_back("Maxwell residuals are reported; they vanish identically only for particular connections");

  std::vector<std::pair<Vector, Vector>> points;
  std::size_t skipped = 0;
  for (const Vector& x : axis_points(p.x))
    for (const Vector& y : axis_points(p.y)) {
      if (h.excluded(x, y)) {
        ++skipped;
        continue;
      }
      points.emplace_back(x, y);
    }

  const std::vector<std::string> columns{"F_max", "f_max", "F_skew", "f_skew", "maxwell_h", "maxwell_m",
                                         "maxwell_v", "t_max", "t_antisymmetric", "T_H_max", "T_V_max"};
  const auto rows = parallel_map<std::vector<double>>(points.size(), par, [&](std::size_t k) {
    const auto& [x, y] = points[k];
    const EMTensors em = em_tensors(h, x, y);
    const MaxwellResiduals mw = maxwell_residuals(h, x, y, conn);
    const SigmaDerived sd = sigma_derived(h, x, y, conn);
    const EinsteinComponents ein = einstein_components(h, x, y, p.kappa, conn);
    return std::vector<double>{max_abs(em.F),       max_abs(em.f),        skew_defect(em.F),
                               skew_defect(em.f),   max_abs(mw.horizontal), max_abs(mw.mixed),
                               max_abs(mw.vertical), max_abs(sd.t),        sd.t_antisymmetric,
                               max_abs(ein.horizontal), max_abs(ein.vertical)};
  });

  Table t;
  t.name = "samples";
  for (int i = 0; i < n; ++i) t.header.push_back("x" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) t.header.push_back("y" + std::to_string(i + 1));
  for (const auto& c : columns) t.header.push_back(c);
  std::vector<double> column_max(columns.size(), 0.0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    std::vector<double> row;
    for (int i = 0; i < n; ++i) row.push_back(points[k].first(i));
    for (int i = 0; i < n; ++i) row.push_back(points[k].second(i));
    for (std::size_t c = 0; c < columns.size(); ++c) {
      row.push_back(rows[k][c]);
      column_max[c] = std::max(column_max[c], rows[k][c]);
    }
    t.rows.push_back(std::move(row));
  }

  b.value("samples_evaluated", static_cast<double>(points.size()));
  b.value("samples_skipped_on_singular_locus", static_cast<double>(skipped));
  b.value("kappa", p.kappa);
  for (std::size_t c = 0; c < columns.size(); ++c) b.value("max " + columns[c], column_max[c]);

  b.at_least_count("samples_evaluated", static_cast<double>(points.size()), 1);
  b.at_most("max skew defect of F", column_max[2], "skew");
  b.at_most("max skew defect of f", column_max[3], "skew");
  if (p.expect == "riemannian") {
    for (std::size_t c : {0u, 1u, 4u, 5u, 6u, 7u, 10u})
      b.at_most("max " + columns[c] + " (sigma = 0 reduction)", column_max[c], "vanish");
  }
  b.report().tables.push_back(std::move(t));
  return b.report();
}

}  // namespace

bool ScenarioReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

bool Report::passed() const {
  return std::all_of(scenarios.begin(), scenarios.end(), [](const ScenarioReport& s) { return s.passed(); });
}

ScenarioReport run_scenario(const ScenarioConfig& cfg, Parallelism par) {
  try {
    if (cfg.kind == "orbit") return run_orbit(cfg, par);
    if (cfg.kind == "pfaff") return run_pfaff(cfg, par);
    if (cfg.kind == "pseudolinear") return run_pseudolinear(cfg, par);
    return run_field_equations(cfg, par);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    // shape mismatches between catalog fields and the declared dimensions
    throw ConfigError("scenario '" + cfg.name + "': " + e.what(), cfg.line);
  }
}

Report run(const std::vector<ScenarioConfig>& configs, Parallelism par) {
  Report r;
  for (const auto& cfg : configs) r.scenarios.push_back(run_scenario(cfg, par));
  return r;
}

}  // namespace glharm::scenarios
