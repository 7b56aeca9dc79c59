// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "glharm/errors.hpp"
#include "glharm/riemannian.hpp"
#include "glharm/scenarios.hpp"
#include "oracles.hpp"

using namespace glharm;
using namespace glharm::scenarios;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = GLHARM_CONFIG_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what, double value) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << " = " << value << (ok ? "" : " (violated)");
  }
};

Vector vec(std::initializer_list<double> v) {
  Vector out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double value_of(const ScenarioReport& r, const std::string& name) {
  for (const auto& [key, v] : r.values)
    if (key == name) return v;
  throw std::runtime_error("report has no value '" + name + "'");
}

double max_el(const GLMetric& h, const VectorField& curve) {
  double worst = 0;
  for (double r : el_residual(h, sample_curve(curve, 0, 2 * pi, 6283))) worst = std::max(worst, r);
  return worst;
}

SmoothMap unit_circle() {
  return SmoothMap(VectorField(1, 2, [](JetSpan t) { return JetVector{cos(t[0]), sin(t[0])}; }));
}

Outcome lower_bound_theorem() {
  Outcome o;
  const auto cfg = parse_config(
      "name: c1\nkind: orbit\ndomain: {lo: [0], hi: [6.283185307179586]}\ngrid: 2000\n"
      "orbit: {xi: {type: rotation}, x0: [1, 0], perturbations: 50, amplitude: 0.3, seed: 1}\n");
  const auto start = std::chrono::steady_clock::now();
  const ScenarioReport r = run_scenario(cfg[0]);
  const double elapsed = seconds_since(start);
  const double l = value_of(r, "L_xi(solution)");
  const double min_perturbed = value_of(r, "min L_xi(perturbed) - half_volume") + value_of(r, "half_volume");
  o.require(std::abs(l - pi) <= 1e-4, "|L(orbit) - pi|", std::abs(l - pi));
  o.require(value_of(r, "perturbed_candidates") == 50, "perturbed candidates", value_of(r, "perturbed_candidates"));
  o.require(min_perturbed > pi + 1e-6, "min L(perturbed) - pi", min_perturbed - pi);
  o.require(elapsed < 5.0, "runtime s", elapsed);
  return o;
}

Outcome scaling_equality() {
  Outcome o;
  // f = exp(u + 0.15 u^2), u = <v,a>, solves df = K T with K = 1 + 0.3 u for the exponential system
  const Vector v = vec({1, 2});
  const MeshQuadrature grid = MeshQuadrature::box(vec({0, 0}), vec({1, 1}), 21);
  const ScalarField k(2, [=](JetSpan a) { return 1.0 + 0.3 * (v(0) * a[0] + v(1) * a[1]); });
  const SmoothMap f(VectorField(2, 1, [=](JetSpan a) {
    const Jetd u = v(0) * a[0] + v(1) * a[1];
    return JetVector{exp(u + 0.15 * u * u)};
  }));
  const DirectionSection t =
      DirectionSection::decomposed(fields::stack(1, {fields::coordinate(1, 0)}), fields::constant_vector(2, v));
  const MetricField phi = fields::identity_metric(2), psi = fields::identity_metric(1);
  o.require(system_e_residual(t, ScaledSolution{f, k}, grid).max_residual < 1e-9, "residual of df = K T",
            system_e_residual(t, ScaledSolution{f, k}, grid).max_residual);
  const LagrangianEvaluation l = lagrangian_lt_detail(phi, psi, t, sample(f, grid), grid);
  o.require(std::abs(l.value - 0.5) <= 1e-8, "|L_T(f) - Vol/2| (Vol = 1)", std::abs(l.value - 0.5));

  // invariance under T -> K T on perturbed circles
  const MeshQuadrature mesh = MeshQuadrature::box(vec({0}), vec({2 * pi}), 2000);
  const DirectionSection orbit = DirectionSection::orbit(fields::rotation());
  const MetricField phi1 = fields::identity_metric(1), psi2 = fields::identity_metric(2);
  oracle::Rng rng(2);
  double worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const double c0 = rng.uniform(0.5, 2), c1 = rng.uniform(-0.4, 0.4);
    const ScalarField kk(1, [=](JetSpan s) { return c0 * exp(c1 * sin(s[0])); });
    const MapSamples samples =
        sample(unit_circle().perturbed(bump_perturbation(vec({0}), vec({2 * pi}), 2, 700 + trial), 1.0), mesh);
    worst = std::max(worst, std::abs(lagrangian_lt(phi1, psi2, orbit, samples, mesh) -
                                     lagrangian_lt(phi1, psi2, orbit.scaled(kk), samples, mesh)));
  }
  o.require(worst <= 1e-10, "max |L_T - L_KT|", worst);
  return o;
}

Outcome pseudolinear_examples() {
  Outcome o;
  for (const char* name : {"pseudolinear_exponential.yaml", "pseudolinear_quotient.yaml"}) {
    const auto cfg = load_config(kConfigs / name);
    const auto start = std::chrono::steady_clock::now();
    const ScenarioReport r = run_scenario(cfg[0]);
    const double elapsed = seconds_since(start);
    const std::string tag = std::string(name).substr(13, std::string(name).size() - 18);
    o.require(cfg[0].grid == 21 && cfg[0].domain.lo.size() == 2, tag + " grid", cfg[0].grid);
    o.require(value_of(r, "system_residual_max") < 1e-9, tag + " residual", value_of(r, "system_residual_max"));
    o.require(value_of(r, "level_set_sff_residual_max") < 1e-9, tag + " sff",
              value_of(r, "level_set_sff_residual_max"));
    o.require(elapsed < 2.0, tag + " runtime s", elapsed);
  }
  return o;
}

Outcome riemannian_reduction() {
  Outcome o;
  const ScenarioReport r = run_scenario(load_config(kConfigs / "field_equations_riemannian.yaml")[0]);
  o.require(value_of(r, "samples_evaluated") >= 1, "samples", value_of(r, "samples_evaluated"));
  for (const char* q : {"max F_max", "max f_max", "max maxwell_h", "max maxwell_m", "max maxwell_v", "max t_max",
                        "max T_V_max"})
    o.require(value_of(r, q) < 1e-12, q, value_of(r, q));

  const MetricField sphere = fields::unit_sphere();
  const Vector x0 = vec({1.0, 0.3}), v0 = vec({0.4, 0.9});
  const Trajectory a = gl_geodesic(gl::riemannian(sphere), x0, v0, 0, 1, 1000);
  const Trajectory b = riemann_geodesic(sphere, x0, v0, 0, 1, 1000);
  double worst = 0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, (a.positions[k] - b.positions[k]).norm());
  o.require(worst < 1e-6, "max |gl_geodesic - riemann_geodesic|", worst);
  return o;
}

Outcome orbits_are_geodesics() {
  Outcome o;
  const GLMetric h = gl::orbit_metric(fields::rotation(), fields::identity_metric(2));
  const double orbit = max_el(h, VectorField(1, 2, [](JetSpan t) { return JetVector{cos(t[0]), sin(t[0])}; }));
  const double ellipse =
      max_el(h, VectorField(1, 2, [](JetSpan t) { return JetVector{cos(t[0]), 2.0 * sin(t[0])}; }));
  o.require(orbit < 1e-5, "EL residual on the orbit", orbit);
  o.require(ellipse > 1e-2, "EL residual on the comparison ellipse", ellipse);
  return o;
}

double bianchi_defect(const Tensor4d& r) {
  const int n = r.extent(0);
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          worst = std::max(worst, std::abs(r(i, j, k, l) + r(i, k, l, j) + r(i, l, j, k)));
          worst = std::max(worst, std::abs(r(i, j, k, l) + r(i, j, l, k)));
        }
  return worst;
}

Outcome curvature_engine() {
  Outcome o;
  double ricci = 0, scalar = 0;
  for (double theta : {0.4, pi / 3, pi / 2, 2.5}) {
    const auto s = curvature(fields::unit_sphere(), vec({theta, 0.7}));
    ricci = std::max(ricci, max_abs(Matrix(s.ricci - fields::unit_sphere().value(vec({theta, 0.7})))));
    scalar = std::max(scalar, std::abs(s.scalar - 2));
  }
  o.require(ricci <= 1e-8, "sphere max |Ricci - gamma|", ricci);
  o.require(scalar <= 1e-8, "sphere max |scalar - 2|", scalar);

  oracle::Rng rng(6);
  double defect = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(-0.5, 0.5);
    const MetricField g = trial % 2 == 0 ? fields::unit_sphere()
                                         : fields::conformal_metric(ScalarField(2, [=](JetSpan x) {
                                             return a * x[0] + b * x[1] + c * (x[0] * x[0] - x[1] * x[1]);
                                           }));
    const Vector x = trial % 2 == 0 ? vec({rng.uniform(0.2, pi - 0.2), rng.uniform(0, 2 * pi)})
                                    : Vector(rng.uniform_vector(2, -0.7, 0.7));
    defect = std::max(defect, bianchi_defect(curvature(g, x).riemann));
  }
  o.require(defect <= 1e-8, "max Bianchi / antisymmetry defect over 100 points", defect);

  double ad = 0;
  int fields_checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + trial % 4;
    for (const auto& f : oracle::composite_corpus(dim, rng)) {
      const Vector x = rng.uniform_vector(dim, -0.8, 0.8);
      const auto fv = oracle::values_of(f);
      const Vector g = grad(f, x), gf = oracle::fd_gradient(fv, x);
      const Matrix hs = hessian(f, x), hf = oracle::fd_hessian(fv, x);
      for (Eigen::Index i = 0; i < g.size(); ++i)
        ad = std::max(ad, std::abs(g(i) - gf(i)) / std::max(1.0, std::abs(gf(i))));
      for (Eigen::Index i = 0; i < hs.size(); ++i)
        ad = std::max(ad, std::abs(hs.data()[i] - hf.data()[i]) / std::max(1.0, std::abs(hf.data()[i])));
      ++fields_checked;
    }
  }
  o.require(ad <= 1e-6, "max autodiff vs finite-difference deviation", ad);
  o.require(fields_checked == 100, "corpus fields checked", fields_checked);
  return o;
}

Outcome convergence_orders() {
  Outcome o;
  // sqrt(det phi) = e^{2(a1 + a2)} on the unit square: volume ((e^2 - 1) / 2)^2
  const MetricField phi = fields::conformal_metric(fields::affine(vec({1, 1}), 0));
  const double exact = std::pow((std::exp(2.0) - 1) / 2, 2);
  double previous = 0, worst_quadrature = INFINITY;
  for (int n : {11, 21, 41, 81}) {
    const double err = std::abs(MeshQuadrature::box(vec({0, 0}), vec({1, 1}), n, phi).volume() - exact);
    if (previous > 0) worst_quadrature = std::min(worst_quadrature, std::log2(previous / err));
    previous = err;
  }
  o.require(worst_quadrature >= 1.8, "min quadrature order", worst_quadrature);

  auto rotation_error = [](int steps) {
    const Trajectory tr = integrate_orbit(fields::rotation(), vec({1, 0}), 0, 2 * pi, steps);
    return (tr.positions.back() - vec({1, 0})).norm();
  };
  const double e1 = rotation_error(50), e2 = rotation_error(100), e3 = rotation_error(200);
  const double lo = std::min(std::log2(e1 / e2), std::log2(e2 / e3)),
               hi = std::max(std::log2(e1 / e2), std::log2(e2 / e3));
  o.require(lo >= 3.7, "min RK4 order", lo);
  o.require(hi <= 4.3, "max RK4 order", hi);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// every file of the written report directory, concatenated in name order
std::string report_bytes(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) out += f.filename().string() + "\n" + slurp(f);
  return out;
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "glharm_acceptance";
  fs::remove_all(root);
  int configs = 0, mismatches = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    const auto cfg = load_config(entry.path());
    std::string reference;
    for (int threads : {1, 1, 2, 5, 16}) {
      const fs::path dir = root / (entry.path().stem().string() + "_" + std::to_string(threads));
      fs::remove_all(dir);
      write_report(run(cfg, Parallelism{threads}), dir, true);
      const std::string bytes = report_bytes(dir);
      if (reference.empty()) reference = bytes;
      else if (bytes != reference) ++mismatches;
    }
    ++configs;
  }
  o.require(configs >= 5, "configs checked", configs);
  o.require(mismatches == 0, "reports differing from the single-thread run", mismatches);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"lower-bound theorem on the rotation orbit", lower_bound_theorem},
      {"scaling-equality case", scaling_equality},
      {"pseudolinear examples", pseudolinear_examples},
      {"Riemannian reduction", riemannian_reduction},
      {"orbits are geodesics of the induced metric", orbits_are_geodesics},
      {"curvature engine", curvature_engine},
      {"convergence orders", convergence_orders},
      {"determinism across thread counts", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    bool pass = false;
    std::string detail;
    try {
      const Outcome o = criteria[i].second();
      pass = o.pass;
      detail = o.detail.str();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!pass) ++failed;
    std::printf("%s criterion %zu: %s [%s]\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                detail.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
