#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sys/wait.h>

#include "glharm/errors.hpp"
#include "glharm/scenarios.hpp"

using namespace glharm;
using namespace glharm::scenarios;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = GLHARM_CONFIG_DIR;

int config_error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line().value_or(-1);
  }
  return 0;
}

double value_of(const ScenarioReport& r, const std::string& name) {
  for (const auto& [key, v] : r.values)
    if (key == name) return v;
  FAIL("missing value " << name);
  return NAN;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "glharm_test_scenarios";
  fs::create_directories(dir);
  return dir / name;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GLHARM_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kOrbit = R"(name: o
kind: orbit
domain: {lo: [0], hi: [3.141592653589793]}
grid: 400
orbit:
  xi: {type: rotation}
  x0: [1, 0]
  perturbations: 5
)";

}  // namespace

TEST_SUITE("scenarios") {
  TEST_CASE("config errors carry the offending line") {
    CHECK(config_error_line("name: a\nkind: orbit\nbogus: 1\n") == 3);
    CHECK(config_error_line("name: a\nkind: nonsense\n") == 2);
    // block maps are anchored at their first key
    CHECK(config_error_line("name: a\nkind: orbit\ndomain: {lo: [0], hi: [1]}\ngrid: 10\norbit:\n  x0: [1, 0]\n") == 6);
    CHECK(config_error_line("name: a\nkind: orbit\ndomain: {lo: [1], hi: [0]}\ngrid: 10\n") == 3);
    CHECK(config_error_line("name: [a\n") > 0);
    CHECK(config_error_line(std::string(kOrbit) + "tolerances: {nope: 1}\n") == 9);
    CHECK(config_error_line(std::string(kOrbit) + "pfaff: {}\n") == 9);
    CHECK_THROWS_AS(parse_config(""), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/glharm.yaml"), ConfigError);
  }

  TEST_CASE("missing xi is a config error") {
    CHECK_THROWS_AS(parse_config("name: a\nkind: orbit\ndomain: {lo: [0], hi: [1]}\ngrid: 10\norbit: {x0: [1, 0]}\n"),
                    ConfigError);
  }

  TEST_CASE("builder preconditions are config errors") {
    const std::string base = "name: p\nkind: pseudolinear\ndomain: {lo: [-0.5, -0.5], hi: [0.5, 0.5]}\ngrid: 5\n";
    const auto zero_v = parse_config(base + "pseudolinear: {family: exponential, ordering: pl, v: [0, 0], w: 0}\n");
    CHECK_THROWS_AS(run_scenario(zero_v[0]), ConfigError);
    // <vp, a> + wp crosses zero inside the box
    const auto vanishing = parse_config(
        base + "pseudolinear: {family: quotient, ordering: pl, v: [1, 0], vp: [0, 1], w: 0, wp: 0.2}\n");
    CHECK_THROWS_AS(run_scenario(vanishing[0]), ConfigError);
    CHECK_THROWS_AS(
        parse_config(base + "pseudolinear: {family: quotient, ordering: e3, v: [1, 0], vp: [0, 1], w: 0, wp: 2}\n"),
        ConfigError);
    const auto zero_form = parse_config(
        "name: z\nkind: pfaff\ndomain: {lo: [0, 0], hi: [1, 1]}\ngrid: 5\n"
        "pfaff: {form: {type: constant, value: [0, 0]}, candidates: [{type: affine, v: [1, 0]}], expect: solution}\n");
    CHECK_THROWS_AS(run_scenario(zero_form[0]), ConfigError);
    const auto fixed_point =
        parse_config("name: f\nkind: orbit\ndomain: {lo: [0], hi: [1]}\ngrid: 5\norbit: {xi: {type: rotation}, x0: [0, 0]}\n");
    CHECK_THROWS_AS(run_scenario(fixed_point[0]), ConfigError);
  }

  TEST_CASE("constant xi = e1 induces h = psi / (y1)^2") {
    const auto cfg = parse_config(
        "name: e\nkind: orbit\ndomain: {lo: [0], hi: [1]}\ngrid: 5\n"
        "orbit: {xi: {type: constant, value: [1, 0]}, x0: [0, 0]}\n");
    const OrbitScenario s = build_orbit_scenario(cfg[0]);
    Vector x(2), y(2);
    x << 0.3, -0.7;
    y << 0.5, 2.0;
    const Matrix h = gl_eval(s.h, x, y);
    CHECK((h - Matrix::Identity(2, 2) / 0.25).norm() < 1e-12);
    y << 0.0, 1.0;
    CHECK(s.h.excluded(x, y));
    CHECK_FALSE(s.analytic.has_value());
  }

  TEST_CASE("on-shell induced metric is psi / |xi|^2") {
    const auto cfg = parse_config(kOrbit);
    const OrbitScenario s = build_orbit_scenario(cfg[0]);
    Vector x(2);
    x << 0.6, 0.8;
    const Matrix h = gl_eval(s.h, x, s.xi.value(x));
    CHECK((h - Matrix::Identity(2, 2)).norm() < 1e-12);  // |xi| = |x| = 1
  }

  TEST_CASE("orbit scenario: solution at half the volume, perturbations above it") {
    const auto cfg = load_config(kConfigs / "orbit_rotation.yaml");
    const ScenarioReport r = run_scenario(cfg[0]);
    CHECK(r.passed());
    CHECK(std::abs(value_of(r, "L_xi(solution)") - std::numbers::pi) < 1e-4);
    CHECK(value_of(r, "min L_xi(perturbed) - half_volume") > 1e-6);
    CHECK(value_of(r, "perturbed_candidates") == 50);
  }

  TEST_CASE("numerical orbit of a spiral field") {
    const auto cfg = load_config(kConfigs / "orbit_linear.yaml");
    CHECK(run_scenario(cfg[0]).passed());
  }

  TEST_CASE("pfaff scenarios") {
    for (const char* name : {"pfaff_exact.yaml", "pfaff_integrable.yaml", "pfaff_nonclosed.yaml"}) {
      CAPTURE(name);
      const auto cfg = load_config(kConfigs / name);
      CHECK(run_scenario(cfg[0]).passed());
    }
    // A = dx1 on the unit square: g = delta, A# = d/da1
    const auto unit = parse_config(
        "name: u\nkind: pfaff\ndomain: {lo: [0, 0], hi: [1, 1]}\ngrid: 5\n"
        "pfaff: {form: {type: constant, value: [1, 0]}, candidates: [{type: affine, v: [1, 0]}], expect: solution}\n");
    const PfaffScenario s = build_pfaff_scenario(unit[0]);
    Vector a(2);
    a << 0.2, 0.9;
    CHECK((s.g.value(a) - Matrix::Identity(2, 2)).norm() < 1e-15);
    CHECK(s.a_sharp.value(a)(0) == 1.0);
    CHECK(s.a_sharp.value(a)(1) == 0.0);
    // a non-solution declared as the solution fails its verdicts
    const auto wrong = parse_config(
        "name: w\nkind: pfaff\ndomain: {lo: [0, 0.5], hi: [1, 1.5]}\ngrid: 11\n"
        "pfaff: {form: {type: linear, matrix: [[0, 1], [0, 0]]}, candidates: [{type: affine, v: [1, 1]}], expect: "
        "solution}\n");
    CHECK_FALSE(run_scenario(wrong[0]).passed());
  }

  TEST_CASE("pseudolinear scenarios pass on a 21 x 21 grid") {
    for (const char* name : {"pseudolinear_exponential.yaml", "pseudolinear_quotient.yaml"}) {
      CAPTURE(name);
      const auto cfg = load_config(kConfigs / name);
      CHECK(cfg[0].grid == 21);
      const ScenarioReport r = run_scenario(cfg[0]);
      CHECK(r.passed());
      CHECK(value_of(r, "system_residual_max") < 1e-9);
      CHECK(value_of(r, "level_set_sff_residual_max") < 1e-9);
    }
  }

  TEST_CASE("field equation scenarios") {
    const ScenarioReport riem = run_scenario(load_config(kConfigs / "field_equations_riemannian.yaml")[0]);
    CHECK(riem.passed());
    CHECK_FALSE(riem.disclosure.empty());
    const ScenarioReport orbit = run_scenario(load_config(kConfigs / "field_equations_orbit.yaml")[0]);
    CHECK(orbit.passed());
    CHECK(value_of(orbit, "samples_skipped_on_singular_locus") > 0);  // y = 0 and y orthogonal to xi
    CHECK(value_of(orbit, "max F_max") > 1e-6);
  }

  TEST_CASE("overrides and defaults") {
    const auto cfg = parse_config(kOrbit, Overrides{101, 0.5});
    CHECK(cfg[0].grid == 101);
    for (const auto& [key, v] : cfg[0].tolerances) CHECK(v == 0.5);
    CHECK_THROWS_AS(parse_config(kOrbit, Overrides{2, std::nullopt}), ConfigError);
    const auto plain = parse_config(kOrbit);
    CHECK(plain[0].defaults_used.size() == 3);  // psi, amplitude, seed
    const ScenarioReport r = run_scenario(plain[0]);
    CHECK(r.notes.front().find("calibration defaults") != std::string::npos);
  }

  TEST_CASE("scenario lists require unique names") {
    const std::string item = "  - name: o\n    kind: custom-gl-field-eqs\n    field_equations:\n"
                             "      gamma: {type: identity}\n      sigma: {type: zero}\n"
                             "      x: {lo: [0], hi: [1], n: 2}\n      y: {lo: [1], hi: [2], n: 2}\n";
    CHECK(parse_config("scenarios:\n" + item).size() == 1);
    CHECK(config_error_line("scenarios:\n" + item + item) == 9);
  }

  TEST_CASE("property: reports are byte-identical across thread counts") {
    std::vector<ScenarioConfig> all;
    for (const auto& entry : fs::directory_iterator(kConfigs))
      for (auto& c : load_config(entry.path(), Overrides{11, std::nullopt})) all.push_back(std::move(c));
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    const Report base = run(all, Parallelism{1});
    const std::string text = report_text(base), json = report_json(base);
    for (int threads : {2, 3, 8}) {
      const Report r = run(all, Parallelism{threads});
      CHECK(report_text(r) == text);
      CHECK(report_json(r) == json);
      for (std::size_t s = 0; s < r.scenarios.size(); ++s)
        for (std::size_t t = 0; t < r.scenarios[s].tables.size(); ++t)
          CHECK(table_csv(r.scenarios[s].tables[t]) == table_csv(base.scenarios[s].tables[t]));
    }
  }

  TEST_CASE("write_report writes tables, and plots only on request") {
    const Report r = run(parse_config(kOrbit));
    const fs::path dir = scratch("written");
    fs::remove_all(dir);
    write_report(r, dir, false);
    CHECK(fs::exists(dir / "report.txt"));
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "o_nodes.csv"));
    CHECK_FALSE(fs::exists(dir / "o_plot_orbit.csv"));
    write_report(r, dir, true);
    CHECK(fs::exists(dir / "o_plot_orbit.csv"));
    std::ifstream csv(dir / "o_nodes.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "a1,f1,f2,residual_1_1,residual_2_1,integrand");
  }

  TEST_CASE("cli exit codes") {
    const fs::path out = scratch("cli");
    CHECK(run_cli("--config " + (kConfigs / "pseudolinear_quotient.yaml").string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "report.json"));

    const fs::path failing = scratch("failing.yaml");
    std::ofstream(failing) << "name: w\nkind: pfaff\ndomain: {lo: [0, 0.5], hi: [1, 1.5]}\ngrid: 11\n"
                              "pfaff: {form: {type: linear, matrix: [[0, 1], [0, 0]]}, candidates: [{type: affine, "
                              "v: [1, 1]}], expect: solution}\n";
    CHECK(run_cli("--config " + failing.string() + " --out " + out.string()) == 1);

    const fs::path bad = scratch("bad.yaml");
    std::ofstream(bad) << "name: a\nkind: orbit\nbogus: 1\n";
    CHECK(run_cli("--config " + bad.string() + " --out " + out.string()) == 2);
    CHECK(run_cli("--config /nonexistent.yaml") == 2);
    CHECK(run_cli("--config " + bad.string() + " --threads 0") == 2);

    // exp(1000 t) overflows during the orbit integration
    const fs::path blowup = scratch("blowup.yaml");
    std::ofstream(blowup) << "name: b\nkind: orbit\ndomain: {lo: [0], hi: [10]}\ngrid: 50\n"
                             "orbit: {xi: {type: linear, matrix: [[1000, 0], [0, 1000]]}, x0: [1, 1]}\n";
    CHECK(run_cli("--config " + blowup.string() + " --out " + out.string()) == 3);
  }
}
