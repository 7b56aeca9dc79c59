#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "glharm/errors.hpp"
#include "glharm/scenarios.hpp"

namespace glharm::scenarios {

const FieldSpec* FieldSpec::child(const std::string& key) const {
  for (const auto& [k, spec] : children)
    if (k == key) return &spec;
  return nullptr;
}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) { throw ConfigError(what, line_of(n)); }

// Rejects keys outside `allowed` so typos do not silently fall back to defaults.
void check_keys(const YAML::Node& map, const std::string& where, const std::set<std::string>& allowed) {
  if (!map.IsMap()) fail(map, where + " must be a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

YAML::Node require(const YAML::Node& map, const std::string& key, const std::string& where) {
  const YAML::Node n = map[key];
  if (!n) fail(map, "missing '" + key + "' in " + where);
  return n;
}

double as_double(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be a number");
  try {
    return n.as<double>();
  } catch (const YAML::BadConversion&) {
    fail(n, what + " must be a number, got '" + n.Scalar() + "'");
  }
}

int as_int(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be an integer");
  try {
    return n.as<int>();
  } catch (const YAML::BadConversion&) {
    fail(n, what + " must be an integer, got '" + n.Scalar() + "'");
  }
}

std::string as_string(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be a string");
  return n.Scalar();
}

std::vector<double> as_list(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) fail(n, what + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : n) out.push_back(as_double(x, what + " entry"));
  return out;
}

Vector as_vector(const YAML::Node& n, const std::string& what) {
  const std::vector<double> v = as_list(n, what);
  if (v.empty()) fail(n, what + " must not be empty");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

FieldSpec parse_field(const YAML::Node& n, const std::string& what) {
  if (!n.IsMap()) fail(n, what + " must be a mapping with a 'type'");
  FieldSpec spec;
  spec.line = line_of(n);
  spec.type = as_string(require(n, "type", what), what + ".type");
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& value = kv.second;
    if (key == "type") continue;
    if (value.IsMap()) {
      spec.children.emplace_back(key, parse_field(value, what + "." + key));
    } else if (value.IsSequence() && value.size() > 0 && value[0].IsSequence()) {
      std::vector<std::vector<double>> rows;
      for (const auto& row : value) rows.push_back(as_list(row, what + "." + key + " row"));
      spec.matrices[key] = std::move(rows);
    } else if (value.IsSequence()) {
      spec.vectors[key] = as_list(value, what + "." + key);
    } else {
      spec.scalars[key] = as_double(value, what + "." + key);
    }
  }
  return spec;
}

const std::map<std::string, std::map<std::string, double>>& default_tolerances() {
  static const std::map<std::string, std::map<std::string, double>> table{
      {"orbit",
       {{"functional", 1e-4}, {"bound", 1e-9}, {"gap", 1e-6}, {"residual", 1e-9}, {"agreement", 1e-10},
        {"variation", 1e-5}, {"el", 1e-5}, {"flow", 1e-6}}},
      {"pfaff", {{"functional", 1e-8}, {"bound", 1e-9}, {"gap", 1e-6}, {"residual", 1e-9}, {"agreement", 1e-10}}},
      {"pseudolinear",
       {{"functional", 1e-8}, {"bound", 1e-9}, {"residual", 1e-9}, {"sff", 1e-9}, {"variation", 1e-5}}},
      {"custom-gl-field-eqs", {{"vanish", 1e-12}, {"skew", 1e-12}}},
  };
  return table;
}

template <typename T>
T optional_value(const YAML::Node& map, const std::string& key, T fallback, ScenarioConfig& cfg,
                 T (*convert)(const YAML::Node&, const std::string&)) {
  const YAML::Node n = map[key];
  if (n) return convert(n, key);
  std::ostringstream s;
  s << key << "=" << fallback;
  cfg.defaults_used.push_back(s.str());
  return fallback;
}

double to_double(const YAML::Node& n, const std::string& w) { return as_double(n, w); }
int to_int(const YAML::Node& n, const std::string& w) { return as_int(n, w); }

void parse_domain(const YAML::Node& root, ScenarioConfig& cfg) {
  const YAML::Node d = require(root, "domain", "scenario");
  check_keys(d, "domain", {"lo", "hi"});
  cfg.domain.lo = as_vector(require(d, "lo", "domain"), "domain.lo");
  cfg.domain.hi = as_vector(require(d, "hi", "domain"), "domain.hi");
  if (cfg.domain.lo.size() != cfg.domain.hi.size()) fail(d, "domain.lo and domain.hi differ in length");
  for (Eigen::Index k = 0; k < cfg.domain.lo.size(); ++k)
    if (!(cfg.domain.hi(k) > cfg.domain.lo(k))) fail(d, "domain must satisfy lo < hi on every axis");
  const YAML::Node g = require(root, "grid", "scenario");
  cfg.grid = as_int(g, "grid");
  if (cfg.grid < 3) fail(g, "grid must be at least 3 nodes per axis");
}

GridAxis parse_axis(const YAML::Node& n, const std::string& what) {
  check_keys(n, what, {"lo", "hi", "n"});
  GridAxis axis;
  axis.lo = as_vector(require(n, "lo", what), what + ".lo");
  axis.hi = as_vector(require(n, "hi", what), what + ".hi");
  axis.n = as_int(require(n, "n", what), what + ".n");
  if (axis.lo.size() != axis.hi.size()) fail(n, what + ".lo and .hi differ in length");
  if (axis.n < 1) fail(n, what + ".n must be positive");
  if (axis.n > 1)
    for (Eigen::Index k = 0; k < axis.lo.size(); ++k)
      if (!(axis.hi(k) > axis.lo(k))) fail(n, what + " must satisfy lo < hi when n > 1");
  return axis;
}

ScenarioConfig parse_scenario(const YAML::Node& root, const Overrides& overrides) {
  ScenarioConfig cfg;
  cfg.line = line_of(root);
  check_keys(root, "scenario",
             {"name", "kind", "domain", "grid", "tolerances", "flow", "orbit", "pfaff", "pseudolinear",
              "field_equations"});
  cfg.name = as_string(require(root, "name", "scenario"), "name");
  const YAML::Node kind = require(root, "kind", "scenario");
  cfg.kind = as_string(kind, "kind");
  if (!default_tolerances().count(cfg.kind))
    fail(kind, "unknown kind '" + cfg.kind + "' (expected orbit, pfaff, pseudolinear or custom-gl-field-eqs)");

  const bool meshed = cfg.kind != "custom-gl-field-eqs";
  if (meshed) parse_domain(root, cfg);

  cfg.tolerances = default_tolerances().at(cfg.kind);
  if (const YAML::Node t = root["tolerances"]) {
    if (!t.IsMap()) fail(t, "tolerances must be a mapping");
    for (const auto& kv : t) {
      const std::string key = kv.first.as<std::string>();
      if (!cfg.tolerances.count(key)) fail(kv.first, "unknown tolerance '" + key + "' for kind " + cfg.kind);
      const double v = as_double(kv.second, "tolerances." + key);
      if (!(v > 0)) fail(kv.second, "tolerances." + key + " must be positive");
      cfg.tolerances[key] = v;
    }
  }
  if (const YAML::Node f = root["flow"]) {
    check_keys(f, "flow", {"steps"});
    cfg.flow = true;
    cfg.flow_steps = as_int(require(f, "steps", "flow"), "flow.steps");
    if (cfg.flow_steps < 2) fail(f, "flow.steps must be at least 2");
  }

  const std::string section = cfg.kind == "custom-gl-field-eqs" ? "field_equations" : cfg.kind;
  for (const char* other : {"orbit", "pfaff", "pseudolinear", "field_equations"})
    if (other != section && root[other]) fail(root[other], std::string("section '") + other + "' does not belong to kind " + cfg.kind);
  const YAML::Node p = require(root, section, "scenario of kind " + cfg.kind);

  if (cfg.kind == "orbit") {
    check_keys(p, "orbit", {"xi", "psi", "x0", "perturbations", "amplitude", "seed"});
    OrbitParams o;
    o.xi = parse_field(require(p, "xi", "orbit"), "orbit.xi");
    if (p["psi"]) {
      o.psi = parse_field(p["psi"], "orbit.psi");
    } else {
      o.psi.type = "identity";
      cfg.defaults_used.push_back("psi=identity");
    }
    o.x0 = as_vector(require(p, "x0", "orbit"), "orbit.x0");
    o.perturbations = optional_value<int>(p, "perturbations", 50, cfg, to_int);
    o.amplitude = optional_value<double>(p, "amplitude", 0.3, cfg, to_double);
    o.seed = static_cast<std::uint64_t>(optional_value<int>(p, "seed", 1, cfg, to_int));
    if (o.perturbations < 1) fail(p, "orbit.perturbations must be positive");
    if (!(o.amplitude > 0)) fail(p, "orbit.amplitude must be positive");
    if (cfg.domain.lo.size() != 1) fail(root["domain"], "orbit scenarios live on an interval: domain must be 1-D");
    cfg.orbit = std::move(o);
  } else if (cfg.kind == "pfaff") {
    check_keys(p, "pfaff", {"form", "phi", "candidates", "expect"});
    PfaffParams f;
    f.form = parse_field(require(p, "form", "pfaff"), "pfaff.form");
    if (p["phi"]) {
      f.phi = parse_field(p["phi"], "pfaff.phi");
    } else {
      f.phi.type = "identity";
      cfg.defaults_used.push_back("phi=identity");
    }
    const YAML::Node c = require(p, "candidates", "pfaff");
    if (!c.IsSequence() || c.size() == 0) fail(c, "pfaff.candidates must be a non-empty list");
    for (const auto& item : c) f.candidates.push_back(parse_field(item, "pfaff.candidates entry"));
    const YAML::Node e = require(p, "expect", "pfaff");
    f.expect = as_string(e, "pfaff.expect");
    if (f.expect != "solution" && f.expect != "scaled-solution" && f.expect != "no-solution")
      fail(e, "pfaff.expect must be 'solution', 'scaled-solution' or 'no-solution'");
    cfg.pfaff = std::move(f);
  } else if (cfg.kind == "pseudolinear") {
    check_keys(p, "pseudolinear", {"family", "ordering", "v", "w", "vp", "wp", "seed"});
    PseudolinearParams q;
    const YAML::Node fam = require(p, "family", "pseudolinear");
    q.family = as_string(fam, "pseudolinear.family");
    if (q.family != "exponential" && q.family != "quotient")
      fail(fam, "pseudolinear.family must be 'exponential' or 'quotient'");
    const YAML::Node ord = require(p, "ordering", "pseudolinear");
    q.ordering = as_string(ord, "pseudolinear.ordering");
    if (q.ordering != "pl" && q.ordering != "e3") fail(ord, "pseudolinear.ordering must be 'pl' or 'e3'");
    if (q.family == "quotient" && q.ordering != "pl")
      fail(ord, "the quotient family has xi depending on a, so it needs ordering 'pl'");
    q.v = as_vector(require(p, "v", "pseudolinear"), "pseudolinear.v");
    q.w = as_double(require(p, "w", "pseudolinear"), "pseudolinear.w");
    if (q.family == "quotient") {
      q.vp = as_vector(require(p, "vp", "pseudolinear"), "pseudolinear.vp");
      q.wp = as_double(require(p, "wp", "pseudolinear"), "pseudolinear.wp");
      if (q.vp.size() != q.v.size()) fail(p["vp"], "pseudolinear.vp must have the length of v");
    } else if (p["vp"] || p["wp"]) {
      fail(p["vp"] ? p["vp"] : p["wp"], "vp/wp only apply to the quotient family");
    }
    if (q.v.size() != cfg.domain.lo.size()) fail(p["v"], "pseudolinear.v must match the domain dimension");
    q.seed = static_cast<std::uint64_t>(optional_value<int>(p, "seed", 1, cfg, to_int));
    cfg.pseudolinear = std::move(q);
  } else {
    check_keys(p, "field_equations", {"gamma", "sigma", "kappa", "x", "y", "margin", "expect"});
    FieldEquationParams fe;
    fe.gamma = parse_field(require(p, "gamma", "field_equations"), "field_equations.gamma");
    fe.sigma = parse_field(require(p, "sigma", "field_equations"), "field_equations.sigma");
    fe.kappa = optional_value<double>(p, "kappa", 1.0, cfg, to_double);
    if (fe.kappa == 0) fail(p["kappa"], "kappa must be nonzero");
    fe.x = parse_axis(require(p, "x", "field_equations"), "field_equations.x");
    fe.y = parse_axis(require(p, "y", "field_equations"), "field_equations.y");
    if (fe.x.lo.size() != fe.y.lo.size()) fail(p["y"], "x and y sample boxes must have the same dimension");
    fe.margin = optional_value<double>(p, "margin", 1e-3, cfg, to_double);
    if (!(fe.margin >= 0)) fail(p["margin"], "margin must be non-negative");
    if (const YAML::Node e = p["expect"]) {
      fe.expect = as_string(e, "field_equations.expect");
      if (fe.expect != "riemannian") fail(e, "field_equations.expect must be 'riemannian'");
    }
    cfg.field_equations = std::move(fe);
  }

  if (overrides.grid) {
    if (*overrides.grid < 3) throw ConfigError("--grid must be at least 3");
    if (meshed) cfg.grid = *overrides.grid;
  }
  if (overrides.tol) {
    if (!(*overrides.tol > 0)) throw ConfigError("--tol must be positive");
    for (auto& [key, value] : cfg.tolerances) value = *overrides.tol;
  }

  YAML::Emitter echo;
  echo << root;
  cfg.echo = echo.c_str();
  return cfg;
}

}  // namespace

std::vector<ScenarioConfig> parse_config(const std::string& text, const Overrides& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error: " + e.msg, e.mark.line >= 0 ? std::optional<int>(e.mark.line + 1) : std::nullopt);
  }
  if (!root || root.IsNull()) throw ConfigError("empty configuration");
  if (!root.IsMap()) fail(root, "configuration must be a mapping");

  std::vector<ScenarioConfig> out;
  if (root["scenarios"]) {
    check_keys(root, "configuration", {"scenarios"});
    const YAML::Node list = root["scenarios"];
    if (!list.IsSequence() || list.size() == 0) fail(list, "scenarios must be a non-empty list");
    std::set<std::string> names;
    for (const auto& item : list) {
      out.push_back(parse_scenario(item, overrides));
      if (!names.insert(out.back().name).second) fail(item, "duplicate scenario name '" + out.back().name + "'");
    }
  } else {
    out.push_back(parse_scenario(root, overrides));
  }
  return out;
}

std::vector<ScenarioConfig> load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

}  // namespace glharm::scenarios
