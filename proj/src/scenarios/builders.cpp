#include <cmath>

#include "glharm/errors.hpp"
#include "glharm/scenarios.hpp"

namespace glharm::scenarios {

namespace {

[[noreturn]] void fail(const FieldSpec& spec, const std::string& what) { throw ConfigError(what, spec.line); }

Vector vector_param(const FieldSpec& spec, const std::string& key, int dim) {
  const auto it = spec.vectors.find(key);
  if (it == spec.vectors.end()) fail(spec, "field '" + spec.type + "' needs a list '" + key + "'");
  if (static_cast<int>(it->second.size()) != dim)
    fail(spec, "field '" + spec.type + "': '" + key + "' must have " + std::to_string(dim) + " entries");
  return Eigen::Map<const Vector>(it->second.data(), dim);
}

double scalar_param(const FieldSpec& spec, const std::string& key, std::optional<double> fallback = std::nullopt) {
  const auto it = spec.scalars.find(key);
  if (it != spec.scalars.end()) return it->second;
  if (fallback) return *fallback;
  fail(spec, "field '" + spec.type + "' needs a number '" + key + "'");
}

Matrix matrix_param(const FieldSpec& spec, const std::string& key, int dim) {
  const auto it = spec.matrices.find(key);
  if (it == spec.matrices.end()) {
    // a 1x1 matrix may be written as a flat list
    if (dim == 1 && spec.vectors.count(key)) return vector_param(spec, key, 1);
    fail(spec, "field '" + spec.type + "' needs a matrix '" + key + "'");
  }
  const auto& rows = it->second;
  if (static_cast<int>(rows.size()) != dim) fail(spec, "'" + key + "' must have " + std::to_string(dim) + " rows");
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (static_cast<int>(rows[i].size()) != dim) fail(spec, "'" + key + "' must be square");
    for (int j = 0; j < dim; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void require_dim(const FieldSpec& spec, int dim, int expected) {
  if (dim != expected)
    fail(spec, "field '" + spec.type + "' is only defined in dimension " + std::to_string(expected));
}

Jetd dot(const Vector& c, JetSpan a) {
  Jetd s(0.0);
  for (Eigen::Index i = 0; i < c.size(); ++i) s += a[i] * c(i);
  return s;
}

Matrix checked_spd(const FieldSpec& spec, const Matrix& g) {
  try {
    inverse_det(g);
  } catch (const DegenerateMetricError& e) {
    fail(spec, std::string("metric '") + spec.type + "': " + e.what());
  }
  return g;
}

// Inverse of a catalog metric as a jet field, for raising indices of 1-forms.
MatrixField metric_inverse(const FieldSpec& spec, int dim) {
  if (spec.type == "identity") return fields::identity_metric(dim).components();
  if (spec.type == "constant" || spec.type == "diagonal")
    return fields::constant_metric(inverse_det(make_metric(spec, dim).value(Vector::Zero(dim))).inverse).components();
  if (spec.type == "sphere") {
    return MatrixField(2, 2, 2, [](JetSpan x) {
      return JetVector{Jetd(1.0), Jetd(0.0), Jetd(0.0), 1.0 / square(sin(x[0]))};
    });
  }
  if (spec.type == "conformal_linear") {
    const Vector v = vector_param(spec, "v", dim);
    const double w = scalar_param(spec, "w", 0.0);
    return MatrixField(dim, dim, dim, [=](JetSpan x) {
      const Jetd f = exp((dot(v, x) + w) * -2.0);
      JetVector out(dim * dim, Jetd(0.0));
      for (int i = 0; i < dim; ++i) out[i * dim + i] = f;
      return out;
    });
  }
  fail(spec, "unknown metric type '" + spec.type + "'");
}

bool is_identity(const FieldSpec& spec) { return spec.type == "identity"; }

}  // namespace

VectorField make_vector_field(const FieldSpec& spec, int dim) {
  if (spec.type == "rotation") {
    require_dim(spec, dim, 2);
    return fields::rotation();
  }
  if (spec.type == "constant") return fields::constant_vector(dim, vector_param(spec, "value", dim));
  if (spec.type == "linear") {
    const Vector offset = spec.vectors.count("offset") ? vector_param(spec, "offset", dim) : Vector::Zero(dim);
    return fields::affine_vector(matrix_param(spec, "matrix", dim), offset);
  }
  fail(spec, "unknown vector field type '" + spec.type + "' (expected rotation, constant or linear)");
}

MetricField make_metric(const FieldSpec& spec, int dim) {
  if (spec.type == "identity") return fields::identity_metric(dim);
  if (spec.type == "constant") return fields::constant_metric(checked_spd(spec, matrix_param(spec, "matrix", dim)));
  if (spec.type == "diagonal") {
    const Vector d = vector_param(spec, "values", dim);
    if (!(d.minCoeff() > 0)) fail(spec, "diagonal metric entries must be positive");
    return fields::constant_metric(d.asDiagonal());
  }
  if (spec.type == "sphere") {
    require_dim(spec, dim, 2);
    return fields::unit_sphere();
  }
  if (spec.type == "conformal_linear")
    return fields::conformal_metric(fields::affine(vector_param(spec, "v", dim), scalar_param(spec, "w", 0.0)));
  fail(spec, "unknown metric type '" + spec.type + "' (expected identity, constant, diagonal, sphere or conformal_linear)");
}

ScalarField make_scalar_field(const FieldSpec& spec, int dim) {
  if (spec.type == "affine") return fields::affine(vector_param(spec, "v", dim), scalar_param(spec, "w", 0.0));
  if (spec.type == "exponential")
    return fields::exp_affine(vector_param(spec, "v", dim), scalar_param(spec, "w", 0.0));
  if (spec.type == "quotient") {
    const Vector v = vector_param(spec, "v", dim), vp = vector_param(spec, "vp", dim);
    const double w = scalar_param(spec, "w", 0.0), wp = scalar_param(spec, "wp");
    return ScalarField(dim, [=](JetSpan a) { return (dot(v, a) + w) / (dot(vp, a) + wp); });
  }
  fail(spec, "unknown scalar field type '" + spec.type + "' (expected affine, exponential or quotient)");
}

GLMetric make_gl_metric(const FieldSpec& gamma_spec, const FieldSpec& sigma, int n, double margin) {
  const MetricField gamma = make_metric(gamma_spec, n);
  if (sigma.type == "zero") return gl::riemannian(gamma);
  if (sigma.type == "constant") {
    const double c = scalar_param(sigma, "c");
    return GLMetric(gamma, fields::constant(2 * n, c));
  }
  if (sigma.type == "affine") {
    Vector coeff(2 * n);
    coeff << vector_param(sigma, "a", n), vector_param(sigma, "b", n);
    return GLMetric(gamma, fields::affine(coeff, scalar_param(sigma, "c", 0.0)));
  }
  if (sigma.type == "neg_log_abs_y") {
    require_dim(sigma, n, 1);
    return GLMetric(gamma, ScalarField(2, [](JetSpan z) { return -log(abs(z[1])); }),
                    [margin](const Vector&, const Vector& y) { return std::abs(y(0)) <= margin; });
  }
  if (sigma.type == "orbit") {
    const FieldSpec* xi = sigma.child("xi");
    if (!xi) fail(sigma, "sigma 'orbit' needs a vector field 'xi'");
    return gl::orbit_metric(make_vector_field(*xi, n), gamma, margin);
  }
  fail(sigma, "unknown sigma type '" + sigma.type + "' (expected zero, constant, affine, neg_log_abs_y or orbit)");
}

OrbitScenario build_orbit_scenario(const ScenarioConfig& cfg) {
  const OrbitParams& p = *cfg.orbit;
  const int n = static_cast<int>(p.x0.size());
  const VectorField xi = make_vector_field(p.xi, n);
  const MetricField psi = make_metric(p.psi, n);
  const Vector xi0 = xi.value(p.x0);
  if (!(std::sqrt(xi0.dot(psi.value(p.x0) * xi0)) > 1e-12))
    fail(p.xi, "xi vanishes at x0: the orbit is a fixed point and <xi, x'> = 0 everywhere");

  OrbitScenario s{gl::orbit_metric(xi, psi), DirectionSection::orbit(xi), psi, xi, std::nullopt};
  if (p.xi.type == "rotation" && is_identity(p.psi)) {
    const double t0 = cfg.domain.lo(0), c1 = p.x0(0), c2 = p.x0(1);
    s.analytic = SmoothMap(VectorField(1, 2, [=](JetSpan t) {
      const Jetd c = cos(t[0] - t0), sn = sin(t[0] - t0);
      return JetVector{c * c1 - sn * c2, sn * c1 + c * c2};
    }));
  }
  return s;
}

PfaffScenario build_pfaff_scenario(const ScenarioConfig& cfg) {
  const PfaffParams& p = *cfg.pfaff;
  const int m = static_cast<int>(cfg.domain.lo.size());
  const VectorField a_form = make_vector_field(p.form, m);
  const MetricField phi = make_metric(p.phi, m);
  const MatrixField phi_inv = metric_inverse(p.phi, m);

  const VectorField a_sharp(m, m, [=](JetSpan a) {
    const JetVector inv = phi_inv(a), form = a_form(a);
    JetVector out(m, Jetd(0.0));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) out[i] += inv[i * m + j] * form[j];
    return out;
  });
  const MetricField g(m, [=](JetSpan a) {
    const JetVector ph = phi(a), sharp = a_sharp(a), form = a_form(a);
    Jetd norm2(0.0);
    for (int i = 0; i < m; ++i) norm2 += sharp[i] * form[i];
    JetVector out(m * m);
    for (int k = 0; k < m * m; ++k) out[k] = ph[k] / norm2;
    return out;
  });
  const DirectionSection t(m, 1, [a_form](const Vector& a, const Vector&) -> Matrix {
    return a_form.value(a).transpose();
  });
  return PfaffScenario{g, gl::inverse_square(), a_form, a_sharp, phi, t};
}

PseudolinearScenario build_pseudolinear_scenario(const ScenarioConfig& cfg) {
  const PseudolinearParams& p = *cfg.pseudolinear;
  const int m = static_cast<int>(p.v.size());
  if (p.v.norm() == 0) throw ConfigError("pseudolinear: v = 0 gives a constant f with vanishing gradient");

  const Vector v = p.v, vp = p.vp;
  const double w = p.w, wp = p.wp;
  std::optional<ScalarField> f;
  std::optional<DirectionSection> t;
  std::function<Jetd(JetSpan)> norm_a2;  // |A|^2 as a function of a

  if (p.family == "exponential") {
    f = fields::exp_affine(v, w);
    if (p.ordering == "pl") {
      // xi(a) = 1, A(x) = x v
      const VectorField a_of_x(1, m, [=](JetSpan x) {
        JetVector out(m);
        for (int k = 0; k < m; ++k) out[k] = x[0] * v(k);
        return out;
      });
      t = DirectionSection::decomposed_on_domain(fields::constant(m, 1.0), a_of_x);
    } else {
      // xi(x) = x, A(a) = v
      t = DirectionSection::decomposed(fields::stack(1, {fields::coordinate(1, 0)}), fields::constant_vector(m, v));
    }
    const ScalarField ff = *f;
    const double v2 = v.squaredNorm();
    norm_a2 = p.ordering == "pl" ? std::function<Jetd(JetSpan)>([ff, v2](JetSpan a) { return square(ff(a)) * v2; })
                                 : std::function<Jetd(JetSpan)>([v2](JetSpan) { return Jetd(v2); });
  } else {
    // corners of the box bound the affine denominator
    const Vector lo = cfg.domain.lo, hi = cfg.domain.hi;
    double lo_den = INFINITY, hi_den = -INFINITY;
    for (int corner = 0; corner < (1 << m); ++corner) {
      Vector a(m);
      for (int k = 0; k < m; ++k) a(k) = (corner >> k) & 1 ? hi(k) : lo(k);
      const double d = vp.dot(a) + wp;
      lo_den = std::min(lo_den, d);
      hi_den = std::max(hi_den, d);
    }
    if (!(lo_den > 0 || hi_den < 0))
      throw ConfigError("pseudolinear: denominator <v',a> + w' vanishes in the domain");
    FieldSpec q;
    q.type = "quotient";
    q.vectors = {{"v", {v.data(), v.data() + m}}, {"vp", {vp.data(), vp.data() + m}}};
    q.scalars = {{"w", w}, {"wp", wp}};
    f = make_scalar_field(q, m);
    // xi(a) = 1 / (<v',a> + w'), A(x) = v - x v'
    const ScalarField xi(m, [=](JetSpan a) { return 1.0 / (dot(vp, a) + wp); });
    const VectorField a_of_x(1, m, [=](JetSpan x) {
      JetVector out(m);
      for (int k = 0; k < m; ++k) out[k] = v(k) - x[0] * vp(k);
      return out;
    });
    t = DirectionSection::decomposed_on_domain(xi, a_of_x);
    const ScalarField ff = *f;
    norm_a2 = [=](JetSpan a) {
      const Jetd x = ff(a);
      Jetd s(0.0);
      for (int k = 0; k < m; ++k) s += square(v(k) - x * vp(k));
      return s;
    };
  }

  const MetricField g(m, [=](JetSpan a) {
    const Jetd inv = 1.0 / norm_a2(a);
    JetVector out(m * m, Jetd(0.0));
    for (int k = 0; k < m; ++k) out[k * m + k] = inv;
    return out;
  });
  return PseudolinearScenario{SmoothMap(fields::stack(m, {*f})), *f, *t, g};
}

}  // namespace glharm::scenarios
