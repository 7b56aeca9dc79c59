#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "glharm/gl_metric.hpp"
#include "oracles.hpp"

using namespace glharm;
using std::numbers::pi;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Vector cat(const Vector& x, const Vector& y) {
  Vector z(x.size() + y.size());
  z << x, y;
  return z;
}

// sigma(x, y) = a.x + b.y + c x0 y1 + d y0^2, a generic smooth conformal exponent
ScalarField mixed_sigma(int n, oracle::Rng& rng) {
  const Vector a = rng.uniform_vector(n, -0.5, 0.5), b = rng.uniform_vector(n, -0.5, 0.5);
  const double c = rng.uniform(-0.5, 0.5), d = rng.uniform(-0.5, 0.5);
  return ScalarField(2 * n, [=](JetSpan z) {
    Jetd s(0.0);
    for (int i = 0; i < n; ++i) s += a(i) * z[i] + b(i) * z[n + i];
    return s + c * z[0] * z[n + n - 1] + d * z[n] * z[n] + 0.1 * sin(z[0] + z[n]);
  });
}

}  // namespace

TEST_SUITE("gl_metric") {
  TEST_CASE("gl_eval examples") {
    const GLMetric flat = gl::riemannian(fields::unit_sphere());
    CHECK(gl_eval(flat, vec({1.0, 0.2}), vec({0.3, 0.4})) == fields::unit_sphere().value(vec({1.0, 0.2})));

    CHECK(gl_eval(gl::inverse_square(), vec({0.7}), vec({2.0}))(0, 0) == doctest::Approx(0.25).epsilon(1e-15));

    const GLMetric orbit = gl::orbit_metric(fields::rotation(), fields::identity_metric(2));
    CHECK(max_abs(gl_eval(orbit, vec({1, 0}), vec({0, 1})) - Matrix::Identity(2, 2)) < 1e-15);
  }

  TEST_CASE("singular locus evaluation throws") {
    CHECK_THROWS_AS(gl_eval(gl::inverse_square(), vec({0.0}), vec({0.0})), SingularLocusError);
    const GLMetric orbit = gl::orbit_metric(fields::rotation(), fields::identity_metric(2));
    CHECK_THROWS_AS(gl_eval(orbit, vec({1, 0}), vec({1, 0})), SingularLocusError);
    CHECK_THROWS_AS(em_tensors(orbit, vec({1, 0}), vec({1, 0})), SingularLocusError);
    CHECK_THROWS_AS(maxwell_residuals(orbit, vec({0, 0}), vec({0, 1})), SingularLocusError);
    // with a margin the near-cone is rejected too
    const GLMetric guarded = gl::orbit_metric(fields::rotation(), fields::identity_metric(2), 1e-3);
    CHECK_THROWS_AS(gl_eval(guarded, vec({1, 0}), vec({1, 1e-4})), SingularLocusError);
    CHECK_NOTHROW(gl_eval(orbit, vec({1, 0}), vec({1, 1e-4})));
  }

  TEST_CASE("delta_x examples") {
    oracle::Rng rng(1);
    const ScalarField s = mixed_sigma(2, rng);
    const GLMetric flat(fields::identity_metric(2), s);
    const Vector x = vec({0.2, 0.4}), y = vec({-0.3, 0.9});
    const Vector g = grad(s, cat(x, y));
    CHECK(delta_x(flat, s, x, y) == g.head(2));

    const GLMetric sphere = gl::riemannian(fields::unit_sphere());
    const ScalarField x_only(4, [](JetSpan z) { return z[0] * z[0] + sin(z[1]); });
    const Vector xs = vec({pi / 3, 0.5});
    CHECK(delta_x(sphere, x_only, xs, y) == grad(x_only, cat(xs, y)).head(2));

    const ScalarField y1(4, [](JetSpan z) { return z[2]; });
    const Matrix N = nonlinear_connection(sphere, xs, y);
    const Vector d = delta_x(sphere, y1, xs, y);
    CHECK(d(0) == doctest::Approx(-N(0, 0)));
    CHECK(d(1) == doctest::Approx(-N(0, 1)));
    // N^theta_phi = Gamma^theta_{phi phi} y^phi = -sin cos * y^phi
    CHECK(N(0, 1) == doctest::Approx(-std::sin(pi / 3) * std::cos(pi / 3) * y(1)).epsilon(1e-14));
  }

  TEST_CASE("electromagnetic tensors") {
    const Vector x = vec({1, 0}), y = vec({0, 1});
    const EMTensors zero = em_tensors(gl::riemannian(fields::unit_sphere()), vec({1.0, 0.0}), y);
    CHECK(max_abs(zero.F) == 0.0);
    CHECK(max_abs(zero.f) == 0.0);

    const EMTensors one = em_tensors(gl::inverse_square(), vec({0.5}), vec({2.0}));
    CHECK(one.F(0, 0) == 0.0);
    CHECK(one.f(0, 0) == 0.0);

    // orbit metric: hand expansion with finite-difference derivatives of sigma (psi flat, so N = 0)
    const GLMetric orbit = gl::orbit_metric(fields::rotation(), fields::identity_metric(2));
    const auto sv = oracle::values_of(orbit.sigma());
    const Vector d = oracle::fd_gradient(sv, cat(x, y));
    const double e2s = std::exp(2 * sv(cat(x, y)));
    Matrix F(2, 2), f(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        F(i, j) = e2s * (y(i) * d(j) - y(j) * d(i));
        f(i, j) = e2s * (y(i) * d(2 + j) - y(j) * d(2 + i));
      }
    const EMTensors em = em_tensors(orbit, x, y);
    CHECK(oracle::close_rel(em.F, F, 1e-6));
    CHECK(oracle::close_rel(em.f, f, 1e-6));
    CHECK(em.F == Matrix(-em.F.transpose()));
    CHECK(em.f == Matrix(-em.f.transpose()));
  }

  TEST_CASE("sigma-derived quantities") {
    const SigmaDerived z = sigma_derived(gl::riemannian(fields::unit_sphere()), vec({1.0, 0.3}), vec({0.2, 0.5}));
    CHECK(z.sigma_h == 0.0);
    CHECK(z.sigma_v == 0.0);
    CHECK(max_abs(z.sigma_ij) == 0.0);
    CHECK(max_abs(z.sigma_dot_ab) == 0.0);

    const GLMetric constant(fields::identity_metric(3), fields::constant(6, 0.7));
    const SigmaDerived c = sigma_derived(constant, vec({1, 2, 3}), vec({0.1, 0.2, 0.3}));
    CHECK(c.sigma_h == 0.0);
    CHECK(c.sigma_v == 0.0);
    CHECK(max_abs(c.sigma_ij) == 0.0);
    CHECK(max_abs(c.sigma_dot_ab) == 0.0);
    CHECK(max_abs(c.t) == 0.0);
  }

  TEST_CASE("sigma-derived on h = 1/y^2 at y = 2") {
    // Hand expansion of sigma = -ln y: sigma_y = -1/2, sigma_yy = 1/4, sigma_V = 1/4,
    // sigma_dot_11 = 1/4 + 1/4 - 1/8 = 3/8.
    const GLMetric h = gl::inverse_square();
    const Vector z = vec({0.3, 2.0});
    const auto sv = oracle::values_of(h.sigma());
    const Matrix fd = oracle::fd_hessian(sv, z);
    const Vector fg = oracle::fd_gradient(sv, z);
    const double oracle_dot = fd(1, 1) + fg(1) * fg(1) - 0.5 * fg(1) * fg(1);
    CHECK(oracle_dot == doctest::Approx(0.375).epsilon(1e-6));

    const SigmaDerived s = sigma_derived(h, vec({0.3}), vec({2.0}));
    CHECK(s.sigma_v == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(s.sigma_dot_ab(0, 0) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(s.sigma_dot == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(s.sigma_h == 0.0);
    CHECK(s.sigma_ij(0, 0) == 0.0);
    CHECK(s.t(0, 0) == 0.0);
  }

  TEST_CASE("maxwell residual examples") {
    CHECK(maxwell_residuals(gl::riemannian(fields::unit_sphere()), vec({1.0, 0.3}), vec({0.2, 0.5})).max_abs() == 0.0);
    CHECK(maxwell_residuals(gl::inverse_square(), vec({0.3}), vec({2.0})).max_abs() == 0.0);

    const ScalarField y_only(4, [](JetSpan z) { return 0.3 * z[2] - 0.2 * z[3] * z[3] + 0.1 * z[2] * z[3]; });
    const GLMetric flat(fields::identity_metric(2), y_only);
    const auto r = maxwell_residuals(flat, vec({0.4, -0.2}), vec({0.7, 1.1}));
    CHECK(max_abs(r.horizontal) == 0.0);
  }

  TEST_CASE("einstein components") {
    const auto flat = einstein_components(gl::riemannian(fields::identity_metric(3)), vec({1, 2, 3}), vec({1, 0, 0}), 2.0);
    CHECK(max_abs(flat.horizontal) == 0.0);
    CHECK(max_abs(flat.vertical) == 0.0);

    const auto sphere = einstein_components(gl::riemannian(fields::unit_sphere()), vec({1.1, 0.2}), vec({0.3, 0.4}), 1.0);
    CHECK(max_abs(sphere.horizontal) < 1e-12);

    const GLMetric orbit = gl::orbit_metric(fields::rotation(), fields::identity_metric(2));
    const auto e = einstein_components(orbit, vec({0.8, 0.3}), vec({-0.2, 1.0}), 0.5);
    CHECK(max_abs(e.vertical) == 0.0);

    CHECK_THROWS_AS(einstein_components(orbit, vec({0.8, 0.3}), vec({-0.2, 1.0}), 0.0), std::invalid_argument);
  }

  TEST_CASE("t_ij curvature terms on the sphere with y-dependent sigma") {
    // Cross-check the curvature-dependent part of t_ij against a direct index loop.
    const ScalarField s(4, [](JetSpan z) { return 0.2 * z[2] + 0.1 * z[3] * z[3]; });
    const GLMetric g(fields::unit_sphere(), s);
    const Vector x = vec({1.2, 0.1}), y = vec({0.4, -0.6});
    const SigmaDerived d = sigma_derived(g, x, y);
    const auto curv = curvature(fields::unit_sphere(), x);
    const Matrix gam = fields::unit_sphere().value(x), gi = gam.inverse();
    const Vector P = grad(s, cat(x, y)).tail(2);
    Matrix expected = Matrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double v = 0;
        for (int st = 0; st < 2; ++st)
          for (int t = 0; t < 2; ++t)
            for (int p = 0; p < 2; ++p) v += gam(i, j) * curv.ricci(st, t) * y(st) * gi(t, p) * P(p);
        for (int a = 0; a < 2; ++a)
          for (int t = 0; t < 2; ++t) {
            v += P(i) * curv.riemann(a, t, j, a) * y(t);
            for (int st = 0; st < 2; ++st)
              for (int p = 0; p < 2; ++p) v -= gam(i, st) * gi(a, p) * P(p) * curv.riemann(st, t, j, a) * y(t);
          }
        expected(i, j) = v;  // (n - 2) term vanishes for n = 2
      }
    CHECK(max_abs(d.t - expected) < 1e-13);
    CHECK(d.t_antisymmetric == doctest::Approx(0.5 * max_abs(Matrix(d.t - d.t.transpose()))));
  }

  TEST_CASE("property: conformality and skew electromagnetic tensors") {
    oracle::Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 2;
      const GLMetric g(n == 2 ? fields::unit_sphere() : fields::identity_metric(3), mixed_sigma(n, rng));
      const Vector x = n == 2 ? vec({rng.uniform(0.5, 2.5), rng.uniform(0, 6)}) : Vector(rng.uniform_vector(3, -1, 1));
      const Vector y = rng.uniform_vector(n, -1, 1);
      const double e2s = std::exp(2 * g.sigma().value(cat(x, y)));
      const Matrix ratio = gl_eval(g, x, y) * g.gamma().value(x).inverse();
      CHECK(max_abs(Matrix(ratio - e2s * Matrix::Identity(n, n))) < 1e-12 * e2s);
      const EMTensors em = em_tensors(g, x, y);
      CHECK(em.F == Matrix(-em.F.transpose()));
      CHECK(em.f == Matrix(-em.f.transpose()));
    }
  }

  TEST_CASE("property: f vanishes when sigma does not depend on y") {
    oracle::Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
      const Vector a = rng.uniform_vector(2, -1, 1);
      const GLMetric g(fields::unit_sphere(), ScalarField(4, [a](JetSpan z) { return a(0) * z[0] + a(1) * sin(z[1]); }));
      const EMTensors em = em_tensors(g, vec({rng.uniform(0.5, 2.5), 0.3}), rng.uniform_vector(2, -1, 1));
      CHECK(max_abs(em.f) < 1e-10);
    }
  }

  TEST_CASE("property: zero sigma collapses every field-equation quantity") {
    oracle::Rng rng(23);
    const GLMetric g = gl::riemannian(fields::unit_sphere());
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = vec({rng.uniform(0.3, 2.8), rng.uniform(0, 6)});
      const Vector y = rng.uniform_vector(2, -1, 1);
      const SigmaDerived s = sigma_derived(g, x, y);
      CHECK(std::abs(s.sigma_h) + std::abs(s.sigma_v) + std::abs(s.sigma_bar) + std::abs(s.sigma_dot) < 1e-12);
      CHECK(max_abs(s.sigma_ij) < 1e-12);
      CHECK(max_abs(s.sigma_dot_ab) < 1e-12);
      CHECK(max_abs(s.t) < 1e-12);
      const EMTensors em = em_tensors(g, x, y);
      CHECK(max_abs(em.F) + max_abs(em.f) < 1e-12);
      CHECK(maxwell_residuals(g, x, y).max_abs() < 1e-12);
    }
  }

  TEST_CASE("property: N is homogeneous of degree one in y") {
    oracle::Rng rng(29);
    const GLMetric g = gl::riemannian(fields::unit_sphere());
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = vec({rng.uniform(0.3, 2.8), rng.uniform(0, 6)});
      const Vector y = rng.uniform_vector(2, -1, 1);
      CHECK(nonlinear_connection(g, x, 2 * y) == Matrix(2 * nonlinear_connection(g, x, y)));
    }
    CHECK(max_abs(nonlinear_connection(gl::riemannian(fields::identity_metric(3)), vec({1, 2, 3}), vec({4, 5, 6}))) == 0);
  }

  TEST_CASE("property: vertical Maxwell residual is invariant under rescaling a flat gamma") {
    oracle::Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
      const Vector b = rng.uniform_vector(2, -1, 1);
      const ScalarField s(4, [b](JetSpan z) { return b(0) * z[2] + b(1) * z[3] * z[3] + 0.2 * z[2] * z[3]; });
      const GLMetric g1(fields::identity_metric(2), s);
      const GLMetric g3(fields::constant_metric(3 * Matrix::Identity(2, 2)), s);
      const Vector x = rng.uniform_vector(2, -1, 1), y = rng.uniform_vector(2, -1, 1);
      const auto r1 = maxwell_residuals(g1, x, y), r3 = maxwell_residuals(g3, x, y);
      for (std::size_t i = 0; i < r1.vertical.size(); ++i)
        CHECK(std::abs(r1.vertical.data()[i] - r3.vertical.data()[i]) < 1e-12);
    }
  }

  TEST_CASE("custom connections plug into the residual evaluators") {
    DistinguishedConnection zero{"all coefficients zero", [](const GLMetric& g, const Vector&, const Vector&) {
                                   return ConnectionCoefficients{Tensor3d(g.dim()), Tensor3d(g.dim())};
                                 }};
    const GLMetric g(fields::identity_metric(2), fields::constant(4, 0.0));
    CHECK(maxwell_residuals(g, vec({0, 0}), vec({1, 1}), zero).max_abs() == 0.0);
    CHECK(connection_disclosure(zero).find("all coefficients zero") != std::string::npos);
    CHECK(connection_disclosure(default_connection()).find("Levi-Civita") != std::string::npos);

    DistinguishedConnection broken{"bad", [](const GLMetric&, const Vector&, const Vector&) {
                                     return ConnectionCoefficients{Tensor3d(1), Tensor3d(1)};
                                   }};
    CHECK_THROWS_AS(sigma_derived(g, vec({0, 0}), vec({1, 1}), broken), std::logic_error);
  }
}
