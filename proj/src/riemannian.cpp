#include "glharm/riemannian.hpp"

#include <stdexcept>

namespace glharm {

namespace {

Duald pad(double value, const Vector& partials, int total_dim) {
  Vector g = Vector::Zero(total_dim);
  g.head(partials.size()) = partials;
  return Duald(value, std::move(g));
}

}  // namespace

LiftedMetric lift_metric(const MetricField& gamma, const Vector& x, int total_dim) {
  const int n = gamma.dim();
  if (x.size() != n) throw std::invalid_argument("lift_metric: coordinate dimension mismatch");
  if (total_dim < n) throw std::invalid_argument("lift_metric: total_dim < dim");

  const JetVector jets = gamma.jets(x);
  Matrix value(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) value(i, j) = jets[i * n + j].value();
  const Matrix inv = inverse_det(value).inverse;

  // d_a gamma_ij, and d_a gamma^ij = -(gamma^-1 d_a gamma gamma^-1)_ij
  std::vector<Matrix> d_metric(n, Matrix(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vector g = jets[i * n + j].gradient(n);
      for (int a = 0; a < n; ++a) d_metric[a](i, j) = g(a);
    }

  LiftedMetric out;
  out.dim = n;
  out.metric.reserve(n * n);
  out.inverse.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.metric.push_back(pad(value(i, j), jets[i * n + j].gradient(n), total_dim));

  std::vector<Matrix> d_inverse(n);
  for (int a = 0; a < n; ++a) d_inverse[a] = -inv * d_metric[a] * inv;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vector partials(n);
      for (int a = 0; a < n; ++a) partials(a) = d_inverse[a](i, j);
      out.inverse.push_back(pad(inv(i, j), partials, total_dim));
    }

  // dg(k, i, j) = d_k gamma_ij as a dual; its derivatives come from the Hessian.
  Tensor3<Duald> dg(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Jetd& e = jets[i * n + j];
      const Vector g = e.gradient(n);
      const Matrix h = e.hessian(n);
      for (int k = 0; k < n; ++k) dg(k, i, j) = pad(g(k), h.row(k).transpose(), total_dim);
    }

  out.christoffel = Tensor3<Duald>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        Duald s(0.0);
        for (int l = 0; l < n; ++l) s += out.g_inv(i, l) * (dg(j, l, k) + dg(k, j, l) - dg(l, j, k));
        s = 0.5 * s;
        out.christoffel(i, j, k) = s;
        out.christoffel(i, k, j) = s;
      }
  return out;
}

Tensor3d christoffel(const MetricField& gamma, const Vector& x) {
  return lift_metric(gamma, x, gamma.dim()).christoffel.map([](const Duald& d) { return d.value(); });
}

CurvatureSample curvature(const LiftedMetric& lifted) {
  const int n = lifted.dim;
  const auto& gam = lifted.christoffel;
  CurvatureSample out;
  out.riemann = Tensor4d(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double r = gam(i, j, k).derivative(l) - gam(i, j, l).derivative(k);
          for (int p = 0; p < n; ++p)
            r += gam(p, j, k).value() * gam(i, p, l).value() - gam(p, j, l).value() * gam(i, p, k).value();
          out.riemann(i, j, k, l) = r;
        }
  out.ricci = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out.ricci(i, j) += out.riemann(k, i, j, k);
  out.scalar = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.scalar += lifted.g_inv(i, j).value() * out.ricci(i, j);
  return out;
}

CurvatureSample curvature(const MetricField& gamma, const Vector& x) {
  return curvature(lift_metric(gamma, x, gamma.dim()));
}

Matrix covariant_derivative_1form(const Tensor3d& connection, const Vector& w, const Matrix& d_w) {
  const int n = static_cast<int>(w.size());
  Matrix out = d_w;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p) out(i, j) -= connection(p, i, j) * w(p);
  return out;
}

Tensor3d covariant_derivative_2form(const Tensor3d& connection, const Matrix& omega, const Tensor3d& d_omega) {
  const int n = static_cast<int>(omega.rows());
  Tensor3d out = d_omega;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0;
        for (int p = 0; p < n; ++p) s += connection(p, i, k) * omega(p, j) + connection(p, j, k) * omega(i, p);
        out(i, j, k) -= s;
      }
  return out;
}

Tensor3d covariant_derivative_2form(const MetricField& gamma, const MatrixField& omega, const Vector& x) {
  const int n = gamma.dim();
  if (omega.dim() != n || omega.rows() != n || omega.cols() != n)
    throw std::invalid_argument("covariant_derivative_2form: shape mismatch");
  const JetVector jets = omega.jets(x);
  Matrix value(n, n);
  Tensor3d d(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      value(i, j) = jets[i * n + j].value();
      const Vector g = jets[i * n + j].gradient(n);
      for (int k = 0; k < n; ++k) d(i, j, k) = g(k);
    }
  return covariant_derivative_2form(christoffel(gamma, x), value, d);
}

double kinetic_energy(const MetricField& gamma, const Vector& x, const Vector& v) {
  return v.dot(gamma.value(x) * v);
}

Trajectory riemann_geodesic(const MetricField& gamma, const Vector& x0, const Vector& v0, double t0, double t1,
                            int steps) {
  const int n = gamma.dim();
  auto accel = [&gamma, n](const Vector& x, const Vector& v) {
    const Tensor3d c = christoffel(gamma, x);
    Vector a = Vector::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) a(i) -= c(i, j, k) * v(j) * v(k);
    return a;
  };
  return rk4_second_order(accel, x0, v0, t0, t1, steps);
}

double second_fundamental_form_residual(const ScalarField& f, const MetricField& gamma, const Vector& x) {
  const int m = gamma.dim();
  if (f.dim() != m) throw std::invalid_argument("second_fundamental_form_residual: dimension mismatch");
  const Jetd jet = f.jet(x);
  const Vector df = jet.gradient(m);
  const Matrix g = gamma.value(x);
  const Matrix g_inv = inverse_det(g).inverse;
  const double norm2 = df.dot(g_inv * df);
  if (!(norm2 > 0)) {
    std::vector<double> p(x.data(), x.data() + x.size());
    throw DomainError("vanishing gradient: level set is not a hypersurface at " + format_point(p), p);
  }
  const double norm = std::sqrt(norm2);

  const Tensor3d c = christoffel(gamma, x);
  Matrix hess = jet.hessian(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) hess(i, j) -= c(k, i, j) * df(k);

  // Gram-Schmidt in the gamma inner product, seeded with the unit normal.
  std::vector<Vector> basis{g_inv * df / norm};
  std::vector<Vector> tangent;
  for (int e = 0; e < m && static_cast<int>(tangent.size()) < m - 1; ++e) {
    Vector t = Vector::Unit(m, e);
    for (const Vector& b : basis) t -= b.dot(g * t) * b;
    const double len = std::sqrt(t.dot(g * t));
    if (len < 1e-8) continue;
    t /= len;
    basis.push_back(t);
    tangent.push_back(t);
  }

  double worst = 0;
  for (const Vector& a : tangent)
    for (const Vector& b : tangent) worst = std::max(worst, std::abs(a.dot(hess * b)) / norm);
  return worst;
}

}  // namespace glharm
