#include "glharm/gl_metric.hpp"

#include <stdexcept>

namespace glharm {

namespace {

std::vector<double> to_std(const Vector& x, const Vector& y) {
  std::vector<double> p(x.data(), x.data() + x.size());
  p.insert(p.end(), y.data(), y.data() + y.size());
  return p;
}

Vector concat(const Vector& x, const Vector& y) {
  Vector z(x.size() + y.size());
  z << x, y;
  return z;
}

// Everything needed for the field equations at one point of TN, as first-order
// duals in the 2n variables z = (x, y).
struct TangentLift {
  int n = 0;
  LiftedMetric gamma;
  std::vector<Duald> y;
  Duald sigma;
  std::vector<Duald> sigma_x;  // d sigma / dx^i
  std::vector<Duald> sigma_y;  // d sigma / dy^i
  Matrix N;                    // N(i, j) = N^i_j
  std::vector<Duald> delta_sigma;
  Duald conformal;  // e^{2 sigma}

  // delta q / delta x^k
  double d_h(const Duald& q, int k) const {
    double s = q.derivative(k);
    for (int m = 0; m < n; ++m) s -= N(m, k) * q.derivative(n + m);
    return s;
  }
  // d q / dy^k
  double d_v(const Duald& q, int k) const { return q.derivative(n + k); }

  Vector values(const std::vector<Duald>& v) const {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i].value();
    return out;
  }
  Matrix gamma_value() const {
    Matrix out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) = gamma.g(i, j).value();
    return out;
  }
  Matrix gamma_inverse() const {
    Matrix out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) = gamma.g_inv(i, j).value();
    return out;
  }
};

TangentLift lift(const GLMetric& g, const Vector& x, const Vector& y) {
  const int n = g.dim();
  if (x.size() != n || y.size() != n) throw std::invalid_argument("GLMetric: coordinate dimension mismatch");
  g.require_regular(x, y);

  TangentLift t;
  t.n = n;
  t.gamma = lift_metric(g.gamma(), x, 2 * n);
  for (int k = 0; k < n; ++k) t.y.push_back(Duald::variable(y(k), n + k, 2 * n));

  const Jetd s = g.sigma().jet(concat(x, y));
  const Vector sg = s.gradient(2 * n);
  const Matrix sh = s.hessian(2 * n);
  t.sigma = Duald(s.value(), sg);
  for (int i = 0; i < n; ++i) {
    t.sigma_x.emplace_back(sg(i), sh.row(i).transpose());
    t.sigma_y.emplace_back(sg(n + i), sh.row(n + i).transpose());
  }

  std::vector<Duald> N(n * n);
  t.N = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Duald s_ij(0.0);
      for (int k = 0; k < n; ++k) s_ij += t.gamma.christoffel(i, j, k) * t.y[k];
      N[i * n + j] = s_ij;
      t.N(i, j) = s_ij.value();
    }
  for (int i = 0; i < n; ++i) {
    Duald d = t.sigma_x[i];
    for (int j = 0; j < n; ++j) d -= N[j * n + i] * t.sigma_y[j];
    t.delta_sigma.push_back(std::move(d));
  }
  t.conformal = exp(2.0 * t.sigma);
  return t;
}

// (c_ip y^p w_j - c_jp y^p w_i) e^{2 sigma}, built skew: only i < j is computed.
std::vector<Duald> skew_tensor(const TangentLift& t, const std::vector<Duald>& w) {
  const int n = t.n;
  std::vector<Duald> u(n);
  for (int i = 0; i < n; ++i) {
    Duald s(0.0);
    for (int p = 0; p < n; ++p) s += t.gamma.g(i, p) * t.y[p];
    u[i] = s;
  }
  std::vector<Duald> out(n * n, Duald(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Duald v = t.conformal * (u[i] * w[j] - u[j] * w[i]);
      out[i * n + j] = v;
      out[j * n + i] = -v;
    }
  return out;
}

struct SkewData {
  Matrix value;
  Tensor3d d_h;  // delta/delta x^k of entry (i, j)
  Tensor3d d_v;  // d/dy^k of entry (i, j)
};

SkewData differentiate(const TangentLift& t, const std::vector<Duald>& m) {
  const int n = t.n;
  SkewData out{Matrix(n, n), Tensor3d(n), Tensor3d(n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Duald& e = m[i * n + j];
      out.value(i, j) = e.value();
      for (int k = 0; k < n; ++k) {
        out.d_h(i, j, k) = t.d_h(e, k);
        out.d_v(i, j, k) = t.d_v(e, k);
      }
    }
  return out;
}

Tensor3d cyclic_sum(const Tensor3d& a) {
  const int n = a.extent(0);
  Tensor3d out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out(i, j, k) = a(i, j, k) + a(j, k, i) + a(k, i, j);
  return out;
}

Tensor3d add(const Tensor3d& a, const Tensor3d& b) {
  Tensor3d out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

ConnectionCoefficients coefficients_checked(const DistinguishedConnection& c, const GLMetric& g, const Vector& x,
                                            const Vector& y) {
  ConnectionCoefficients cc = c.coefficients(g, x, y);
  const int n = g.dim();
  if (cc.horizontal.extents() != std::array<int, 3>{n, n, n} || cc.vertical.extents() != std::array<int, 3>{n, n, n})
    throw std::logic_error("connection '" + c.name + "' returned coefficients of the wrong shape");
  return cc;
}

}  // namespace

GLMetric::GLMetric(MetricField gamma, ScalarField sigma, ExcludedSet excluded)
    : gamma_(std::move(gamma)), sigma_(std::move(sigma)), excluded_(std::move(excluded)) {
  if (sigma_.dim() != 2 * gamma_.dim())
    throw std::invalid_argument("GLMetric: sigma must be a field of the 2n coordinates (x, y)");
}

bool GLMetric::excluded(const Vector& x, const Vector& y) const { return excluded_ && excluded_(x, y); }

void GLMetric::require_regular(const Vector& x, const Vector& y) const {
  if (excluded(x, y)) throw SingularLocusError("point " + format_point(to_std(x, y)) + " lies on the singular locus");
}

const DistinguishedConnection& default_connection() {
  static const DistinguishedConnection c{
      "h-part: Levi-Civita Christoffel symbols of gamma with delta/delta x = d/dx - N d/dy; "
      "v-part: plain d/dy with zero vertical coefficients",
      [](const GLMetric& g, const Vector& x, const Vector&) {
        const int n = g.dim();
        return ConnectionCoefficients{christoffel(g.gamma(), x), Tensor3d(n)};
      }};
  return c;
}

std::string connection_disclosure(const DistinguishedConnection& connection) {
  return "covariant derivatives |k and |_k use the connection [" + connection.name +
         "]; Riemann convention r^i_{jkl} = d_l Gamma^i_{jk} - d_k Gamma^i_{jl} + Gamma^p_{jk} Gamma^i_{pl} - "
         "Gamma^p_{jl} Gamma^i_{pk}, r_ij = r^k_{ijk}";
}

Matrix gl_eval(const GLMetric& g, const Vector& x, const Vector& y) {
  g.require_regular(x, y);
  const double s = g.sigma().value(concat(x, y));
  return std::exp(2 * s) * g.gamma().value(x);
}

Matrix nonlinear_connection(const GLMetric& g, const Vector& x, const Vector& y) {
  const Tensor3d c = christoffel(g.gamma(), x);
  const int n = g.dim();
  Matrix N = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) N(i, j) += c(i, j, k) * y(k);
  return N;
}

Vector delta_x(const GLMetric& g, const ScalarField& field, const Vector& x, const Vector& y) {
  const int n = g.dim();
  if (field.dim() != 2 * n) throw std::invalid_argument("delta_x: field must live on (x, y)");
  const Vector d = field.jet(concat(x, y)).gradient(2 * n);
  const Matrix N = nonlinear_connection(g, x, y);
  Vector out(n);
  for (int i = 0; i < n; ++i) {
    out(i) = d(i);
    for (int j = 0; j < n; ++j) out(i) -= N(j, i) * d(n + j);
  }
  return out;
}

EMTensors em_tensors(const GLMetric& g, const Vector& x, const Vector& y) {
  const TangentLift t = lift(g, x, y);
  return {differentiate(t, skew_tensor(t, t.delta_sigma)).value, differentiate(t, skew_tensor(t, t.sigma_y)).value};
}

SigmaDerived sigma_derived(const GLMetric& g, const Vector& x, const Vector& y,
                           const DistinguishedConnection& connection) {
  const TangentLift t = lift(g, x, y);
  const ConnectionCoefficients cc = coefficients_checked(connection, g, x, y);
  const int n = t.n;
  const Matrix gam = t.gamma_value();
  const Matrix gam_inv = t.gamma_inverse();
  const Vector D = t.values(t.delta_sigma);
  const Vector P = t.values(t.sigma_y);

  Matrix dD(n, n), dP(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      dD(i, j) = t.d_h(t.delta_sigma[i], j);
      dP(i, j) = t.d_v(t.sigma_y[i], j);
    }

  SigmaDerived out;
  out.sigma_h = D.dot(gam_inv * D);
  out.sigma_v = P.dot(gam_inv * P);
  out.sigma_ij = covariant_derivative_1form(cc.horizontal, D, dD) + D * D.transpose() - 0.5 * out.sigma_h * gam;
  out.sigma_dot_ab = covariant_derivative_1form(cc.vertical, P, dP) + P * P.transpose() - 0.5 * out.sigma_v * gam;
  out.sigma_bar = (gam_inv.cwiseProduct(out.sigma_ij)).sum();
  out.sigma_dot = (gam_inv.cwiseProduct(out.sigma_dot_ab)).sum();

  const CurvatureSample curv = curvature(t.gamma);
  const Tensor4d& r = curv.riemann;
  const Vector yv = t.values(t.y);
  const Vector raised_p = gam_inv * P;  // gamma^{tp} d_p sigma
  const double ricci_term = yv.dot(curv.ricci * raised_p);

  // c1(j) = r^a_{tja} y^t, c2(s, j) = r^s_{tja} y^t gamma^{ap} d_p sigma
  Vector c1 = Vector::Zero(n);
  Matrix c2 = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int tt = 0; tt < n; ++tt)
      for (int a = 0; a < n; ++a) {
        c1(j) += r(a, tt, j, a) * yv(tt);
        for (int s = 0; s < n; ++s) c2(s, j) += r(s, tt, j, a) * yv(tt) * raised_p(a);
      }

  out.t = (n - 2) * (gam * out.sigma_bar - out.sigma_ij) + ricci_term * gam + P * c1.transpose() - gam * c2;
  out.t_antisymmetric = 0.5 * max_abs(Matrix(out.t - out.t.transpose()));
  return out;
}

double MaxwellResiduals::max_abs() const {
  return std::max({glharm::max_abs(horizontal), glharm::max_abs(mixed), glharm::max_abs(vertical)});
}

MaxwellResiduals maxwell_residuals(const GLMetric& g, const Vector& x, const Vector& y,
                                   const DistinguishedConnection& connection) {
  const TangentLift t = lift(g, x, y);
  const ConnectionCoefficients cc = coefficients_checked(connection, g, x, y);
  const int n = t.n;
  const SkewData F = differentiate(t, skew_tensor(t, t.delta_sigma));
  const SkewData f = differentiate(t, skew_tensor(t, t.sigma_y));

  const Tensor3d F_h = covariant_derivative_2form(cc.horizontal, F.value, F.d_h);
  const Tensor3d F_v = covariant_derivative_2form(cc.vertical, F.value, F.d_v);
  const Tensor3d f_h = covariant_derivative_2form(cc.horizontal, f.value, f.d_h);
  const Tensor3d f_v = covariant_derivative_2form(cc.vertical, f.value, f.d_v);

  // W(i, j, k) = g_ip y^p r^h_{qjk} (d sigma/dy^h) y^q
  const Tensor4d r = curvature(t.gamma).riemann;
  const Vector yv = t.values(t.y);
  const Vector P = t.values(t.sigma_y);
  const Vector gy = t.conformal.value() * (t.gamma_value() * yv);
  Tensor3d W(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double z = 0;
      for (int h = 0; h < n; ++h)
        for (int q = 0; q < n; ++q) z += r(h, q, j, k) * P(h) * yv(q);
      for (int i = 0; i < n; ++i) W(i, j, k) = gy(i) * z;
    }

  MaxwellResiduals out;
  out.horizontal = add(cyclic_sum(F_h), cyclic_sum(W));
  out.mixed = add(cyclic_sum(F_v), cyclic_sum(f_h));
  out.vertical = cyclic_sum(f_v);
  return out;
}

EinsteinComponents einstein_components(const GLMetric& g, const Vector& x, const Vector& y, double kappa,
                                       const DistinguishedConnection& connection) {
  if (kappa == 0.0) throw std::invalid_argument("einstein_components: gravitational constant must be nonzero");
  const SigmaDerived s = sigma_derived(g, x, y, connection);
  const CurvatureSample c = curvature(g.gamma(), x);
  const Matrix gam = g.gamma().value(x);
  const int n = g.dim();
  return {(c.ricci - 0.5 * c.scalar * gam + s.t) / kappa,
          (2.0 - n) * (s.sigma_dot_ab - s.sigma_dot * gam) / kappa};
}

namespace gl {

GLMetric riemannian(const MetricField& gamma) {
  return GLMetric(gamma, fields::constant(2 * gamma.dim(), 0.0));
}

GLMetric orbit_metric(const VectorField& xi, const MetricField& psi, double margin) {
  const int n = psi.dim();
  if (xi.dim_in() != n || xi.dim_out() != n) throw std::invalid_argument("orbit_metric: xi must be a vector field on N");
  ScalarField sigma(2 * n, [xi, psi, n](JetSpan z) {
    const JetSpan x = z.first(n), y = z.subspan(n, n);
    const JetVector v = xi(x);
    const JetVector p = psi(x);
    Jetd norm2(0.0), inner(0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        norm2 += p[i * n + j] * v[i] * v[j];
        inner += p[i * n + j] * v[i] * y[j];
      }
    return 0.5 * log(norm2) - log(abs(inner));
  });
  auto excluded = [xi, psi, margin](const Vector& x, const Vector& y) {
    const Vector v = xi.value(x);
    const Matrix p = psi.value(x);
    const double nv = std::sqrt(v.dot(p * v));
    const double ny = std::sqrt(y.dot(p * y));
    return nv == 0.0 || std::abs(v.dot(p * y)) <= margin * nv * ny;
  };
  return GLMetric(psi, std::move(sigma), std::move(excluded));
}

GLMetric inverse_square() {
  ScalarField sigma(2, [](JetSpan z) { return -log(abs(z[1])); });
  return GLMetric(fields::identity_metric(1), std::move(sigma),
                  [](const Vector&, const Vector& y) { return y(0) == 0.0; });
}

}  // namespace gl

}  // namespace glharm
