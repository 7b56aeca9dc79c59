#include "glharm/flows.hpp"

#include <Eigen/Cholesky>
#include <cstdio>
#include <stdexcept>

#include "glharm/errors.hpp"

namespace glharm {

namespace {

// L as a jet over z = (x, v).
Jetd lagrangian_jet(const GLMetric& h, const Vector& x, const Vector& v) {
  h.require_regular(x, v);
  const int n = h.dim();
  Vector z(2 * n);
  z << x, v;
  const JetVector zj = seed(z);
  const JetSpan xj(zj.data(), n);
  const JetVector g = h.gamma()(xj);
  Jetd quad(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) quad += g[i * n + j] * zj[n + i] * zj[n + j];
  return exp(h.sigma()(zj) * 2.0) * quad;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Trajectory integrate_orbit(const VectorField& xi, const Vector& x0, double t0, double t1, int steps) {
  if (xi.dim_in() != xi.dim_out() || x0.size() != xi.dim_in())
    throw std::invalid_argument("integrate_orbit: xi must be a vector field on the state space");
  return rk4_first_order([&](double, const Vector& x) { return xi.value(x); }, x0, t0, t1, steps);
}

Trajectory sample_curve(const VectorField& curve, double t0, double t1, int steps) {
  if (curve.dim_in() != 1) throw std::invalid_argument("sample_curve: curve must have one parameter");
  if (steps < 1 || !(t1 > t0)) throw std::invalid_argument("sample_curve: bad time grid");
  const double h = (t1 - t0) / steps;
  Trajectory out;
  for (int k = 0; k <= steps; ++k) {
    const Vector t = Vector::Constant(1, t0 + k * h);
    out.times.push_back(t(0));
    out.positions.push_back(curve.value(t));
    out.velocities.push_back(curve.jacobian(t).col(0));
  }
  return out;
}

double lagrangian(const GLMetric& h, const Vector& x, const Vector& v) { return lagrangian_jet(h, x, v).value(); }

double energy_function(const GLMetric& h, const Vector& x, const Vector& v) {
  const int n = h.dim();
  const Jetd l = lagrangian_jet(h, x, v);
  return v.dot(l.gradient(2 * n).tail(n)) - l.value();
}

Vector gl_acceleration(const GLMetric& h, const Vector& x, const Vector& v) {
  const int n = h.dim();
  const Jetd l = lagrangian_jet(h, x, v);
  const Vector grad = l.gradient(2 * n);
  const Matrix hess = l.hessian(2 * n);
  const Matrix mass = hess.bottomRightCorner(n, n);
  const Matrix mixed = hess.bottomLeftCorner(n, n);  // d^2 L / dv^i dx^j
  const Eigen::LLT<Matrix> llt(mass);
  if (llt.info() != Eigen::Success)
    throw DegenerateMetricError("gl_geodesic: mass matrix d^2L/dv dv is not positive definite at x=" +
                                format_point({x.data(), x.data() + n}) + " v=" + format_point({v.data(), v.data() + n}));
  return llt.solve(grad.head(n) - mixed * v);
}

Trajectory gl_geodesic(const GLMetric& h, const Vector& x0, const Vector& v0, double t0, double t1, int steps) {
  if (x0.size() != h.dim() || v0.size() != h.dim()) throw std::invalid_argument("gl_geodesic: dimension mismatch");
  return rk4_second_order([&](const Vector& x, const Vector& v) { return gl_acceleration(h, x, v); }, x0, v0, t0, t1,
                          steps);
}

std::vector<double> el_residual(const GLMetric& h, const Trajectory& trajectory) {
  const std::size_t count = trajectory.size();
  if (count < 3) throw std::invalid_argument("el_residual: need at least 3 samples");
  const int n = h.dim();
  std::vector<Vector> momentum(count), force(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Vector grad = lagrangian_jet(h, trajectory.positions[k], trajectory.velocities[k]).gradient(2 * n);
    force[k] = grad.head(n);
    momentum[k] = grad.tail(n);
  }
  const double dt = trajectory.step();
  std::vector<double> out;
  out.reserve(count - 2);
  for (std::size_t k = 1; k + 1 < count; ++k)
    out.push_back(((momentum[k + 1] - momentum[k - 1]) / (2 * dt) - force[k]).norm());
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const std::vector<double>* residual) {
  const std::size_t count = trajectory.size();
  if (residual && residual->size() + 2 != count)
    throw std::invalid_argument("write_trajectory_csv: residual length must be samples - 2");
  const Eigen::Index n = count ? trajectory.positions[0].size() : 0;
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i + 1;
  for (Eigen::Index i = 0; i < n; ++i) out << ",v" << i + 1;
  out << ",el_residual\n";
  for (std::size_t k = 0; k < count; ++k) {
    out << format_double(trajectory.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(trajectory.positions[k](i));
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(trajectory.velocities[k](i));
    out << ',';
    if (residual && k > 0 && k + 1 < count) out << format_double((*residual)[k - 1]);
    out << '\n';
  }
}

}  // namespace glharm
