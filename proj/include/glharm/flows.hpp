#ifndef GLHARM_FLOWS_HPP
#define GLHARM_FLOWS_HPP

#include <ostream>
#include <vector>

#include "glharm/gl_metric.hpp"
#include "glharm/ode.hpp"

namespace glharm {

/// RK4 orbit of dx/dt = xi(x).
Trajectory integrate_orbit(const VectorField& xi, const Vector& x0, double t0, double t1, int steps);

/// Closed-form curve c: R -> R^n sampled uniformly, velocities by autodiff.
Trajectory sample_curve(const VectorField& curve, double t0, double t1, int steps);

/// L(x, v) = h_ij(x, v) v^i v^j
double lagrangian(const GLMetric& h, const Vector& x, const Vector& v);

/// v^i dL/dv^i - L, conserved along Euler-Lagrange curves; equals L when L is 2-homogeneous in v.
double energy_function(const GLMetric& h, const Vector& x, const Vector& v);

/**
 * Acceleration of the Euler-Lagrange equations of L:
 *   M xdd = dL/dx - (d^2 L / dv dx) v,   M = d^2 L / dv dv.
 * Throws DegenerateMetricError when M is not positive definite.
 */
Vector gl_acceleration(const GLMetric& h, const Vector& x, const Vector& v);

/// RK4 geodesic of the generalized Lagrange space (Euler-Lagrange curve of L).
Trajectory gl_geodesic(const GLMetric& h, const Vector& x0, const Vector& v0, double t0, double t1, int steps);

/**
 * |d/dt (dL/dv) - dL/dx| at each interior sample, with the time derivative
 * taken by central differences of the stored samples.
 */
std::vector<double> el_residual(const GLMetric& h, const Trajectory& trajectory);

/// CSV with columns t, x1..xn, v1..vn, el_residual (empty at the two end samples when given).
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const std::vector<double>* residual = nullptr);

}  // namespace glharm

#endif  // GLHARM_FLOWS_HPP
