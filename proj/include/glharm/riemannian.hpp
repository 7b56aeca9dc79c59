#ifndef GLHARM_RIEMANNIAN_HPP
#define GLHARM_RIEMANNIAN_HPP

#include "glharm/chart_calculus.hpp"
#include "glharm/ode.hpp"
#include "glharm/tensor.hpp"

namespace glharm {

/**
 * Metric data at a point as first-order duals.
 *
 * The duals differentiate with respect to `total_dim` variables, the first
 * `dim` of which are the chart coordinates x; any further variables (fibre
 * coordinates y on TN) have zero derivative here. Index layout: metric and
 * inverse are row-major dim x dim, christoffel(i, j, k) is Gamma^i_{jk}.
 */
struct LiftedMetric {
  int dim = 0;
  std::vector<Duald> metric;
  std::vector<Duald> inverse;
  Tensor3<Duald> christoffel;

  const Duald& g(int i, int j) const { return metric[i * dim + j]; }
  const Duald& g_inv(int i, int j) const { return inverse[i * dim + j]; }
};

LiftedMetric lift_metric(const MetricField& gamma, const Vector& x, int total_dim);

/// Gamma^i_{jk} of the Levi-Civita connection; exactly symmetric in (j, k).
Tensor3d christoffel(const MetricField& gamma, const Vector& x);

/**
 * Curvature of gamma at a point.
 *
 * riemann(i, j, k, l) = r^i_{jkl}
 *   = d_l Gamma^i_{jk} - d_k Gamma^i_{jl} + Gamma^p_{jk} Gamma^i_{pl} - Gamma^p_{jl} Gamma^i_{pk},
 * ricci(i, j) = r^k_{ijk}, scalar = gamma^{ij} r_ij. With this convention the
 * round unit sphere has ricci = gamma and scalar = 2.
 */
struct CurvatureSample {
  Tensor4d riemann;
  Matrix ricci;
  double scalar = 0;
};

CurvatureSample curvature(const MetricField& gamma, const Vector& x);
CurvatureSample curvature(const LiftedMetric& lifted);

/// w_{i|j} = dw_i/dx^j - L^p_{ij} w_p, where d_w(i, j) is the supplied derivative.
Matrix covariant_derivative_1form(const Tensor3d& connection, const Vector& w, const Matrix& d_w);

/**
 * omega_{ij|k} = D omega_ij / Dx^k - L^p_{ik} omega_pj - L^p_{jk} omega_ip.
 *
 * `d_omega(i, j, k)` is the caller's derivative operator applied to omega_ij
 * (plain partials for x-only tensors, delta/delta x on TN), and `connection`
 * holds the coefficients L^p_{ik}.
 */
Tensor3d covariant_derivative_2form(const Tensor3d& connection, const Matrix& omega, const Tensor3d& d_omega);

/// Levi-Civita covariant derivative of an x-only 2-tensor field.
Tensor3d covariant_derivative_2form(const MetricField& gamma, const MatrixField& omega, const Vector& x);

double kinetic_energy(const MetricField& gamma, const Vector& x, const Vector& v);

/// RK4 solution of x'' + Gamma(x', x') = 0.
Trajectory riemann_geodesic(const MetricField& gamma, const Vector& x0, const Vector& v0, double t0, double t1,
                            int steps);

/**
 * Largest |II(t_a, t_b)| over a gamma-orthonormal basis of the level set of f through x.
 *
 * II = Hess^gamma f / |grad f|_gamma. Zero iff the level hypersurface is
 * totally geodesic at x. Throws DomainError when grad f vanishes.
 */
double second_fundamental_form_residual(const ScalarField& f, const MetricField& gamma, const Vector& x);

}  // namespace glharm

#endif  // GLHARM_RIEMANNIAN_HPP
