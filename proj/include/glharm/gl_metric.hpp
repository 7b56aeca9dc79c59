#ifndef GLHARM_GL_METRIC_HPP
#define GLHARM_GL_METRIC_HPP

#include <functional>
#include <string>

#include "glharm/chart_calculus.hpp"
#include "glharm/riemannian.hpp"

namespace glharm {

/**
 * Conformal generalized Lagrange metric g_ij(x,y) = e^{2 sigma(x,y)} gamma_ij(x)
 * on TN, with nonlinear connection N^i_j = Gamma^i_{jk}(x) y^k.
 *
 * sigma is a field of the 2n coordinates (x, y). Points for which
 * `excluded(x, y)` holds form the singular locus; every evaluation there
 * throws SingularLocusError.
 */
class GLMetric {
 public:
  using ExcludedSet = std::function<bool(const Vector& x, const Vector& y)>;

  GLMetric(MetricField gamma, ScalarField sigma, ExcludedSet excluded = {});

  int dim() const { return gamma_.dim(); }
  const MetricField& gamma() const { return gamma_; }
  const ScalarField& sigma() const { return sigma_; }
  bool excluded(const Vector& x, const Vector& y) const;
  void require_regular(const Vector& x, const Vector& y) const;

 private:
  MetricField gamma_;
  ScalarField sigma_;
  ExcludedSet excluded_;
};

/// Coefficients of the h- and v-covariant derivatives: L^i_{jk}(x,y) and C^i_{jk}(x,y).
struct ConnectionCoefficients {
  Tensor3d horizontal;
  Tensor3d vertical;
};

/// Connection behind the |k (horizontal) and |_k (vertical) derivatives.
struct DistinguishedConnection {
  std::string name;
  std::function<ConnectionCoefficients(const GLMetric&, const Vector& x, const Vector& y)> coefficients;
};

/// Levi-Civita coefficients of gamma for |k, zero coefficients for |_k.
const DistinguishedConnection& default_connection();

/// Disclosure line emitted with every field-equation report.
std::string connection_disclosure(const DistinguishedConnection& connection);

Matrix gl_eval(const GLMetric& g, const Vector& x, const Vector& y);

/// N(i, j) = N^i_j(x, y) = Gamma^i_{jk}(x) y^k.
Matrix nonlinear_connection(const GLMetric& g, const Vector& x, const Vector& y);

/// delta field / delta x^i = d field/dx^i - N^j_i d field/dy^j for a field on (x, y).
Vector delta_x(const GLMetric& g, const ScalarField& field, const Vector& x, const Vector& y);

/// F_ij = (g_ip d_j sigma - g_jp d_i sigma) y^p with d = delta/delta x, and f_ij with d = d/dy.
struct EMTensors {
  Matrix F;
  Matrix f;
};

EMTensors em_tensors(const GLMetric& g, const Vector& x, const Vector& y);

struct SigmaDerived {
  double sigma_h = 0;    // gamma^{kl} (delta_k sigma)(delta_l sigma)
  double sigma_v = 0;    // gamma^{ab} (d_a sigma)(d_b sigma), d = d/dy
  double sigma_bar = 0;  // gamma^{ij} sigma_ij
  double sigma_dot = 0;  // gamma^{ab} sigma_dot_ab
  Matrix sigma_ij;
  Matrix sigma_dot_ab;
  Matrix t;
  /// max |t_ij - t_ji| / 2; t is computed as written, without symmetrization.
  double t_antisymmetric = 0;
};

SigmaDerived sigma_derived(const GLMetric& g, const Vector& x, const Vector& y,
                           const DistinguishedConnection& connection = default_connection());

/**
 * Left minus right side of the three Maxwell equations, indexed (i, j, k):
 *
 *   horizontal: F_{ij|k} + cyc + sum_cyc g_ip r^h_{qjk} (d sigma/dy^h) y^p y^q
 *   mixed:      F_ij|_k + cyc + (f_{ij|k} + cyc)
 *   vertical:   f_ij|_k + cyc
 *
 * These are reported, not asserted: they vanish identically only for
 * particular connection choices.
 */
struct MaxwellResiduals {
  Tensor3d horizontal;
  Tensor3d mixed;
  Tensor3d vertical;

  double max_abs() const;
};

MaxwellResiduals maxwell_residuals(const GLMetric& g, const Vector& x, const Vector& y,
                                   const DistinguishedConnection& connection = default_connection());

/// Energy-momentum components forced by the field equations with gravitational constant kappa.
struct EinsteinComponents {
  Matrix horizontal;  // (r_ij - r gamma_ij / 2 + t_ij) / kappa
  Matrix vertical;    // (2 - n)(sigma_dot_ab - sigma_dot gamma_ab) / kappa
};

EinsteinComponents einstein_components(const GLMetric& g, const Vector& x, const Vector& y, double kappa,
                                       const DistinguishedConnection& connection = default_connection());

namespace gl {

/// sigma = 0: the Riemannian metric gamma seen as a generalized Lagrange metric.
GLMetric riemannian(const MetricField& gamma);

/**
 * h_ij(x,y) = |xi|^2_psi / <xi,y>^2_psi psi_ij(x), i.e.
 * sigma = ln |xi|_psi - ln |<xi,y>_psi|.
 *
 * Excluded where |<xi,y>| <= margin |xi| |y| (margin 0 excludes only the
 * exact cone) or where xi vanishes.
 */
GLMetric orbit_metric(const VectorField& xi, const MetricField& psi, double margin = 0.0);

/// n = 1, gamma = 1, sigma = -ln|y|, i.e. h(x,y) = 1/y^2 on TR minus the zero section.
GLMetric inverse_square();

}  // namespace gl

}  // namespace glharm

#endif  // GLHARM_GL_METRIC_HPP
