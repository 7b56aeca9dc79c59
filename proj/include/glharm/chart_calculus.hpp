#ifndef GLHARM_CHART_CALCULUS_HPP
#define GLHARM_CHART_CALCULUS_HPP

#include <functional>
#include <span>
#include <vector>

#include "glharm/jet.hpp"
#include "glharm/tensor.hpp"

namespace glharm {

using JetVector = std::vector<Jetd>;
using JetSpan = std::span<const Jetd>;

/// Jets for the coordinates `at`, seeded as independent variables.
JetVector seed(const Vector& at);
/// Jets for the coordinates `at` carrying no derivative information.
JetVector constants(const Vector& at);

/**
 * Smooth real function of chart coordinates.
 *
 * The function is a closure over jets, so composing fields is ordinary
 * function composition and every field is differentiable twice by
 * construction.
 */
class ScalarField {
 public:
  using Function = std::function<Jetd(JetSpan)>;

  ScalarField(int dim, Function fn);

  int dim() const { return dim_; }
  Jetd operator()(JetSpan at) const;
  double value(const Vector& at) const;
  /// Value, gradient and Hessian at `at`.
  Jetd jet(const Vector& at) const;

 private:
  int dim_;
  Function fn_;
};

/// Smooth map R^dim_in -> R^dim_out.
class VectorField {
 public:
  using Function = std::function<JetVector(JetSpan)>;

  VectorField(int dim_in, int dim_out, Function fn);

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  JetVector operator()(JetSpan at) const;
  Vector value(const Vector& at) const;
  /// dim_out x dim_in matrix of first partials.
  Matrix jacobian(const Vector& at) const;
  JetVector jets(const Vector& at) const;

 private:
  int dim_in_, dim_out_;
  Function fn_;
};

/// Matrix-valued field; the closure returns entries in row-major order.
class MatrixField {
 public:
  using Function = std::function<JetVector(JetSpan)>;

  MatrixField(int dim, int rows, int cols, Function fn);

  int dim() const { return dim_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  JetVector operator()(JetSpan at) const;
  Matrix value(const Vector& at) const;
  JetVector jets(const Vector& at) const;

 private:
  int dim_, rows_, cols_;
  Function fn_;
};

/// Symmetric positive definite 2-tensor field (a Riemannian metric in a chart).
class MetricField {
 public:
  MetricField(int dim, MatrixField::Function fn);

  int dim() const { return components_.dim(); }
  JetVector operator()(JetSpan at) const { return components_(at); }
  Matrix value(const Vector& at) const { return components_.value(at); }
  JetVector jets(const Vector& at) const { return components_.jets(at); }
  const MatrixField& components() const { return components_; }

 private:
  MatrixField components_;
};

Vector grad(const ScalarField& field, const Vector& at);
Matrix hessian(const ScalarField& field, const Vector& at);

struct InverseDet {
  Matrix inverse;
  double det;
};

/// Inverse and determinant via Cholesky; failure means not positive definite.
InverseDet inverse_det(const Matrix& g);
InverseDet metric_inverse_det(const MetricField& g, const Vector& at);

/// Small catalog of fields used by tests and scenarios.
namespace fields {

ScalarField constant(int dim, double c);
ScalarField coordinate(int dim, int index);
/// a -> <v,a> + w
ScalarField affine(const Vector& v, double w);
/// a -> exp(<v,a> + w)
ScalarField exp_affine(const Vector& v, double w);
/// a -> |a|^2
ScalarField squared_norm(int dim);

VectorField constant_vector(int dim_in, const Vector& v);
/// x -> A x + b
VectorField affine_vector(const Matrix& a, const Vector& b);
/// (x1, x2) -> (-x2, x1)
VectorField rotation();
/// Coordinate-wise scalar fields stacked into a vector field.
VectorField stack(int dim_in, std::vector<ScalarField> components);

MetricField identity_metric(int dim);
MetricField constant_metric(const Matrix& g);
/// diag(entries[0](x), entries[1](x), ...)
MetricField diagonal_metric(int dim, std::vector<ScalarField> entries);
/// Round unit sphere diag(1, sin^2 theta) in (theta, phi) coordinates.
MetricField unit_sphere();
/// e^{2u(x)} times the identity.
MetricField conformal_metric(const ScalarField& u);

}  // namespace fields

}  // namespace glharm

#endif  // GLHARM_CHART_CALCULUS_HPP
