#include "glharm/chart_calculus.hpp"

#include <cstdio>
#include <stdexcept>
#include <utility>

namespace glharm {

std::string format_point(const std::vector<double>& p) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", p[i]);
    s += (i ? ", " : "");
    s += buf;
  }
  return s + ")";
}

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// Re-raises a coordinate-free DomainError with the evaluation point attached.
template <typename F>
auto at_point(const Vector& at, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError& e) {
    if (!e.coordinate().empty()) throw;
    throw DomainError(std::string(e.what()) + " at " + format_point(to_std(at)), to_std(at));
  }
}

void check_dim(int expected, std::size_t got, const char* who) {
  if (static_cast<std::size_t>(expected) != got)
    throw std::invalid_argument(std::string(who) + ": coordinate dimension mismatch");
}

}  // namespace

JetVector seed(const Vector& at) {
  JetVector out;
  out.reserve(at.size());
  for (Eigen::Index i = 0; i < at.size(); ++i) out.push_back(Jetd::variable(at(i), i, at.size()));
  return out;
}

JetVector constants(const Vector& at) { return JetVector(at.data(), at.data() + at.size()); }

ScalarField::ScalarField(int dim, Function fn) : dim_(dim), fn_(std::move(fn)) {
  if (dim <= 0) throw std::invalid_argument("ScalarField: dimension must be positive");
}

Jetd ScalarField::operator()(JetSpan at) const {
  check_dim(dim_, at.size(), "ScalarField");
  return fn_(at);
}

double ScalarField::value(const Vector& at) const {
  const JetVector c = constants(at);
  return at_point(at, [&] { return (*this)(c).value(); });
}

Jetd ScalarField::jet(const Vector& at) const {
  const JetVector s = seed(at);
  return at_point(at, [&] { return (*this)(s); });
}

VectorField::VectorField(int dim_in, int dim_out, Function fn)
    : dim_in_(dim_in), dim_out_(dim_out), fn_(std::move(fn)) {
  if (dim_in <= 0 || dim_out <= 0) throw std::invalid_argument("VectorField: dimensions must be positive");
}

JetVector VectorField::operator()(JetSpan at) const {
  check_dim(dim_in_, at.size(), "VectorField");
  JetVector out = fn_(at);
  if (out.size() != static_cast<std::size_t>(dim_out_))
    throw std::logic_error("VectorField: closure returned wrong number of components");
  return out;
}

Vector VectorField::value(const Vector& at) const {
  const JetVector c = constants(at);
  const JetVector out = at_point(at, [&] { return (*this)(c); });
  Vector v(dim_out_);
  for (int i = 0; i < dim_out_; ++i) v(i) = out[i].value();
  return v;
}

JetVector VectorField::jets(const Vector& at) const {
  const JetVector s = seed(at);
  return at_point(at, [&] { return (*this)(s); });
}

Matrix VectorField::jacobian(const Vector& at) const {
  const JetVector out = jets(at);
  Matrix j(dim_out_, dim_in_);
  for (int i = 0; i < dim_out_; ++i) j.row(i) = out[i].gradient(dim_in_).transpose();
  return j;
}

MatrixField::MatrixField(int dim, int rows, int cols, Function fn)
    : dim_(dim), rows_(rows), cols_(cols), fn_(std::move(fn)) {
  if (dim <= 0 || rows <= 0 || cols <= 0) throw std::invalid_argument("MatrixField: dimensions must be positive");
}

JetVector MatrixField::operator()(JetSpan at) const {
  check_dim(dim_, at.size(), "MatrixField");
  JetVector out = fn_(at);
  if (out.size() != static_cast<std::size_t>(rows_ * cols_))
    throw std::logic_error("MatrixField: closure returned wrong number of entries");
  return out;
}

Matrix MatrixField::value(const Vector& at) const {
  const JetVector c = constants(at);
  const JetVector out = at_point(at, [&] { return (*this)(c); });
  Matrix m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = out[i * cols_ + j].value();
  return m;
}

JetVector MatrixField::jets(const Vector& at) const {
  const JetVector s = seed(at);
  return at_point(at, [&] { return (*this)(s); });
}

MetricField::MetricField(int dim, MatrixField::Function fn) : components_(dim, dim, dim, std::move(fn)) {}

Vector grad(const ScalarField& field, const Vector& at) { return field.jet(at).gradient(at.size()); }

Matrix hessian(const ScalarField& field, const Vector& at) { return field.jet(at).hessian(at.size()); }

InverseDet inverse_det(const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() == 0) throw DegenerateMetricError("metric must be a non-empty square matrix");
  if (!g.allFinite()) throw DegenerateMetricError("metric has non-finite entries");
  const double scale = g.cwiseAbs().maxCoeff();
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DegenerateMetricError("metric is not symmetric");
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw DegenerateMetricError("metric is not positive definite");
  const Matrix l = llt.matrixL();
  const double sqrt_det = l.diagonal().prod();
  if (!(sqrt_det > 0)) throw DegenerateMetricError("metric determinant is not positive");
  Matrix inv = llt.solve(Matrix::Identity(g.rows(), g.cols()));
  inv = 0.5 * (inv + inv.transpose()).eval();
  return {std::move(inv), sqrt_det * sqrt_det};
}

InverseDet metric_inverse_det(const MetricField& g, const Vector& at) {
  try {
    return inverse_det(g.value(at));
  } catch (const DegenerateMetricError& e) {
    throw DegenerateMetricError(std::string(e.what()) + " at " + format_point(to_std(at)));
  }
}

namespace fields {

ScalarField constant(int dim, double c) {
  return ScalarField(dim, [c](JetSpan) { return Jetd(c); });
}

ScalarField coordinate(int dim, int index) {
  if (index < 0 || index >= dim) throw std::out_of_range("coordinate index");
  return ScalarField(dim, [index](JetSpan a) { return a[index]; });
}

ScalarField affine(const Vector& v, double w) {
  return ScalarField(static_cast<int>(v.size()), [v, w](JetSpan a) {
    Jetd s(w);
    for (Eigen::Index i = 0; i < v.size(); ++i) s += v(i) * a[i];
    return s;
  });
}

ScalarField exp_affine(const Vector& v, double w) {
  const ScalarField inner = affine(v, w);
  return ScalarField(inner.dim(), [inner](JetSpan a) { return exp(inner(a)); });
}

ScalarField squared_norm(int dim) {
  return ScalarField(dim, [](JetSpan a) {
    Jetd s(0.0);
    for (const Jetd& ai : a) s += ai * ai;
    return s;
  });
}

VectorField constant_vector(int dim_in, const Vector& v) {
  return VectorField(dim_in, static_cast<int>(v.size()), [v](JetSpan) {
    return JetVector(v.data(), v.data() + v.size());
  });
}

VectorField affine_vector(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw std::invalid_argument("affine_vector: shape mismatch");
  return VectorField(static_cast<int>(a.cols()), static_cast<int>(a.rows()), [a, b](JetSpan x) {
    JetVector out;
    out.reserve(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      Jetd s(b(i));
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        if (a(i, j) != 0) s += a(i, j) * x[j];
      out.push_back(std::move(s));
    }
    return out;
  });
}

VectorField rotation() {
  return VectorField(2, 2, [](JetSpan x) { return JetVector{-x[1], x[0]}; });
}

VectorField stack(int dim_in, std::vector<ScalarField> components) {
  const int n = static_cast<int>(components.size());
  for (const auto& c : components)
    if (c.dim() != dim_in) throw std::invalid_argument("stack: component dimension mismatch");
  return VectorField(dim_in, n, [components = std::move(components)](JetSpan x) {
    JetVector out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(c(x));
    return out;
  });
}

MetricField identity_metric(int dim) { return constant_metric(Matrix::Identity(dim, dim)); }

MetricField constant_metric(const Matrix& g) {
  const int n = static_cast<int>(g.rows());
  return MetricField(n, [g, n](JetSpan) {
    JetVector out;
    out.reserve(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.emplace_back(g(i, j));
    return out;
  });
}

MetricField diagonal_metric(int dim, std::vector<ScalarField> entries) {
  if (static_cast<int>(entries.size()) != dim) throw std::invalid_argument("diagonal_metric: need one entry per axis");
  return MetricField(dim, [dim, entries = std::move(entries)](JetSpan x) {
    JetVector out(dim * dim, Jetd(0.0));
    for (int i = 0; i < dim; ++i) out[i * dim + i] = entries[i](x);
    return out;
  });
}

MetricField unit_sphere() {
  return diagonal_metric(2, {constant(2, 1.0), ScalarField(2, [](JetSpan x) { return square(sin(x[0])); })});
}

MetricField conformal_metric(const ScalarField& u) {
  const int n = u.dim();
  return MetricField(n, [u, n](JetSpan x) {
    const Jetd factor = exp(2.0 * u(x));
    JetVector out(n * n, Jetd(0.0));
    for (int i = 0; i < n; ++i) out[i * n + i] = factor;
    return out;
  });
}

}  // namespace fields

}  // namespace glharm
