#ifndef GLHARM_JET_HPP
#define GLHARM_JET_HPP

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "glharm/errors.hpp"

namespace glharm {

/**
 * Truncated second-order Taylor number over a runtime number of variables.
 *
 * Stores the value, the gradient and the Hessian of a quantity with respect
 * to `dim()` independent variables. Every operation propagates the Hessian
 * with symmetric update formulas, so the stored Hessian is bit-for-bit
 * symmetric whenever the seeds are.
 *
 * A Jet with `dim() == 0` is a constant; it can be mixed freely with jets of
 * any dimension.
 */
template <typename Scalar>
class Jet {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Jet() : value_(0) {}
  Jet(Scalar value) : value_(value) {}  // NOLINT: implicit constants are the point
  Jet(Scalar value, Vector gradient, Matrix hessian)
      : value_(value), gradient_(std::move(gradient)), hessian_(std::move(hessian)) {
    if (hessian_.rows() != gradient_.size() || hessian_.cols() != gradient_.size())
      throw std::invalid_argument("Jet: gradient/hessian size mismatch");
  }

  /// Independent variable number `index` out of `dim`.
  static Jet variable(Scalar value, Eigen::Index index, Eigen::Index dim) {
    Vector g = Vector::Zero(dim);
    g(index) = Scalar(1);
    return Jet(value, std::move(g), Matrix::Zero(dim, dim));
  }

  Scalar value() const { return value_; }
  Eigen::Index dim() const { return gradient_.size(); }
  bool is_constant() const { return gradient_.size() == 0; }

  /// Gradient padded with zeros when the jet is a constant.
  Vector gradient(Eigen::Index dim) const {
    return is_constant() ? Vector::Zero(dim) : gradient_;
  }
  Matrix hessian(Eigen::Index dim) const {
    return is_constant() ? Matrix::Zero(dim, dim) : hessian_;
  }
  const Vector& gradient() const { return gradient_; }
  const Matrix& hessian() const { return hessian_; }

  /// Applies a scalar function with derivatives (d0, d1, d2) at value().
  Jet chain(Scalar d0, Scalar d1, Scalar d2) const {
    if (!std::isfinite(d0) || (!is_constant() && (!std::isfinite(d1) || !std::isfinite(d2))))
      throw DomainError("non-finite derivative at value " + std::to_string(double(value_)));
    if (is_constant()) return Jet(d0);
    // Eigen would fold d2 into one factor of the outer product, breaking symmetry.
    const Matrix outer = gradient_ * gradient_.transpose();
    Matrix h = d1 * hessian_ + d2 * outer;
    return Jet(d0, d1 * gradient_, std::move(h));
  }

  Jet operator-() const {
    if (is_constant()) return Jet(-value_);
    return Jet(-value_, -gradient_, -hessian_);
  }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(const Jet& a, const Jet& b) {
    if (b.is_constant()) return a.shifted(b.value_);
    if (a.is_constant()) return b.shifted(a.value_);
    check_dims(a, b);
    return Jet(a.value_ + b.value_, a.gradient_ + b.gradient_, a.hessian_ + b.hessian_);
  }
  friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (b.is_constant()) return a.scaled(b.value_);
    if (a.is_constant()) return b.scaled(a.value_);
    check_dims(a, b);
    Matrix outer = a.gradient_ * b.gradient_.transpose();
    // (outer + outer^T) is formed first so that h(i,j) and h(j,i) round identically.
    Matrix h = (a.value_ * b.hessian_ + b.value_ * a.hessian_) + (outer + outer.transpose());
    return Jet(a.value_ * b.value_, a.value_ * b.gradient_ + b.value_ * a.gradient_, std::move(h));
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

  friend Jet reciprocal(const Jet& b) {
    const Scalar v = b.value_;
    if (v == Scalar(0)) throw DomainError("division by zero");
    return b.chain(Scalar(1) / v, -Scalar(1) / (v * v), Scalar(2) / (v * v * v));
  }

 private:
  static void check_dims(const Jet& a, const Jet& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("Jet: mixing jets of different dimension");
  }
  Jet shifted(Scalar c) const {
    Jet r = *this;
    r.value_ += c;
    return r;
  }
  Jet scaled(Scalar c) const {
    if (is_constant()) return Jet(value_ * c);
    return Jet(value_ * c, c * gradient_, c * hessian_);
  }

  Scalar value_;
  Vector gradient_;
  Matrix hessian_;
};

/// First-order dual number over a runtime number of variables.
template <typename Scalar>
class Dual {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Dual() : value_(0) {}
  Dual(Scalar value) : value_(value) {}  // NOLINT
  Dual(Scalar value, Vector gradient) : value_(value), gradient_(std::move(gradient)) {}

  static Dual variable(Scalar value, Eigen::Index index, Eigen::Index dim) {
    Vector g = Vector::Zero(dim);
    g(index) = Scalar(1);
    return Dual(value, std::move(g));
  }

  Scalar value() const { return value_; }
  Eigen::Index dim() const { return gradient_.size(); }
  bool is_constant() const { return gradient_.size() == 0; }
  Vector gradient(Eigen::Index dim) const { return is_constant() ? Vector::Zero(dim) : gradient_; }
  const Vector& gradient() const { return gradient_; }
  Scalar derivative(Eigen::Index i) const { return is_constant() ? Scalar(0) : gradient_(i); }

  Dual chain(Scalar d0, Scalar d1, Scalar /*d2*/) const {
    if (!std::isfinite(d0) || (!is_constant() && !std::isfinite(d1)))
      throw DomainError("non-finite derivative at value " + std::to_string(double(value_)));
    if (is_constant()) return Dual(d0);
    return Dual(d0, d1 * gradient_);
  }

  Dual operator-() const { return is_constant() ? Dual(-value_) : Dual(-value_, -gradient_); }
  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator+(const Dual& a, const Dual& b) {
    if (b.is_constant()) return Dual(a.value_ + b.value_, a.gradient_);
    if (a.is_constant()) return Dual(a.value_ + b.value_, b.gradient_);
    check_dims(a, b);
    return Dual(a.value_ + b.value_, a.gradient_ + b.gradient_);
  }
  friend Dual operator-(const Dual& a, const Dual& b) { return a + (-b); }
  friend Dual operator*(const Dual& a, const Dual& b) {
    if (b.is_constant()) return a.is_constant() ? Dual(a.value_ * b.value_) : Dual(a.value_ * b.value_, b.value_ * a.gradient_);
    if (a.is_constant()) return Dual(a.value_ * b.value_, a.value_ * b.gradient_);
    check_dims(a, b);
    return Dual(a.value_ * b.value_, a.value_ * b.gradient_ + b.value_ * a.gradient_);
  }
  friend Dual operator/(const Dual& a, const Dual& b) { return a * reciprocal(b); }
  friend Dual reciprocal(const Dual& b) {
    if (b.value_ == Scalar(0)) throw DomainError("division by zero");
    return b.chain(Scalar(1) / b.value_, -Scalar(1) / (b.value_ * b.value_), 0);
  }

 private:
  static void check_dims(const Dual& a, const Dual& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("Dual: mixing duals of different dimension");
  }

  Scalar value_;
  Vector gradient_;
};

using Jetd = Jet<double>;
using Duald = Dual<double>;

/// Anything that propagates derivatives through `chain(f, f', f'')`.
template <typename T>
concept Differentiable = requires(const T& t, double s) {
  { t.chain(s, s, s) } -> std::same_as<T>;
  { t.value() } -> std::convertible_to<double>;
};

template <Differentiable T>
T exp(const T& u) {
  const double e = std::exp(u.value());
  return u.chain(e, e, e);
}

template <Differentiable T>
T log(const T& u) {
  const double v = u.value();
  if (!(v > 0)) throw DomainError("log of non-positive value " + std::to_string(v));
  return u.chain(std::log(v), 1 / v, -1 / (v * v));
}

template <Differentiable T>
T sqrt(const T& u) {
  const double v = u.value();
  if (v < 0) throw DomainError("sqrt of negative value " + std::to_string(v));
  const double s = std::sqrt(v);
  return u.chain(s, 0.5 / s, -0.25 / (s * v));
}

template <Differentiable T>
T sin(const T& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return u.chain(s, c, -s);
}

template <Differentiable T>
T cos(const T& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return u.chain(c, -s, -c);
}

template <Differentiable T>
T tan(const T& u) {
  const double t = std::tan(u.value());
  const double sec2 = 1 + t * t;
  return u.chain(t, sec2, 2 * t * sec2);
}

template <Differentiable T>
T abs(const T& u) {
  const double v = u.value();
  if (v == 0 && !u.is_constant()) throw DomainError("abs is not differentiable at 0");
  return u.chain(std::abs(v), v < 0 ? -1.0 : 1.0, 0.0);
}

template <Differentiable T>
T square(const T& u) {
  return u * u;
}

/// u^p for a real exponent; negative bases need an integral exponent.
template <Differentiable T>
T pow(const T& u, double p) {
  const double v = u.value();
  if (v < 0 && p != std::floor(p)) throw DomainError("pow of negative base with fractional exponent");
  if (v == 0 && p < 2 && !u.is_constant() && p != 1.0 && p != 0.0)
    throw DomainError("pow: non-finite derivative at 0");
  if (p == 0.0) return u.chain(1.0, 0.0, 0.0);
  if (p == 1.0) return u;
  return u.chain(std::pow(v, p), p * std::pow(v, p - 1), p * (p - 1) * std::pow(v, p - 2));
}

}  // namespace glharm

#endif  // GLHARM_JET_HPP
