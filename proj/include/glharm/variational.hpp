#ifndef GLHARM_VARIATIONAL_HPP
#define GLHARM_VARIATIONAL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "glharm/chart_calculus.hpp"
#include "glharm/gl_metric.hpp"
#include "glharm/ode.hpp"
#include "glharm/parallel.hpp"

namespace glharm {

/**
 * Tensor-product trapezoid rule on an axis-aligned box, with the volume
 * density sqrt(det phi) folded into the weights.
 *
 * Nodes are ordered lexicographically with the last axis varying fastest.
 */
class MeshQuadrature {
 public:
  static MeshQuadrature box(const Vector& lo, const Vector& hi, int nodes_per_axis);
  static MeshQuadrature box(const Vector& lo, const Vector& hi, int nodes_per_axis, const MetricField& phi);

  int dim() const { return static_cast<int>(lo_.size()); }
  std::size_t size() const { return nodes_.size(); }
  int nodes_per_axis() const { return nodes_per_axis_; }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  const Vector& node(std::size_t k) const { return nodes_[k]; }
  const std::vector<Vector>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Vol_phi of the box under this rule.
  double volume() const;
  /// Weighted sum of per-node values in fixed pairwise order.
  double integrate(std::span<const double> values) const;

 private:
  MeshQuadrature() = default;

  Vector lo_, hi_;
  int nodes_per_axis_ = 0;
  std::vector<Vector> nodes_;
  std::vector<double> weights_;
};

/// Smooth map f: M -> N between coordinate charts.
class SmoothMap {
 public:
  explicit SmoothMap(VectorField field) : field_(std::move(field)) {}

  int dim_domain() const { return field_.dim_in(); }
  int dim_target() const { return field_.dim_out(); }
  Vector operator()(const Vector& a) const { return field_.value(a); }
  /// f^i_alpha = d f^i / d a^alpha, an n x m matrix.
  Matrix jacobian(const Vector& a) const { return field_.jacobian(a); }
  const VectorField& field() const { return field_; }

  /// f + eps * eta
  SmoothMap perturbed(const SmoothMap& eta, double eps) const;

 private:
  VectorField field_;
};

/// Values and Jacobians of a map at the nodes of a mesh.
struct MapSamples {
  std::vector<Vector> values;
  std::vector<Matrix> jacobians;
};

MapSamples sample(const SmoothMap& f, const MeshQuadrature& mesh, Parallelism par = {});
/// A trajectory as samples of a curve: Jacobian = velocity column.
MapSamples sample(const Trajectory& trajectory);

/**
 * (1,1)-tensor T^i_alpha(a, x) on M x N.
 *
 * Optionally carries the decomposition it was built from: a vector part and
 * a covector part, with the vector part living either on the target
 * (T = xi^i(x) A_alpha(a)) or on the domain (T = xi(a) A_alpha(x)).
 */
class DirectionSection {
 public:
  using Function = std::function<Matrix(const Vector& a, const Vector& x)>;

  enum class VectorSide { kTarget, kDomain };
  struct Decomposition {
    VectorField vector_part;
    VectorField covector_part;
    VectorSide side;
  };

  DirectionSection(int dim_domain, int dim_target, Function fn);

  /// T^i_alpha(a, x) = xi^i(x) A_alpha(a).
  static DirectionSection decomposed(const VectorField& xi, const VectorField& a_form);
  /// T(a, x) = xi(a) A_alpha(x) for a real-valued unknown (n = 1).
  static DirectionSection decomposed_on_domain(const ScalarField& xi, const VectorField& a_form);
  /// Orbit system on an interval: T^i_1(t, x) = xi^i(x).
  static DirectionSection orbit(const VectorField& xi);

  int dim_domain() const { return m_; }
  int dim_target() const { return n_; }
  Matrix operator()(const Vector& a, const Vector& x) const;
  const std::optional<Decomposition>& decomposition() const { return decomposition_; }

  /// K(a) T(a, x)
  DirectionSection scaled(const ScalarField& k) const;

 private:
  int m_, n_;
  Function fn_;
  std::optional<Decomposition> decomposition_;
};

/// A candidate solution of delta f = K T with its scaling function K on M.
struct ScaledSolution {
  SmoothMap map;
  ScalarField scaling;
};

/**
 * (phi, A, h)-energy: 1/2 sum_nodes w phi^{ab} h_ij(f, f_*(A)) f^i_a f^j_b.
 * The mesh weights carry the volume density. Hitting the singular locus of h
 * raises ExcludedSetError naming the node.
 */
double energy(const MetricField& phi, const VectorField& direction, const GLMetric& h, const MapSamples& f,
              const MeshQuadrature& mesh, Parallelism par = {});
double energy(const MetricField& phi, const VectorField& direction, const GLMetric& h, const SmoothMap& f,
              const MeshQuadrature& mesh, Parallelism par = {});

struct LagrangianEvaluation {
  double value = 0;
  double half_volume = 0;            // 1/2 sum of weights, the lower bound
  std::vector<double> ratio;         // |delta f|^2 |T|^2 / <delta f, T>^2 per node, >= 1
  std::vector<double> cosine;        // <delta f, T> / (|delta f| |T|) per node
};

/**
 * L_T(f) = 1/2 sum_nodes w |delta f|^2 |T|^2 / <delta f, T>^2 with
 * <T, S> = phi^{ab}(a) psi_ij(f(a)) T^i_a S^j_b.
 *
 * Throws ExcludedSetError at the first node where <delta f, T> vanishes.
 */
LagrangianEvaluation lagrangian_lt_detail(const MetricField& phi, const MetricField& psi, const DirectionSection& t,
                                          const MapSamples& f, const MeshQuadrature& mesh, Parallelism par = {});
double lagrangian_lt(const MetricField& phi, const MetricField& psi, const DirectionSection& t, const MapSamples& f,
                     const MeshQuadrature& mesh, Parallelism par = {});
double lagrangian_lt(const MetricField& phi, const MetricField& psi, const DirectionSection& t, const SmoothMap& f,
                     const MeshQuadrature& mesh, Parallelism par = {});

struct SystemResidual {
  double max_residual = 0;
  std::vector<double> per_node;     // max_{i,alpha} |f^i_alpha - T^i_alpha(a, f(a))|
  std::vector<Matrix> components;   // f^i_alpha - T^i_alpha(a, f(a))
};

SystemResidual system_e_residual(const DirectionSection& t, const MapSamples& f, const MeshQuadrature& mesh,
                                 Parallelism par = {});
SystemResidual system_e_residual(const DirectionSection& t, const SmoothMap& f, const MeshQuadrature& mesh,
                                 Parallelism par = {});
/// Residual of delta f = K T.
SystemResidual system_e_residual(const DirectionSection& t, const ScaledSolution& s, const MeshQuadrature& mesh,
                                 Parallelism par = {});

using MapFunctional = std::function<double(const SmoothMap&)>;

struct FirstVariation {
  double derivative = 0;  // (F(f + eps eta) - F(f - eps eta)) / (2 eps)
  double base = 0;
  double plus = 0;
  double minus = 0;
};

FirstVariation first_variation(const MapFunctional& functional, const SmoothMap& f, const SmoothMap& eta, double eps);

/**
 * Random smooth perturbation vanishing on the boundary of [lo, hi]:
 * eta^i(a) = amplitude prod_k 4 s_k (1 - s_k) sum_{|e|_inf <= degree} c^i_e s^e,
 * with s_k = (a^k - lo_k) / (hi_k - lo_k) and c uniform in [-1, 1].
 * Deterministic in `seed`.
 */
SmoothMap bump_perturbation(const Vector& lo, const Vector& hi, int dim_target, std::uint64_t seed,
                            double amplitude = 0.1, int degree = 2);

}  // namespace glharm

#endif  // GLHARM_VARIATIONAL_HPP
