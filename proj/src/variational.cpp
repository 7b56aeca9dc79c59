#include "glharm/variational.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace glharm {

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

void check_mesh(const MeshQuadrature& mesh, int dim_domain, std::size_t samples) {
  if (mesh.dim() != dim_domain) throw std::invalid_argument("mesh dimension does not match the map domain");
  if (mesh.size() != samples) throw std::invalid_argument("sample count does not match the mesh");
}

// tr(phi^{-1} T^T psi S)
double pairing(const Matrix& phi_inv, const Matrix& psi, const Matrix& t, const Matrix& s) {
  return (phi_inv * (t.transpose() * psi * s)).trace();
}

}  // namespace

MeshQuadrature MeshQuadrature::box(const Vector& lo, const Vector& hi, int nodes_per_axis) {
  return box(lo, hi, nodes_per_axis, fields::identity_metric(static_cast<int>(lo.size())));
}

MeshQuadrature MeshQuadrature::box(const Vector& lo, const Vector& hi, int nodes_per_axis, const MetricField& phi) {
  const int m = static_cast<int>(lo.size());
  if (m == 0 || hi.size() != lo.size()) throw std::invalid_argument("MeshQuadrature: bad box bounds");
  if (phi.dim() != m) throw std::invalid_argument("MeshQuadrature: metric dimension does not match the box");
  if (nodes_per_axis < 2) throw std::invalid_argument("MeshQuadrature: need at least 2 nodes per axis");
  for (int k = 0; k < m; ++k)
    if (!(hi(k) > lo(k))) throw std::invalid_argument("MeshQuadrature: empty box");

  MeshQuadrature q;
  q.lo_ = lo;
  q.hi_ = hi;
  q.nodes_per_axis_ = nodes_per_axis;
  const Vector h = (hi - lo) / (nodes_per_axis - 1);

  std::size_t total = 1;
  for (int k = 0; k < m; ++k) total *= static_cast<std::size_t>(nodes_per_axis);
  q.nodes_.reserve(total);
  q.weights_.reserve(total);

  std::vector<int> idx(m, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Vector a(m);
    double w = 1;
    for (int k = 0; k < m; ++k) {
      a(k) = idx[k] == nodes_per_axis - 1 ? hi(k) : lo(k) + idx[k] * h(k);
      w *= (idx[k] == 0 || idx[k] == nodes_per_axis - 1) ? 0.5 * h(k) : h(k);
    }
    w *= std::sqrt(metric_inverse_det(phi, a).det);
    q.nodes_.push_back(std::move(a));
    q.weights_.push_back(w);
    for (int k = m - 1; k >= 0; --k) {
      if (++idx[k] < nodes_per_axis) break;
      idx[k] = 0;
    }
  }
  return q;
}

double MeshQuadrature::volume() const { return pairwise_sum(weights_); }

double MeshQuadrature::integrate(std::span<const double> values) const {
  if (values.size() != weights_.size()) throw std::invalid_argument("integrate: value count does not match the mesh");
  std::vector<double> terms(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) terms[k] = weights_[k] * values[k];
  return pairwise_sum(terms);
}

SmoothMap SmoothMap::perturbed(const SmoothMap& eta, double eps) const {
  if (eta.dim_domain() != dim_domain() || eta.dim_target() != dim_target())
    throw std::invalid_argument("perturbed: perturbation has the wrong shape");
  VectorField f = field_, e = eta.field_;
  return SmoothMap(VectorField(dim_domain(), dim_target(), [f, e, eps](JetSpan a) {
    JetVector out = f(a);
    const JetVector d = e(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i] * eps;
    return out;
  }));
}

MapSamples sample(const SmoothMap& f, const MeshQuadrature& mesh, Parallelism par) {
  if (mesh.dim() != f.dim_domain()) throw std::invalid_argument("sample: mesh dimension does not match the map");
  const int m = f.dim_domain(), n = f.dim_target();
  struct Node {
    Vector value;
    Matrix jacobian;
  };
  auto nodes = parallel_map<Node>(mesh.size(), par, [&](std::size_t k) {
    const JetVector j = f.field().jets(mesh.node(k));
    Node out{Vector(n), Matrix(n, m)};
    for (int i = 0; i < n; ++i) {
      out.value(i) = j[i].value();
      out.jacobian.row(i) = j[i].gradient(m).transpose();
    }
    return out;
  });
  MapSamples s;
  s.values.reserve(nodes.size());
  s.jacobians.reserve(nodes.size());
  for (auto& node : nodes) {
    s.values.push_back(std::move(node.value));
    s.jacobians.push_back(std::move(node.jacobian));
  }
  return s;
}

MapSamples sample(const Trajectory& trajectory) {
  MapSamples s;
  s.values = trajectory.positions;
  s.jacobians.reserve(trajectory.size());
  for (const Vector& v : trajectory.velocities) s.jacobians.push_back(Matrix(v));
  return s;
}

DirectionSection::DirectionSection(int dim_domain, int dim_target, Function fn)
    : m_(dim_domain), n_(dim_target), fn_(std::move(fn)) {
  if (m_ <= 0 || n_ <= 0) throw std::invalid_argument("DirectionSection: dimensions must be positive");
}

DirectionSection DirectionSection::decomposed(const VectorField& xi, const VectorField& a_form) {
  if (xi.dim_in() != xi.dim_out() || a_form.dim_in() != a_form.dim_out())
    throw std::invalid_argument("decomposed: xi must be a vector field on N and A a 1-form on M");
  DirectionSection t(a_form.dim_in(), xi.dim_in(), [xi, a_form](const Vector& a, const Vector& x) -> Matrix {
    return xi.value(x) * a_form.value(a).transpose();
  });
  t.decomposition_ = Decomposition{xi, a_form, VectorSide::kTarget};
  return t;
}

DirectionSection DirectionSection::decomposed_on_domain(const ScalarField& xi, const VectorField& a_form) {
  if (a_form.dim_in() != 1 || a_form.dim_out() != xi.dim())
    throw std::invalid_argument("decomposed_on_domain: A must map the real line to covectors on M");
  VectorField xi_field = fields::stack(xi.dim(), {xi});
  DirectionSection t(xi.dim(), 1, [xi, a_form](const Vector& a, const Vector& x) -> Matrix {
    return xi.value(a) * a_form.value(x).transpose();
  });
  t.decomposition_ = Decomposition{xi_field, a_form, VectorSide::kDomain};
  return t;
}

DirectionSection DirectionSection::orbit(const VectorField& xi) {
  return decomposed(xi, fields::constant_vector(1, Vector::Ones(1)));
}

Matrix DirectionSection::operator()(const Vector& a, const Vector& x) const {
  if (a.size() != m_ || x.size() != n_) throw std::invalid_argument("DirectionSection: point dimension mismatch");
  Matrix t = fn_(a, x);
  if (t.rows() != n_ || t.cols() != m_) throw std::logic_error("DirectionSection: closure returned wrong shape");
  return t;
}

DirectionSection DirectionSection::scaled(const ScalarField& k) const {
  if (k.dim() != m_) throw std::invalid_argument("scaled: K must be a function on M");
  Function fn = fn_;
  return DirectionSection(m_, n_, [fn, k](const Vector& a, const Vector& x) -> Matrix { return k.value(a) * fn(a, x); });
}

double energy(const MetricField& phi, const VectorField& direction, const GLMetric& h, const MapSamples& f,
              const MeshQuadrature& mesh, Parallelism par) {
  const int m = mesh.dim();
  if (phi.dim() != m || direction.dim_in() != m || direction.dim_out() != m)
    throw std::invalid_argument("energy: phi and A must live on the mesh domain");
  if (f.values.size() != mesh.size() || f.jacobians.size() != mesh.size())
    throw std::invalid_argument("energy: sample count does not match the mesh");

  const auto integrand = parallel_map<double>(mesh.size(), par, [&](std::size_t k) {
    const Vector& a = mesh.node(k);
    const Matrix& jac = f.jacobians[k];
    const Vector y = jac * direction.value(a);
    Matrix g;
    try {
      g = gl_eval(h, f.values[k], y);
    } catch (const SingularLocusError& e) {
      throw ExcludedSetError(std::string("energy: f_*(A) on the singular locus at node ") + std::to_string(k) + " " +
                                 format_point(to_std(a)),
                             k, to_std(a));
    }
    const Matrix phi_inv = metric_inverse_det(phi, a).inverse;
    return 0.5 * (phi_inv * (jac.transpose() * g * jac)).trace();
  });
  return mesh.integrate(integrand);
}

double energy(const MetricField& phi, const VectorField& direction, const GLMetric& h, const SmoothMap& f,
              const MeshQuadrature& mesh, Parallelism par) {
  return energy(phi, direction, h, sample(f, mesh, par), mesh, par);
}

LagrangianEvaluation lagrangian_lt_detail(const MetricField& phi, const MetricField& psi, const DirectionSection& t,
                                          const MapSamples& f, const MeshQuadrature& mesh, Parallelism par) {
  check_mesh(mesh, t.dim_domain(), f.values.size());
  if (phi.dim() != t.dim_domain() || psi.dim() != t.dim_target())
    throw std::invalid_argument("lagrangian_lt: metric dimensions do not match T");

  struct Node {
    double ratio, cosine;
  };
  const auto nodes = parallel_map<Node>(mesh.size(), par, [&](std::size_t k) {
    const Vector& a = mesh.node(k);
    const Vector& x = f.values[k];
    const Matrix& s = f.jacobians[k];
    const Matrix tk = t(a, x);
    const Matrix phi_inv = metric_inverse_det(phi, a).inverse;
    const Matrix psi_x = psi.value(x);
    const double ss = pairing(phi_inv, psi_x, s, s);
    const double tt = pairing(phi_inv, psi_x, tk, tk);
    const double st = pairing(phi_inv, psi_x, s, tk);
    const double cosine = st / std::sqrt(ss * tt);
    if (!(ss > 0 && tt > 0) || !(std::abs(cosine) > 1e-12))
      throw ExcludedSetError("lagrangian_lt: <delta f, T> vanishes at node " + std::to_string(k) + " " +
                                 format_point(to_std(a)),
                             k, to_std(a));
    return Node{ss * tt / (st * st), cosine};
  });

  LagrangianEvaluation out;
  out.ratio.reserve(nodes.size());
  out.cosine.reserve(nodes.size());
  for (const Node& n : nodes) {
    out.ratio.push_back(n.ratio);
    out.cosine.push_back(n.cosine);
  }
  out.value = 0.5 * mesh.integrate(out.ratio);
  out.half_volume = 0.5 * mesh.volume();
  return out;
}

double lagrangian_lt(const MetricField& phi, const MetricField& psi, const DirectionSection& t, const MapSamples& f,
                     const MeshQuadrature& mesh, Parallelism par) {
  return lagrangian_lt_detail(phi, psi, t, f, mesh, par).value;
}

double lagrangian_lt(const MetricField& phi, const MetricField& psi, const DirectionSection& t, const SmoothMap& f,
                     const MeshQuadrature& mesh, Parallelism par) {
  return lagrangian_lt(phi, psi, t, sample(f, mesh, par), mesh, par);
}

SystemResidual system_e_residual(const DirectionSection& t, const MapSamples& f, const MeshQuadrature& mesh,
                                 Parallelism par) {
  check_mesh(mesh, t.dim_domain(), f.values.size());
  SystemResidual out;
  out.components = parallel_map<Matrix>(mesh.size(), par, [&](std::size_t k) -> Matrix {
    return f.jacobians[k] - t(mesh.node(k), f.values[k]);
  });
  out.per_node.reserve(out.components.size());
  for (const Matrix& c : out.components) {
    const double r = max_abs(c);
    out.per_node.push_back(r);
    out.max_residual = std::max(out.max_residual, r);
  }
  return out;
}

SystemResidual system_e_residual(const DirectionSection& t, const SmoothMap& f, const MeshQuadrature& mesh,
                                 Parallelism par) {
  return system_e_residual(t, sample(f, mesh, par), mesh, par);
}

SystemResidual system_e_residual(const DirectionSection& t, const ScaledSolution& s, const MeshQuadrature& mesh,
                                 Parallelism par) {
  return system_e_residual(t.scaled(s.scaling), s.map, mesh, par);
}

FirstVariation first_variation(const MapFunctional& functional, const SmoothMap& f, const SmoothMap& eta, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("first_variation: eps must be positive");
  FirstVariation out;
  out.base = functional(f);
  out.plus = functional(f.perturbed(eta, eps));
  out.minus = functional(f.perturbed(eta, -eps));
  out.derivative = (out.plus - out.minus) / (2 * eps);
  return out;
}

SmoothMap bump_perturbation(const Vector& lo, const Vector& hi, int dim_target, std::uint64_t seed, double amplitude,
                            int degree) {
  const int m = static_cast<int>(lo.size());
  if (m == 0 || hi.size() != lo.size() || dim_target <= 0 || degree < 0)
    throw std::invalid_argument("bump_perturbation: bad arguments");

  std::size_t terms = 1;
  for (int k = 0; k < m; ++k) terms *= static_cast<std::size_t>(degree + 1);
  // Bits to doubles by hand: std distributions are not portable across standard libraries.
  std::mt19937_64 engine(seed);
  std::vector<double> coeff(terms * dim_target);
  for (double& c : coeff) c = 2.0 * (static_cast<double>(engine() >> 11) * 0x1.0p-53) - 1.0;

  return SmoothMap(VectorField(m, dim_target, [=](JetSpan a) {
    JetVector s(m);
    Jetd bump(1.0);
    for (int k = 0; k < m; ++k) {
      s[k] = (a[k] - lo(k)) * (1.0 / (hi(k) - lo(k)));
      bump *= s[k] * (1.0 - s[k]) * 4.0;
    }
    // Monomials s^e in the same lexicographic order as the coefficients.
    JetVector monomials;
    monomials.reserve(terms);
    std::vector<int> e(m, 0);
    for (std::size_t t = 0; t < terms; ++t) {
      Jetd mono(1.0);
      for (int k = 0; k < m; ++k)
        for (int p = 0; p < e[k]; ++p) mono *= s[k];
      monomials.push_back(std::move(mono));
      for (int k = m - 1; k >= 0; --k) {
        if (++e[k] <= degree) break;
        e[k] = 0;
      }
    }
    JetVector out(dim_target, Jetd(0.0));
    for (int i = 0; i < dim_target; ++i) {
      for (std::size_t t = 0; t < terms; ++t) out[i] += monomials[t] * coeff[i * terms + t];
      out[i] = out[i] * bump * amplitude;
    }
    return out;
  }));
}

}  // namespace glharm
