#ifndef GLHARM_ODE_HPP
#define GLHARM_ODE_HPP

#include <functional>
#include <vector>

#include "glharm/tensor.hpp"

namespace glharm {

/// Uniformly sampled curve x:[t0,t1] -> N with its velocity.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> positions;
  std::vector<Vector> velocities;

  std::size_t size() const { return times.size(); }
  double step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// Fixed-step RK4 for x' = rhs(t, x). Velocities are rhs at the stored states.
Trajectory rk4_first_order(const std::function<Vector(double, const Vector&)>& rhs, const Vector& x0,
                           double t0, double t1, int steps);

/// Fixed-step RK4 for x'' = accel(x, x') on the first-order reduction (x, x').
Trajectory rk4_second_order(const std::function<Vector(const Vector&, const Vector&)>& accel,
                            const Vector& x0, const Vector& v0, double t0, double t1, int steps);

}  // namespace glharm

#endif  // GLHARM_ODE_HPP
