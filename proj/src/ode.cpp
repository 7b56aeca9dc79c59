#include "glharm/ode.hpp"

#include <stdexcept>
#include <string>

#include "glharm/errors.hpp"

namespace glharm {

namespace {

void check_span(double t0, double t1, int steps) {
  if (steps < 2) throw std::invalid_argument("integration needs at least 2 steps");
  if (!(t1 > t0)) throw std::invalid_argument("integration interval must satisfy t1 > t0");
}

// Any exception raised while evaluating the right-hand side is reported with the step time.
template <typename F>
auto guarded(double t, F&& f) -> decltype(f()) {
  try {
    auto r = f();
    if (!r.allFinite()) throw IntegrationError("non-finite state at t=" + std::to_string(t), t);
    return r;
  } catch (const IntegrationError&) {
    throw;
  } catch (const Error& e) {
    throw IntegrationError(std::string(e.what()) + " at t=" + std::to_string(t), t);
  }
}

}  // namespace

Trajectory rk4_first_order(const std::function<Vector(double, const Vector&)>& rhs, const Vector& x0,
                           double t0, double t1, int steps) {
  check_span(t0, t1, steps);
  const double h = (t1 - t0) / steps;
  Trajectory out;
  out.times.reserve(steps + 1);
  out.positions.reserve(steps + 1);
  out.velocities.reserve(steps + 1);

  Vector x = x0;
  for (int k = 0; k <= steps; ++k) {
    const double t = t0 + k * h;
    const Vector k1 = guarded(t, [&] { return rhs(t, x); });
    out.times.push_back(t);
    out.positions.push_back(x);
    out.velocities.push_back(k1);
    if (k == steps) break;
    const Vector k2 = guarded(t, [&] { return rhs(t + h / 2, x + (h / 2) * k1); });
    const Vector k3 = guarded(t, [&] { return rhs(t + h / 2, x + (h / 2) * k2); });
    const Vector k4 = guarded(t, [&] { return rhs(t + h, x + h * k3); });
    x += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return out;
}

Trajectory rk4_second_order(const std::function<Vector(const Vector&, const Vector&)>& accel,
                            const Vector& x0, const Vector& v0, double t0, double t1, int steps) {
  check_span(t0, t1, steps);
  if (x0.size() != v0.size()) throw std::invalid_argument("position/velocity dimension mismatch");
  const double h = (t1 - t0) / steps;
  Trajectory out;
  out.times.reserve(steps + 1);
  out.positions.reserve(steps + 1);
  out.velocities.reserve(steps + 1);

  Vector x = x0, v = v0;
  for (int k = 0; k <= steps; ++k) {
    const double t = t0 + k * h;
    out.times.push_back(t);
    out.positions.push_back(x);
    out.velocities.push_back(v);
    if (k == steps) break;
    const Vector a1 = guarded(t, [&] { return accel(x, v); });
    const Vector x2 = x + (h / 2) * v, v2 = v + (h / 2) * a1;
    const Vector a2 = guarded(t, [&] { return accel(x2, v2); });
    const Vector x3 = x + (h / 2) * v2, v3 = v + (h / 2) * a2;
    const Vector a3 = guarded(t, [&] { return accel(x3, v3); });
    const Vector x4 = x + h * v3, v4 = v + h * a3;
    const Vector a4 = guarded(t, [&] { return accel(x4, v4); });
    x += (h / 6) * (v + 2 * v2 + 2 * v3 + v4);
    v += (h / 6) * (a1 + 2 * a2 + 2 * a3 + a4);
  }
  return out;
}

}  // namespace glharm
