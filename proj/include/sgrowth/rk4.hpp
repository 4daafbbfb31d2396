#pragma once

#include <cmath>
#include <stdexcept>

namespace sgrowth {

/// One classical Runge-Kutta step of size h for x' = f(t, x). State may be a
/// scalar or any Eigen vector type.
template <typename State, typename Rhs>
State rk4_step(const Rhs& f, double t, const State& x, double h) {
  const State k1 = f(t, x);
  const State k2 = f(t + 0.5 * h, State(x + (0.5 * h) * k1));
  const State k3 = f(t + 0.5 * h, State(x + (0.5 * h) * k2));
  const State k4 = f(t + h, State(x + h * k3));
  return State(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Advances from t0 to t1 in ceil((t1 - t0)/step) equal steps, so a step that
/// divides the interval is used exactly.
template <typename State, typename Rhs>
State rk4_advance(const Rhs& f, double t0, State x, double t1, double step) {
  if (!(step > 0)) throw std::invalid_argument("rk4_advance: step must be positive");
  if (t1 <= t0) return x;
  const auto n = static_cast<long>(std::ceil((t1 - t0) / step - 1e-9));
  const double h = (t1 - t0) / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    x = rk4_step(f, t0 + static_cast<double>(i) * h, x, h);
  }
  return x;
}

}  // namespace sgrowth
