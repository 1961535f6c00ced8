#pragma once

// Radial shooting for a Q'' + a (d-1)/r Q' - b Q + Q^3 = 0, Q'(0) = 0,
// Q -> 0. Independent of the spectral solver: adaptive Dormand-Prince on the
// radial ODE and bisection on Q(0).

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace oracle {

struct RadialProfile {
  double q0 = 0.0;
  double mass = 0.0;  // |S^{d-1}| int Q^2 r^{d-1} dr
};

inline RadialProfile shoot_ground_state(int d, double lo = 1.0, double hi = 4.0) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 3>;  // Q, Q', accumulated mass
  const double a = 0.5 * d, b = 2.0 - 0.5 * d;
  const double sphere = d == 2 ? 2.0 * M_PI : 4.0 * M_PI;

  auto rhs = [&](const State& y, State& dy, double r) {
    dy[0] = y[1];
    dy[1] = (b * y[0] - y[0] * y[0] * y[0]) / a - (d - 1) / r * y[1];
    dy[2] = sphere * std::pow(r, d - 1) * y[0] * y[0];
  };

  // +1: crossed zero (q0 too large), -1: turned upwards (too small).
  auto classify = [&](double q0, double& mass) {
    const double r0 = 1e-6;
    const double q2 = (b * q0 - q0 * q0 * q0) / (a * d);
    State y{q0 + 0.5 * q2 * r0 * r0, q2 * r0, 0.0};
    auto stepper = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(y, r0, 1e-4);
    while (stepper.current_time() < 40.0) {
      stepper.do_step(rhs);
      const State& s = stepper.current_state();
      mass = s[2];
      if (s[0] < 0.0) return 1;
      if (s[1] > 0.0) return -1;
    }
    return 0;
  };

  RadialProfile out;
  double mass = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    const int c = classify(mid, mass);
    if (c == 0) break;
    (c > 0 ? hi : lo) = mid;
  }
  out.q0 = 0.5 * (lo + hi);
  classify(out.q0, out.mass);
  return out;
}

}  // namespace oracle
