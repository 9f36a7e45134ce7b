#pragma once

#include <cstddef>
#include <vector>

namespace kdvcrit {

/// A real signal sampled at t_i = t0 + i*dt, zero outside the samples and
/// linearly interpolated between them.
struct SampledSignal {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  double operator()(double t) const;
  double t_end() const { return values.empty() ? t0 : t0 + dt * static_cast<double>(values.size() - 1); }
  double sup() const;
  bool is_zero() const;
};

/// Smooth compactly supported bump a * exp(1 - 1/(1 - s^2)) on (t_start, t_end),
/// sampled with step dt from t = 0.
SampledSignal bump_signal(double t_start, double t_end, double amplitude, double dt);

}  // namespace kdvcrit
