#include "kdvcrit/signal.hpp"

#include <algorithm>
#include <cmath>

namespace kdvcrit {

double SampledSignal::operator()(double t) const {
  if (values.empty() || t < t0 || t > t_end()) return 0.0;
  const double s = (t - t0) / dt;
  const auto i = std::min(static_cast<std::size_t>(s), values.size() - 1);
  if (i + 1 >= values.size()) return values.back();
  const double f = s - static_cast<double>(i);
  return (1.0 - f) * values[i] + f * values[i + 1];
}

double SampledSignal::sup() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool SampledSignal::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

SampledSignal bump_signal(double t_start, double t_end, double amplitude, double dt) {
  SampledSignal u;
  u.t0 = 0.0;
  u.dt = dt;
  const auto n = static_cast<std::size_t>(std::ceil(t_end / dt)) + 1;
  u.values.resize(n, 0.0);
  const double mid = 0.5 * (t_start + t_end), half = 0.5 * (t_end - t_start);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (static_cast<double>(i) * dt - mid) / half;
    if (std::abs(s) < 1.0) u.values[i] = amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  return u;
}

}  // namespace kdvcrit
